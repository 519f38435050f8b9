"""Margolis homology HM(M, Q_t) of finite bigraded modules.

A module is presented by a basis e_i of bidegrees b_i over F_p[tau, rho] and,
for each t, the matrix of Q_t (column j holds Q_t(e_j)). Q_t is extended
linearly over the coefficients, so the graded piece M_b is spanned over F_p
by c * e_i with deg(c) + b_i = b and every M_b is finite dimensional.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

import grammar
import linalg
from bmu import BmuModule, TruncationError, bmu_bidegree, bmu_name
from coeff import (
    BaseMode,
    Bidegree,
    Coeff,
    ContractError,
    coefficient_monomial,
    monomial_bidegree,
)
from dual import is_prime, tau_bidegree
from operations import MotivicSteenrod

Matrix = list[list[Coeff]]

SPECIALIZATIONS = ((0, 0), (1, 0), (0, 1), (1, 1))


class ModuleError(Exception):
    pass


def q_bidegree(prime: int, t: int) -> Bidegree:
    return tau_bidegree(prime, t)


@dataclass
class ModulePresentation:
    prime: int
    mode: BaseMode
    basis: list[tuple[str, Bidegree]]
    actions: dict[int, Matrix] = field(default_factory=dict)
    # Bidegrees where truncation lost terms; excluded from vanishing claims.
    flagged: set[Bidegree] = field(default_factory=set)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.basis]

    @property
    def bidegrees(self) -> list[Bidegree]:
        return [bd for _, bd in self.basis]

    def zero(self) -> Coeff:
        return Coeff.zero(self.prime, self.mode)

    def action(self, t: int) -> Matrix:
        if t not in self.actions:
            raise ModuleError(
                f"No action of Q_{t} given; the module defines "
                f"{', '.join(f'Q_{s}' for s in sorted(self.actions)) or 'none'}"
            )
        return self.actions[t]

    def validate(self) -> None:
        """Check shapes, homogeneity and Q_t o Q_t = 0.

        Raises:
            ModuleError: naming the offending basis element.
        """
        names = self.names
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise ModuleError(f"Basis element {dup!r} appears twice")
        n = len(self.basis)
        for t, A in sorted(self.actions.items()):
            if t < 0:
                raise ModuleError(f"Q_{t} does not exist")
            if len(A) != n or any(len(row) != n for row in A):
                raise ModuleError(f"The matrix of Q_{t} is not {n}x{n}")
            q = q_bidegree(self.prime, t)
            for j, (name_j, bd_j) in enumerate(self.basis):
                for i, (name_i, bd_i) in enumerate(self.basis):
                    entry = A[i][j]
                    if not entry:
                        continue
                    want = bd_j + q - bd_i
                    if entry.bidegree() != want:
                        raise ModuleError(
                            f"Q_{t}({name_j}) has the entry {entry} at {name_i}, "
                            f"which is not homogeneous of bidegree {want}"
                        )
            for j, name_j in enumerate(names):
                for i in range(n):
                    square = self.zero()
                    for k in range(n):
                        if A[k][j] and A[i][k]:
                            square = square + A[i][k] * A[k][j]
                    if square:
                        raise ModuleError(
                            f"Q_{t} does not square to zero: Q_{t}Q_{t}({name_j}) "
                            f"has {square} at {names[i]}"
                        )

    def to_jsonable_dict(self) -> dict[str, Any]:
        return {
            "prime": self.prime,
            "mode": self.mode.value,
            "basis": [{"name": name, "bidegree": [bd.d, bd.w]} for name, bd in self.basis],
            "actions": {
                str(t): [[str(c) for c in row] for row in A]
                for t, A in sorted(self.actions.items())
            },
            "flagged": [[bd.d, bd.w] for bd in sorted(self.flagged)],
        }


def _bidegree_of(raw: Any, what: str) -> Bidegree:
    if (
        not isinstance(raw, list)
        or len(raw) != 2
        or not all(isinstance(x, int) and not isinstance(x, bool) for x in raw)
    ):
        raise ModuleError(f"{what} needs a bidegree [d, w], got {raw!r}")
    return Bidegree(raw[0], raw[1])


def module_from_dict(data: Any) -> ModulePresentation:
    if not isinstance(data, dict):
        raise ModuleError("A module is a JSON object")
    for key in ("prime", "basis", "actions"):
        if key not in data:
            raise ModuleError(f"Missing key {key!r}")
    prime = data["prime"]
    if not isinstance(prime, int) or not is_prime(prime):
        raise ModuleError(f"prime must be a prime number, got {prime!r}")
    try:
        mode = BaseMode.from_str(data.get("mode", "generic"))
    except ContractError as e:
        raise ModuleError(str(e)) from e

    if not isinstance(data["basis"], list):
        raise ModuleError("basis must be a list")
    basis: list[tuple[str, Bidegree]] = []
    for k, entry in enumerate(data["basis"]):
        if not isinstance(entry, dict) or not isinstance(entry.get("name"), str):
            raise ModuleError(f"Basis entry {k} needs a string 'name'")
        basis.append((entry["name"], _bidegree_of(entry.get("bidegree"), entry["name"])))

    if not isinstance(data["actions"], dict):
        raise ModuleError("actions must map t to a matrix")
    actions: dict[int, Matrix] = {}
    n = len(basis)
    for key, rows in data["actions"].items():
        try:
            t = int(key)
        except ValueError:
            raise ModuleError(f"Action key {key!r} is not an integer")
        if not isinstance(rows, list) or len(rows) != n:
            raise ModuleError(f"The matrix of Q_{t} needs {n} rows")
        matrix: Matrix = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise ModuleError(f"Row {basis[i][0]} of Q_{t} needs {n} entries")
            parsed = []
            for j, src in enumerate(row):
                try:
                    parsed.append(grammar.parse_coeff(str(src), prime, mode))
                except grammar.ParseError as e:
                    raise ModuleError(
                        f"Q_{t}({basis[j][0]}) at {basis[i][0]}: {e}"
                    ) from e
            matrix.append(parsed)
        actions[t] = matrix

    flagged = {_bidegree_of(raw, "flagged entry") for raw in data.get("flagged", [])}
    module = ModulePresentation(prime, mode, basis, actions, flagged)
    module.validate()
    return module


def load_module(source: str) -> ModulePresentation:
    """Load a module from inline JSON (starting with '{') or a file path."""
    if source.lstrip().startswith("{"):
        text = source
    else:
        path = Path(source)
        if not path.is_file():
            raise ModuleError(f"No module file at {path}")
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModuleError(f"Malformed module JSON: {e}") from e
    return module_from_dict(data)


def direct_sum(m1: ModulePresentation, m2: ModulePresentation) -> ModulePresentation:
    """Block sum; actions present in both summands survive."""
    if m1.prime != m2.prime or m1.mode is not m2.mode:
        raise ContractError("Direct sum of modules over different rings")
    taken = set(m1.names)
    basis = list(m1.basis)
    for name, bd in m2.basis:
        while name in taken:
            name += "'"
        taken.add(name)
        basis.append((name, bd))
    n1, n2 = len(m1.basis), len(m2.basis)
    zero = m1.zero()
    actions: dict[int, Matrix] = {}
    for t in sorted(set(m1.actions) & set(m2.actions)):
        A, B = m1.actions[t], m2.actions[t]
        rows = [list(A[i]) + [zero] * n2 for i in range(n1)]
        rows += [[zero] * n1 + list(B[i]) for i in range(n2)]
        actions[t] = rows
    return ModulePresentation(m1.prime, m1.mode, basis, actions, m1.flagged | m2.flagged)


def specialize(m: ModulePresentation, t: int, tau: int, rho: int) -> np.ndarray:
    """Dense F_p matrix of Q_t with tau and rho replaced by residues."""
    A = m.action(t)
    n = len(m.basis)
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if A[i][j]:
                out[i, j] = A[i][j].evaluate(tau, rho)
    return out


def dense_rank_mod_p(m: ModulePresentation, t: int, tau: int, rho: int) -> int:
    return linalg.fp_rank(specialize(m, t, tau, rho), m.prime)


@dataclass
class BidegreeHomology:
    bidegree: Bidegree
    dim: int
    ker: int
    im: int
    rank_out: int
    flagged: bool = False

    @property
    def hm(self) -> int:
        return self.ker - self.im

    def to_jsonable_dict(self) -> dict[str, Any]:
        return {
            "bidegree": [self.bidegree.d, self.bidegree.w],
            "dim": self.dim,
            "ker": self.ker,
            "im": self.im,
            "hm": self.hm,
            "flagged": self.flagged,
        }


@dataclass
class HomologyReport:
    t: int
    prime: int
    mode: BaseMode
    size: int
    pieces: list[BidegreeHomology]
    generic_rank: int
    specialized_ranks: dict[tuple[int, int], int]

    @property
    def generic_hm(self) -> int:
        """Total HM over the fraction field of the coefficient ring."""
        return self.size - 2 * self.generic_rank

    def vanishes(self) -> bool:
        return all(piece.hm == 0 for piece in self.pieces if not piece.flagged)

    def at(self, bd: Bidegree) -> Optional[BidegreeHomology]:
        return next((piece for piece in self.pieces if piece.bidegree == bd), None)

    def to_jsonable_dict(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "prime": self.prime,
            "mode": self.mode.value,
            "pieces": [piece.to_jsonable_dict() for piece in self.pieces],
            "generic_rank": self.generic_rank,
            "generic_hm": self.generic_hm,
            "specialized_ranks": {
                f"tau={a},rho={b}": r for (a, b), r in sorted(self.specialized_ranks.items())
            },
            "vanishes": self.vanishes(),
        }

    def __str__(self) -> str:
        lines = [f"HM(M, Q_{self.t}) at p={self.prime}, {self.mode.value}"]
        for piece in self.pieces:
            mark = "  [flagged]" if piece.flagged else ""
            lines.append(
                f"  {piece.bidegree}: dim {piece.dim}, ker {piece.ker}, im {piece.im}, "
                f"HM {piece.hm}{mark}"
            )
        lines.append(f"  generic rank {self.generic_rank}, generic HM {self.generic_hm}")
        return "\n".join(lines)


class _GradedPieces:
    """F_p bases of the graded pieces M_b and the matrices of Q_t between them."""

    def __init__(self, m: ModulePresentation, t: int) -> None:
        self.m = m
        self.A = m.action(t)
        self.q = q_bidegree(m.prime, t)
        self._rank_cache: dict[Bidegree, int] = {}

    def piece(self, b: Bidegree) -> list[tuple[int, Coeff]]:
        out = []
        for i, bd_i in enumerate(self.m.bidegrees):
            mono = coefficient_monomial(b - bd_i, self.m.mode)
            if mono is not None:
                out.append((i, Coeff.monomial(self.m.prime, self.m.mode, *mono)))
        return out

    def matrix(self, b: Bidegree) -> np.ndarray:
        """Q_t: M_b -> M_{b+q} over F_p."""
        source = self.piece(b)
        target = self.piece(b + self.q)
        rows = {i: r for r, (i, _) in enumerate(target)}
        out = np.zeros((len(target), len(source)), dtype=np.int64)
        for col, (j, c_j) in enumerate(source):
            for i, r in rows.items():
                entry = self.A[i][j]
                if entry:
                    image = c_j * entry
                    # a single monomial, the one of target basis element r
                    out[r, col] = sum(image.terms.values()) % self.m.prime
        return out

    def rank_out(self, b: Bidegree) -> int:
        if b not in self._rank_cache:
            self._rank_cache[b] = linalg.fp_rank(self.matrix(b), self.m.prime)
        return self._rank_cache[b]


def reported_bidegrees(m: ModulePresentation, coefficient_depth: int = 0) -> list[Bidegree]:
    shifts = [
        monomial_bidegree((total - b, b))
        for total in range(coefficient_depth + 1)
        for b in range(total + 1)
        if m.mode.allows(total - b, b)
    ]
    return sorted({bd + s for bd in m.bidegrees for s in shifts})


def _is_flagged(m: ModulePresentation, b: Bidegree) -> bool:
    return any(coefficient_monomial(b - f, m.mode) is not None for f in m.flagged)


def homology_at(
    m: ModulePresentation, t: int, bidegrees: Iterable[Bidegree]
) -> list[BidegreeHomology]:
    graded = _GradedPieces(m, t)
    pieces = []
    for b in bidegrees:
        dim = len(graded.piece(b))
        rank_out = graded.rank_out(b)
        im = graded.rank_out(b - graded.q)
        pieces.append(
            BidegreeHomology(b, dim, dim - rank_out, im, rank_out, _is_flagged(m, b))
        )
    return pieces


def margolis_homology(
    m: ModulePresentation, t: int, coefficient_depth: int = 0
) -> HomologyReport:
    """Per-bidegree kernel, image and HM of Q_t, plus the generic rank.

    Raises:
        ModuleError: if the module carries no action of Q_t.
    """
    pieces = homology_at(m, t, reported_bidegrees(m, coefficient_depth))
    generic = linalg.bareiss_rank(m.action(t))
    specialized = {
        (a, r): dense_rank_mod_p(m, t, a, r) for a, r in SPECIALIZATIONS
    }
    logging.debug(
        f"HM(Q_{t}) over {len(m.basis)} generators: {len(pieces)} bidegrees, "
        f"generic rank {generic}"
    )
    return HomologyReport(t, m.prime, m.mode, len(m.basis), pieces, generic, specialized)


def export_bmu(
    N: int, t: int, prime: int = 2, mode: BaseMode = BaseMode.GENERIC, crossing: str = "twisted"
) -> ModulePresentation:
    """The module {u^e v^n : n <= N} with the action of Q_t on B mu_p.

    A column whose image reaches past v^N is zeroed; its source and target
    bidegrees are flagged.

    The matrix records Q_t on the monomials only, and the presentation treats
    Q_t as R-linear. At p=2 in generic mode Q_0(tau) = rho, so Q_0 is not
    R-linear there; that twist is ignored and the homology computed from the
    export is that of the R-linear map on the monomial basis.
    """
    monomials = sorted(
        ((eps, n) for n in range(N + 1) for eps in (0, 1)), key=bmu_bidegree
    )
    index = {mono: k for k, mono in enumerate(monomials)}
    q = q_bidegree(prime, t)
    # Q_t raises the v-exponent by at most p^t
    wide = BmuModule(prime, mode, N + prime**t, crossing)
    steenrod = MotivicSteenrod(prime, mode, crossing=crossing).with_window(q.d)
    Q = steenrod.milnor_primitive(t)
    zero = Coeff.zero(prime, mode)
    A: Matrix = [[zero] * len(monomials) for _ in monomials]
    flagged: set[Bidegree] = set()
    for j, mono in enumerate(monomials):
        try:
            image = wide.act(Q, wide.monomial(*mono))
        except TruncationError as e:
            raise ModuleError(f"Q_{t}({bmu_name(mono)}) overflows: {e}") from e
        if any(m[1] > N for m in image.terms):
            logging.debug(f"Q_{t}({bmu_name(mono)}) = {image} leaves v^{N}, flagging")
            flagged.add(bmu_bidegree(mono))
            flagged.add(bmu_bidegree(mono) + q)
            continue
        for target, c in image.terms.items():
            A[index[target]][j] = c
    basis = [(bmu_name(mono), bmu_bidegree(mono)) for mono in monomials]
    module = ModulePresentation(prime, mode, basis, {t: A}, flagged)
    module.validate()
    return module
