"""The dual motivic Steenrod algebra A_{*,*} over F_p[tau, rho].

Monomials are tau(E) xi(R) with E a set of tau indices and R the exponents of
xi_1, xi_2, ...; elements carry their coefficients on the left. An element
c * w has bidegree deg(w) - deg(c).
"""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from coeff import (
    BaseMode,
    Bidegree,
    Coeff,
    Combination,
    ContractError,
    accumulate,
    coefficient_monomials_upto,
    term_str,
)

# ('t' | 'x', index, exponent) in the order the factors are written
Word = Sequence[tuple[str, int, int]]

CROSSINGS = ("twisted", "central")


@dataclass(frozen=True)
class DualMonomial:
    E: tuple[int, ...] = ()
    R: tuple[int, ...] = ()

    @classmethod
    def make(cls, E: Iterable[int] = (), R: Iterable[int] = ()) -> DualMonomial:
        e = tuple(sorted(E))
        if len(set(e)) != len(e):
            raise ContractError(f"Repeated tau index in {e}")
        r = list(R)
        while r and r[-1] == 0:
            r.pop()
        return cls(e, tuple(r))

    @classmethod
    def tau(cls, i: int) -> DualMonomial:
        return cls((i,), ())

    @classmethod
    def xi(cls, j: int, exponent: int = 1) -> DualMonomial:
        if j == 0 or exponent == 0:
            return UNIT
        return cls((), (0,) * (j - 1) + (exponent,))

    def is_unit(self) -> bool:
        return not self.E and not self.R

    def xi_exponent(self, j: int) -> int:
        return self.R[j - 1] if 0 < j <= len(self.R) else 0

    def bidegree(self, prime: int) -> Bidegree:
        return _bidegree(self, prime)

    def vector(self) -> tuple[int, ...]:
        """Exponents in generator order t0, t1, x1, t2, x2, ..."""
        top = max(self.E[-1] if self.E else 0, len(self.R))
        vec = [1 if 0 in self.E else 0]
        for i in range(1, top + 1):
            vec.append(1 if i in self.E else 0)
            vec.append(self.xi_exponent(i))
        while len(vec) > 1 and vec[-1] == 0:
            vec.pop()
        return tuple(vec)

    def key(self, prime: int) -> tuple[int, int, tuple[int, ...]]:
        bd = self.bidegree(prime)
        return (bd.d, bd.w, self.vector())

    def split_first(self) -> tuple[DualMonomial, DualMonomial]:
        """Write self = g * rest with g a generator and no sign."""
        if self.E:
            return DualMonomial.tau(self.E[0]), DualMonomial(self.E[1:], self.R)
        j = next(i for i, r in enumerate(self.R, 1) if r)
        rest = list(self.R)
        rest[j - 1] -= 1
        return DualMonomial.xi(j), DualMonomial.make((), rest)

    def word(self) -> list[tuple[str, int, int]]:
        return [("t", i, 1) for i in self.E] + [
            ("x", j, r) for j, r in enumerate(self.R, 1) if r
        ]

    def __str__(self) -> str:
        if self.is_unit():
            return "1"
        parts = []
        top = max(self.E[-1] if self.E else 0, len(self.R))
        for i in range(0, top + 1):
            if i in self.E:
                parts.append(f"t{i}")
            r = self.xi_exponent(i)
            if r:
                parts.append(f"x{i}" if r == 1 else f"x{i}^{r}")
        return " ".join(parts)


UNIT = DualMonomial()


@functools.lru_cache(maxsize=1 << 14)
def _bidegree(mono: DualMonomial, prime: int) -> Bidegree:
    d = w = 0
    for i in mono.E:
        d += 2 * prime**i - 1
        w += prime**i - 1
    for j, r in enumerate(mono.R, 1):
        d += r * 2 * (prime**j - 1)
        w += r * (prime**j - 1)
    return Bidegree(d, w)


def tau_bidegree(prime: int, i: int) -> Bidegree:
    return Bidegree(2 * prime**i - 1, prime**i - 1)


def xi_bidegree(prime: int, j: int) -> Bidegree:
    return Bidegree(2 * (prime**j - 1), prime**j - 1)


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % k for k in range(2, int(n**0.5) + 1))


TensorKey = tuple[DualMonomial, DualMonomial]
TripleKey = tuple[DualMonomial, DualMonomial, DualMonomial]
Product = tuple[tuple[DualMonomial, Coeff], ...]


class DualElement(Combination[DualMonomial]):
    def __init__(
        self, alg: DualSteenrod, terms: Optional[Mapping[DualMonomial, Coeff]] = None
    ) -> None:
        super().__init__(alg.prime, alg.mode, terms)
        self.alg = alg

    def _like(self, terms: Mapping[DualMonomial, Coeff]) -> DualElement:
        return DualElement(self.alg, terms)

    def __mul__(self, other: Union[DualElement, Coeff, int]) -> DualElement:
        if isinstance(other, DualElement):
            return self.alg.mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Union[Coeff, int]) -> DualElement:
        return self.scale(other)

    def __pow__(self, n: int) -> DualElement:
        return self.alg.power(self, n)

    def term_bidegrees(self) -> Iterator[Bidegree]:
        for mono, c in self.terms.items():
            for part_bd in c.homogeneous_parts():
                yield mono.bidegree(self.prime) - part_bd

    def bidegree(self) -> Optional[Bidegree]:
        """Common bidegree of all terms, None if zero or inhomogeneous."""
        degrees = set(self.term_bidegrees())
        return degrees.pop() if len(degrees) == 1 else None

    def homogeneous_parts(self) -> dict[Bidegree, DualElement]:
        parts: dict[Bidegree, dict[DualMonomial, Coeff]] = {}
        for mono, c in self.terms.items():
            for cbd, part in c.homogeneous_parts().items():
                bd = mono.bidegree(self.prime) - cbd
                parts.setdefault(bd, {})[mono] = part
        return {bd: self._like(t) for bd, t in parts.items()}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        rows = []
        for mono, c in self.terms.items():
            mbd = mono.bidegree(self.prime)
            for cm in c.monomials():
                cbd = cm.bidegree()
                assert cbd is not None
                rows.append(((mbd - cbd, cm.sort_key(), mono.key(self.prime)), cm, mono))
        rows.sort(key=lambda row: row[0])
        return " + ".join(term_str(cm, str(mono)) for _, cm, mono in rows)


class DualTensor(Combination[TensorKey]):
    """Elements of A_{*,*} (x) A_{*,*}, coefficients pushed to the far left."""

    def __init__(
        self, alg: DualSteenrod, terms: Optional[Mapping[TensorKey, Coeff]] = None
    ) -> None:
        super().__init__(alg.prime, alg.mode, terms)
        self.alg = alg

    def _like(self, terms: Mapping[TensorKey, Coeff]) -> DualTensor:
        return DualTensor(self.alg, terms)

    def __mul__(self, other: DualTensor) -> DualTensor:
        return DualTensor(self.alg, self.alg.tensor_product(self.terms, other.terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        p = self.prime
        rows = []
        for (left, right), c in self.terms.items():
            for cm in c.monomials():
                key = (cm.sort_key(), right.key(p), left.key(p))
                rows.append((key, term_str(cm, f"{left}(x){right}")))
        rows.sort(key=lambda row: row[0])
        return " + ".join(text for _, text in rows)


@dataclass(frozen=True)
class DualSteenrod:
    """A_{*,*} at a fixed prime and base mode.

    The crossing rule moves a coefficient out of the right tensor factor
    through the right unit: a (x) h*b = a*eta_R(h) (x) b. "central" replaces
    eta_R by the identity.
    """

    prime: int
    mode: BaseMode = BaseMode.GENERIC
    crossing: str = "twisted"

    def __post_init__(self) -> None:
        if not is_prime(self.prime):
            raise ContractError(f"{self.prime} is not a prime")
        if self.crossing not in CROSSINGS:
            raise ContractError(f"Unknown crossing rule {self.crossing!r}")

    # ---- coefficients and constructors ----
    def coeff(self, a: int = 0, b: int = 0, c: int = 1) -> Coeff:
        return Coeff.monomial(self.prime, self.mode, a, b, c)

    @property
    def one_coeff(self) -> Coeff:
        return Coeff.one(self.prime, self.mode)

    @property
    def zero_coeff(self) -> Coeff:
        return Coeff.zero(self.prime, self.mode)

    @property
    def twisted(self) -> bool:
        return self.prime == 2 and self.crossing == "twisted" and self.mode is BaseMode.GENERIC

    def element(self, terms: Optional[Mapping[DualMonomial, Coeff]] = None) -> DualElement:
        return DualElement(self, terms)

    def zero(self) -> DualElement:
        return DualElement(self)

    def one(self) -> DualElement:
        return self.monomial(UNIT)

    def monomial(self, mono: DualMonomial, c: Optional[Coeff] = None) -> DualElement:
        return DualElement(self, {mono: self.one_coeff if c is None else c})

    def from_coeff(self, c: Coeff) -> DualElement:
        return DualElement(self, {UNIT: c})

    def tau(self, i: int) -> DualElement:
        return self.monomial(DualMonomial.tau(i))

    def xi(self, j: int) -> DualElement:
        return self.monomial(DualMonomial.xi(j))

    # ---- normal form ----
    def normalize(self, word: Word, c: Optional[Coeff] = None) -> DualElement:
        """Normal form of c times a formal product of generators.

        At p=2 squares of tau_i are rewritten highest index first; at odd p
        they vanish and reordering the tau's contributes Koszul signs.
        """
        c = self.one_coeff if c is None else c
        if self.prime == 2:
            return DualElement(self, self._rewrite_p2(word, c))
        return DualElement(self, self._sort_odd(word, c))

    def _sort_odd(self, word: Word, c: Coeff) -> dict[DualMonomial, Coeff]:
        taus: list[int] = []
        xis: dict[int, int] = {}
        for kind, i, e in word:
            if kind == "t":
                if e >= 2:
                    return {}
                if e == 1:
                    taus.append(i)
            elif i > 0:
                xis[i] = xis.get(i, 0) + e
        if len(set(taus)) != len(taus):
            return {}
        inversions = sum(
            1 for a in range(len(taus)) for b in range(a + 1, len(taus)) if taus[a] > taus[b]
        )
        if inversions % 2:
            c = -c
        R = [xis.get(j, 0) for j in range(1, max(xis, default=0) + 1)]
        return {DualMonomial.make(taus, R): c} if c else {}

    def _rewrite_p2(self, word: Word, c: Coeff) -> dict[DualMonomial, Coeff]:
        taus: dict[int, int] = {}
        xis: dict[int, int] = {}
        for kind, i, e in word:
            if kind == "t":
                taus[i] = taus.get(i, 0) + e
            elif i > 0:
                xis[i] = xis.get(i, 0) + e
        budget = sum(taus.values())
        tau_c = self.coeff(1, 0)
        rho_c = self.coeff(0, 1)
        out: dict[DualMonomial, Coeff] = {}
        stack = [(taus, xis, c, 0)]
        while stack:
            t, x, coeff, depth = stack.pop()
            # Every rewrite lowers the total tau exponent.
            assert depth <= budget, f"tau-square rewriting ran {depth} steps on budget {budget}"
            squares = [i for i, e in t.items() if e >= 2]
            if not squares:
                E = [i for i, e in t.items() if e]
                R = [x.get(j, 0) for j in range(1, max(x, default=0) + 1)]
                accumulate(out, DualMonomial.make(E, R), coeff)
                continue
            i = max(squares)
            for extra, dt, dx in (
                (tau_c, (), (i + 1,)),
                (rho_c, (i + 1,), ()),
                (rho_c, (0,), (i + 1,)),
            ):
                new_c = coeff * extra
                if not new_c:
                    continue
                nt = dict(t)
                nt[i] -= 2
                for k in dt:
                    nt[k] = nt.get(k, 0) + 1
                nx = dict(x)
                for k in dx:
                    nx[k] = nx.get(k, 0) + 1
                stack.append((nt, nx, new_c, depth + 1))
        return {m: v for m, v in out.items() if v}

    @functools.lru_cache(maxsize=1 << 17)
    def mono_product(self, m1: DualMonomial, m2: DualMonomial) -> Product:
        if m1.is_unit():
            return ((m2, self.one_coeff),)
        if m2.is_unit():
            return ((m1, self.one_coeff),)
        return tuple(self.normalize(m1.word() + m2.word()).terms.items())

    def mul(self, a: DualElement, b: DualElement) -> DualElement:
        out: dict[DualMonomial, Coeff] = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                c = c1 * c2
                if not c:
                    continue
                for m, cm in self.mono_product(m1, m2):
                    accumulate(out, m, c * cm)
        return DualElement(self, out)

    def power(self, x: DualElement, n: int) -> DualElement:
        result = self.one()
        for _ in range(n):
            result = self.mul(result, x)
        return result

    # ---- right unit ----
    @functools.lru_cache(maxsize=1 << 10)
    def _eta_monomial(self, a: int, b: int) -> DualElement:
        base = DualElement(
            self, {UNIT: self.coeff(1, 0), DualMonomial.tau(0): self.coeff(0, 1)}
        )
        return self.power(base, a).scale(self.coeff(0, b))

    def eta_right(self, c: Coeff) -> DualElement:
        """eta_R(tau) = tau + rho*tau_0, eta_R(rho) = rho when twisted."""
        if not self.twisted:
            return self.from_coeff(c)
        total = self.zero()
        for (a, b), r in c.terms.items():
            total = total + self._eta_monomial(a, b).scale(r)
        return total

    @functools.lru_cache(maxsize=1 << 12)
    def cross(self, c: Coeff) -> Product:
        return tuple(self.eta_right(c).terms.items())

    # ---- coproduct ----
    def _deg(self, m: DualMonomial) -> Bidegree:
        return m.bidegree(self.prime)

    def _generator_coproduct(self, gen: DualMonomial) -> dict[TensorKey, Coeff]:
        one = self.one_coeff
        p = self.prime
        if gen.E:
            k = gen.E[0]
            terms = {(gen, UNIT): one}
            for i in range(k + 1):
                terms[(DualMonomial.xi(k - i, p**i), DualMonomial.tau(i))] = one
            return terms
        k = len(gen.R)
        return {(DualMonomial.xi(k - i, p**i), DualMonomial.xi(i)): one for i in range(k + 1)}

    def tensor_product(
        self,
        s: Mapping[TensorKey, Coeff],
        t: Mapping[TensorKey, Coeff],
        lbound: Optional[Bidegree] = None,
        rbound: Optional[Bidegree] = None,
    ) -> dict[TensorKey, Coeff]:
        """Product in the tensor algebra; terms outside the bounds are dropped.

        Monomial bidegrees never decrease under products or crossing, so
        pruning partial products is exact on the surviving terms.
        """
        out: dict[TensorKey, Coeff] = {}
        for (a1, b1), c1 in s.items():
            for (a2, b2), c2 in t.items():
                if not (self._deg(a1) + self._deg(a2)).fits(lbound):
                    continue
                if not (self._deg(b1) + self._deg(b2)).fits(rbound):
                    continue
                c = c1 * c2
                if self.prime != 2 and self._deg(b1).d * self._deg(a2).d % 2:
                    c = -c
                lefts = self.mono_product(a1, a2)
                for mr, cr in self.mono_product(b1, b2):
                    if not self._deg(mr).fits(rbound):
                        continue
                    for mx, cx in self.cross(cr):
                        for ml, cl in lefts:
                            for m, cm in self.mono_product(ml, mx):
                                if self._deg(m).fits(lbound):
                                    accumulate(out, (m, mr), c * cl * cx * cm)
        return {k: v for k, v in out.items() if v}

    @functools.lru_cache(maxsize=1 << 16)
    def _mono_coproduct(
        self, m: DualMonomial, lbound: Optional[Bidegree], rbound: Optional[Bidegree]
    ) -> tuple[tuple[TensorKey, Coeff], ...]:
        if m.is_unit():
            return (((UNIT, UNIT), self.one_coeff),)
        gen, rest = m.split_first()
        terms = self.tensor_product(
            self._generator_coproduct(gen),
            dict(self._mono_coproduct(rest, lbound, rbound)),
            lbound,
            rbound,
        )
        return tuple(terms.items())

    def coproduct(
        self,
        x: DualElement,
        lbound: Optional[Bidegree] = None,
        rbound: Optional[Bidegree] = None,
    ) -> DualTensor:
        """phi_* extended as an algebra map, optionally pruned by factor bidegrees."""
        out: dict[TensorKey, Coeff] = {}
        for m, c in x.terms.items():
            for key, v in self._mono_coproduct(m, lbound, rbound):
                accumulate(out, key, c * v)
        return DualTensor(self, out)

    def counit(self, x: DualElement) -> Coeff:
        return x.coefficient(UNIT)

    def counit_left(self, t: DualTensor) -> DualElement:
        """(eps (x) id)"""
        out: dict[DualMonomial, Coeff] = {}
        for (a, b), c in t.terms.items():
            if a.is_unit():
                accumulate(out, b, c)
        return DualElement(self, out)

    def counit_right(self, t: DualTensor) -> DualElement:
        """(id (x) eps)"""
        out: dict[DualMonomial, Coeff] = {}
        for (a, b), c in t.terms.items():
            if b.is_unit():
                accumulate(out, a, c)
        return DualElement(self, out)

    def coproduct_left(self, t: DualTensor) -> dict[TripleKey, Coeff]:
        """(phi_* (x) id)"""
        out: dict[TripleKey, Coeff] = {}
        for (a, b), c in t.terms.items():
            for (a1, a2), ca in self._mono_coproduct(a, None, None):
                accumulate(out, (a1, a2, b), c * ca)
        return {k: v for k, v in out.items() if v}

    def coproduct_right(self, t: DualTensor) -> dict[TripleKey, Coeff]:
        """(id (x) phi_*), the middle coefficients crossing into the first factor."""
        out: dict[TripleKey, Coeff] = {}
        for (a, b), c in t.terms.items():
            for (b1, b2), cb in self._mono_coproduct(b, None, None):
                for mx, cx in self.cross(cb):
                    for m, cm in self.mono_product(a, mx):
                        accumulate(out, (m, b1, b2), c * cx * cm)
        return {k: v for k, v in out.items() if v}

    # ---- bases ----
    @functools.lru_cache(maxsize=1 << 12)
    def basis(self, bd: Bidegree) -> tuple[DualMonomial, ...]:
        """Normal monomials of exactly bd, in (d, w, t0 t1 x1 t2 x2 ...) order."""
        d, w = bd.d, bd.w
        if d < 0 or w < 0 or d - 2 * w < 0:
            return ()
        p = self.prime
        gens: list[tuple[str, int, Bidegree]] = []
        i = 0
        while True:
            t_bd = tau_bidegree(p, i)
            x_bd = xi_bidegree(p, i)
            if i > 0 and x_bd.d > d:
                break
            if t_bd.d <= d:
                gens.append(("t", i, t_bd))
            if i > 0:
                gens.append(("x", i, x_bd))
            i += 1

        found: list[DualMonomial] = []

        def extend(k: int, rest: Bidegree, E: list[int], R: dict[int, int]) -> None:
            if rest.d == 0 and rest.w == 0:
                found.append(
                    DualMonomial.make(E, [R.get(j, 0) for j in range(1, max(R, default=0) + 1)])
                )
                return
            if k == len(gens) or rest.d < 0 or rest.w < 0:
                return
            kind, idx, g_bd = gens[k]
            top = 1 if kind == "t" else rest.d // g_bd.d
            for e in range(top, -1, -1):
                left = rest - g_bd.scale(e)
                if left.d < 0 or left.w < 0:
                    continue
                if kind == "t":
                    extend(k + 1, left, E + [idx] * e, R)
                else:
                    extend(k + 1, left, E, {**R, idx: e} if e else R)

        extend(0, bd, [], {})
        return tuple(sorted(found, key=lambda m: m.key(p)))

    def basis_upto(self, max_d: int) -> list[DualMonomial]:
        """All normal monomials of first degree at most max_d."""
        out: list[DualMonomial] = []
        for d in range(0, max_d + 1):
            for w in range(0, d // 2 + 1):
                out.extend(self.basis(Bidegree(d, w)))
        return out

    def fp_dimension(self, bd: Bidegree) -> int:
        """F_p-dimension of the bd graded piece, coefficient multiples included."""
        excess = bd.d - 2 * bd.w
        if excess < 0:
            return 0
        total = 0
        for a, b in coefficient_monomials_upto(excess, excess, self.mode):
            if 2 * a + b <= excess:
                total += len(self.basis(Bidegree(bd.d + b, bd.w + a + b)))
        logging.debug(f"fp_dimension{bd} = {total} at p={self.prime}")
        return total
