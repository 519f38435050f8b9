"""H^{*,*}(B mu_p) = F_p[tau, rho][u, v] / (u^2 relation), truncated at v^N.

The coaction lambda encodes every operation: theta(x) is the contraction of
lambda(x) against theta. Coefficients go through the right unit,
lambda(c * m) = eta_R(c) lambda(m); at p=2 this gives Q_0(tau) = rho.
"""
from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

from coeff import BaseMode, Bidegree, Coeff, Combination, ContractError, accumulate, term_str
from dual import UNIT, DualMonomial, DualSteenrod
from operations import OpElement

# (u exponent in {0, 1}, v exponent)
BmuMonomial = tuple[int, int]
LambdaKey = tuple[BmuMonomial, DualMonomial]


class TruncationError(Exception):
    pass


def bmu_bidegree(m: BmuMonomial) -> Bidegree:
    eps, n = m
    return Bidegree(eps + 2 * n, eps + n)


def bmu_name(m: BmuMonomial) -> str:
    eps, n = m
    parts = []
    if eps:
        parts.append("u")
    if n:
        parts.append("v" if n == 1 else f"v^{n}")
    return " ".join(parts) if parts else "1"


class BmuElement(Combination[BmuMonomial]):
    def __init__(
        self, module: BmuModule, terms: Optional[Mapping[BmuMonomial, Coeff]] = None
    ) -> None:
        super().__init__(module.prime, module.mode, terms)
        self.module = module

    def _like(self, terms: Mapping[BmuMonomial, Coeff]) -> BmuElement:
        return BmuElement(self.module, terms)

    def __mul__(self, other: Union[BmuElement, Coeff, int]) -> BmuElement:
        if isinstance(other, BmuElement):
            return self.module.mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Union[Coeff, int]) -> BmuElement:
        return self.scale(other)

    def bidegree(self) -> Optional[Bidegree]:
        degrees = {
            bmu_bidegree(m) + cbd
            for m, c in self.terms.items()
            for cbd in c.homogeneous_parts()
        }
        return degrees.pop() if len(degrees) == 1 else None

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        rows = []
        for m, c in self.terms.items():
            for cm in c.monomials():
                cbd = cm.bidegree()
                assert cbd is not None
                rows.append(((bmu_bidegree(m) + cbd, cm.sort_key(), m), term_str(cm, bmu_name(m))))
        rows.sort(key=lambda row: row[0])
        return " + ".join(text for _, text in rows)


class LambdaExpansion(Combination[LambdaKey]):
    """Elements of H(B mu_p) (x) A_{*,*}."""

    def __init__(
        self, module: BmuModule, terms: Optional[Mapping[LambdaKey, Coeff]] = None
    ) -> None:
        super().__init__(module.prime, module.mode, terms)
        self.module = module

    def _like(self, terms: Mapping[LambdaKey, Coeff]) -> LambdaExpansion:
        return LambdaExpansion(self.module, terms)

    def __mul__(self, other: LambdaExpansion) -> LambdaExpansion:
        return LambdaExpansion(
            self.module, self.module.lambda_product(self.terms, other.terms)
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        p = self.prime
        rows = []
        for (m, w), c in self.terms.items():
            for cm in c.monomials():
                rows.append(((cm.sort_key(), w.key(p), m), term_str(cm, f"{bmu_name(m)}(x){w}")))
        rows.sort(key=lambda row: row[0])
        return " + ".join(text for _, text in rows)


@dataclass
class RotturaIdentity:
    name: str
    lhs: BmuElement
    rhs: BmuElement

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


@dataclass
class RotturaReport:
    theta: str
    n: int
    identities: list[RotturaIdentity] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(i.holds for i in self.identities)

    def to_jsonable_dict(self) -> dict[str, object]:
        return {
            "theta": self.theta,
            "n": self.n,
            "ok": self.ok,
            "identities": [
                {"name": i.name, "lhs": str(i.lhs), "rhs": str(i.rhs), "holds": i.holds}
                for i in self.identities
            ],
        }

    def __str__(self) -> str:
        lines = [f"theta = {self.theta}, n = {self.n}"]
        for i in self.identities:
            mark = "ok" if i.holds else "FAILED"
            lines.append(f"  {i.name}: {i.lhs} | {i.rhs}  [{mark}]")
        return "\n".join(lines)


@dataclass(frozen=True)
class BmuModule:
    prime: int
    mode: BaseMode = BaseMode.GENERIC
    truncation: int = 16
    crossing: str = "twisted"
    dual: DualSteenrod = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.truncation < 0:
            raise ContractError("Truncation must be non-negative")
        object.__setattr__(self, "dual", DualSteenrod(self.prime, self.mode, self.crossing))

    # ---- constructors ----
    def element(self, terms: Optional[Mapping[BmuMonomial, Coeff]] = None) -> BmuElement:
        return BmuElement(self, terms)

    def monomial(self, eps: int, n: int, c: Optional[Coeff] = None) -> BmuElement:
        if n > self.truncation:
            raise TruncationError(f"v^{n} exceeds the truncation v^{self.truncation}")
        return BmuElement(self, {(eps, n): self.dual.one_coeff if c is None else c})

    def one(self) -> BmuElement:
        return self.monomial(0, 0)

    def u(self) -> BmuElement:
        return self.monomial(1, 0)

    def v(self) -> BmuElement:
        return self.monomial(0, 1)

    # ---- ring structure ----
    def _mono_product(self, m1: BmuMonomial, m2: BmuMonomial) -> list[tuple[BmuMonomial, Coeff]]:
        (e1, n1), (e2, n2) = m1, m2
        if e1 + e2 < 2:
            return [((e1 + e2, n1 + n2), self.dual.one_coeff)]
        if self.prime != 2:
            return []
        # u^2 = tau*v + rho*u
        return [
            ((0, n1 + n2 + 1), self.dual.coeff(1, 0)),
            ((1, n1 + n2), self.dual.coeff(0, 1)),
        ]

    def _checked(self, terms: dict[BmuMonomial, Coeff]) -> BmuElement:
        element = BmuElement(self, terms)
        for eps, n in element.terms:
            if n > self.truncation:
                raise TruncationError(
                    f"{bmu_name((eps, n))} exceeds the truncation v^{self.truncation}"
                )
        return element

    def mul(self, x: BmuElement, y: BmuElement) -> BmuElement:
        out: dict[BmuMonomial, Coeff] = {}
        for m1, c1 in x.terms.items():
            for m2, c2 in y.terms.items():
                for m, c in self._mono_product(m1, m2):
                    accumulate(out, m, c1 * c2 * c)
        return self._checked(out)

    def power(self, x: BmuElement, n: int) -> BmuElement:
        result = self.one()
        for _ in range(n):
            result = self.mul(result, x)
        return result

    # ---- coaction ----
    def lambda_product(
        self,
        s: Mapping[LambdaKey, Coeff],
        t: Mapping[LambdaKey, Coeff],
        v_bound: Optional[int] = None,
        d_bound: Optional[int] = None,
    ) -> dict[LambdaKey, Coeff]:
        """(m (x) a)(m' (x) a') = (-1)^{|a||m'|} mm' (x) aa'.

        Both the v exponent and the first degree of the dual monomial never
        decrease under products, so the bounds prune exactly.
        """
        p = self.prime
        dual = self.dual
        out: dict[LambdaKey, Coeff] = {}
        for (m1, a1), c1 in s.items():
            for (m2, a2), c2 in t.items():
                c = c1 * c2
                if p != 2 and a1.bidegree(p).d * bmu_bidegree(m2).d % 2:
                    c = -c
                for m, cm in self._mono_product(m1, m2):
                    if v_bound is not None and m[1] > v_bound:
                        continue
                    for a, ca in dual.mono_product(a1, a2):
                        if d_bound is not None and a.bidegree(p).d > d_bound:
                            continue
                        accumulate(out, (m, a), c * cm * ca)
        return {k: v for k, v in out.items() if v}

    def _generator_lambda(self, eps: int, v_bound: int) -> dict[LambdaKey, Coeff]:
        """lambda(u) = u (x) 1 + sum v^{p^i} (x) tau_i, lambda(v) = sum v^{p^i} (x) xi_i."""
        p = self.prime
        one = self.dual.one_coeff
        terms: dict[LambdaKey, Coeff] = {}
        if eps:
            terms[((1, 0), UNIT)] = one
        i = 0
        while p**i <= v_bound:
            gen = DualMonomial.tau(i) if eps else DualMonomial.xi(i)
            terms[((0, p**i), gen)] = one
            i += 1
        return terms

    @functools.lru_cache(maxsize=1 << 12)
    def _mono_lambda(
        self, m: BmuMonomial, v_bound: int, d_bound: Optional[int]
    ) -> tuple[tuple[LambdaKey, Coeff], ...]:
        eps, n = m
        terms: dict[LambdaKey, Coeff] = {((0, 0), UNIT): self.dual.one_coeff}
        if eps:
            generator = self._generator_lambda(1, v_bound)
            terms = self.lambda_product(terms, generator, v_bound, d_bound)
        v_terms = self._generator_lambda(0, v_bound)
        for _ in range(n):
            terms = self.lambda_product(terms, v_terms, v_bound, d_bound)
        return tuple(terms.items())

    def _coaction(
        self, x: BmuElement, v_bound: int, d_bound: Optional[int]
    ) -> dict[LambdaKey, Coeff]:
        p = self.prime
        dual = self.dual
        out: dict[LambdaKey, Coeff] = {}
        for m, c in x.terms.items():
            lam = self._mono_lambda(m, v_bound, d_bound)
            for omega, h in dual.cross(c):
                # (1 (x) omega)(m' (x) a) carries the sign (-1)^{|omega||m'|}
                for (mm, a), ca in lam:
                    sign = -1 if p != 2 and omega.bidegree(p).d * bmu_bidegree(mm).d % 2 else 1
                    for prod, cp in dual.mono_product(omega, a):
                        if d_bound is not None and prod.bidegree(p).d > d_bound:
                            continue
                        accumulate(out, (mm, prod), h * ca * cp * sign)
        return {k: v for k, v in out.items() if v}

    def coaction(self, x: BmuElement) -> LambdaExpansion:
        """lambda(x), truncated at v^N."""
        return LambdaExpansion(self, self._coaction(x, self.truncation, None))

    def act(self, theta: OpElement, x: BmuElement) -> BmuElement:
        """theta(x): contract lambda(x) against theta.

        Raises:
            TruncationError: if a nonzero term lands beyond v^N.
        """
        if theta.prime != self.prime or theta.mode is not self.mode:
            raise ContractError("Operation and module live over different rings")
        if not theta.terms or not x.terms:
            return self.element()
        d_bound = max(m.bidegree(self.prime).d for m in theta.terms)
        x_top = max(bmu_bidegree(m).d for m in x.terms)
        v_bound = (x_top + d_bound) // 2
        out: dict[BmuMonomial, Coeff] = {}
        for (m, omega), c in self._coaction(x, v_bound, d_bound).items():
            if omega in theta.terms:
                accumulate(out, m, c * theta.terms[omega])
        result = BmuElement(self, out)
        for eps, n in result.terms:
            if n > self.truncation:
                raise TruncationError(
                    f"{theta}({x}) has the term {bmu_name((eps, n))} beyond v^{self.truncation}"
                )
        return result

    def _cartan_terms(
        self, theta: OpElement, x: BmuElement, y: BmuElement
    ) -> Iterator[tuple[BmuElement, BmuElement]]:
        """Pairs (c rho_I(x), (-1)^{|I| |y_j|} y_j) over psi^*(theta) = sum c rho_I (x) rho_J,
        where y_j runs over the homogeneous terms of rho_J(y)."""
        p = self.prime
        steenrod = theta.alg
        for (I, J), c in steenrod.coproduct(theta).terms.items():
            left = self.act(steenrod.basis_element(I), x)
            if not left:
                continue
            right = self.act(steenrod.basis_element(J), y)
            for m, cm in right.terms.items():
                for cbd, part in cm.homogeneous_parts().items():
                    term = BmuElement(self, {m: part})
                    if p != 2 and I.bidegree(p).d * (bmu_bidegree(m).d + cbd.d) % 2:
                        term = -term
                    yield left.scale(c), term

    def cartan_action(self, theta: OpElement, x: BmuElement, y: BmuElement) -> BmuElement:
        """theta(xy) through the Cartan formula for psi^*(theta)."""
        total = self.element()
        for left, term in self._cartan_terms(theta, x, y):
            total = total + self.mul(left, term)
        return total

    def product_action(
        self, outer: OpElement, inner: OpElement, x: BmuElement, y: BmuElement
    ) -> BmuElement:
        """(outer inner)(xy) through psi^*(inner) and then psi^*(outer).

        Agrees with cartan_action(outer * inner, x, y) whenever psi^* is
        multiplicative on the pair; no product of operation tensors is formed,
        so this holds up with a twisted right unit as well.
        """
        total = self.element()
        for left, term in self._cartan_terms(inner, x, y):
            total = total + self.cartan_action(outer, left, term)
        return total

    # ---- p-power identities ----
    def verify_rottura(self, theta: OpElement, n: int) -> RotturaReport:
        """Compare theta on u^{p^n} and v^{p^n} with the closed p-power sums."""
        p = self.prime
        q = p**n
        if q > self.truncation:
            raise TruncationError(f"p^n = {q} exceeds the truncation v^{self.truncation}")
        dual = self.dual
        steenrod = theta.alg
        report = RotturaReport(str(theta), n)
        d_top = max((m.bidegree(p).d for m in theta.terms), default=0)

        def v_power(k: int, c: Coeff) -> BmuElement:
            if not c:
                return self.element()
            return self.monomial(0, k, c)

        u_q = self.power(self.u(), q)
        rhs_u = u_q.scale(steenrod.pair(dual.one(), theta))
        rhs_v = self.element()
        i = 0
        while 2 * p**i - 2 <= d_top:
            rhs_u = rhs_u + v_power(p ** (i + n), steenrod.pair(dual.power(dual.tau(i), q), theta))
            rhs_v = rhs_v + v_power(p ** (i + n), steenrod.pair(dual.power(dual.xi(i), q), theta))
            i += 1
        report.identities.append(
            RotturaIdentity(f"theta(u^{q})", self.act(theta, u_q), rhs_u)
        )
        report.identities.append(
            RotturaIdentity(f"theta(v^{q})", self.act(theta, self.power(self.v(), q)), rhs_v)
        )
        logging.debug(f"rottura for {theta} at n={n}: {'ok' if report.ok else 'FAILED'}")
        return report
