"""The motivic Steenrod algebra A^{*,*} in the Milnor basis.

A basis operation is named by the dual monomial it pairs to 1 with; products
and the Cartan coproduct are obtained by dualizing dual.DualSteenrod. An
operation c * theta has bidegree deg(theta) + deg(c).
"""
from __future__ import annotations

import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

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
from dual import UNIT, DualElement, DualMonomial, DualSteenrod, TensorKey

CARTAN_KINDS = ("P", "Sq-even", "Sq-odd", "beta")


class WindowError(Exception):
    pass


def default_max_d(prime: int) -> int:
    return 40 if prime == 2 else 60


def basis_name(m: DualMonomial) -> str:
    """Canonical name of the Milnor basis operation dual to m."""
    if m.is_unit():
        return "1"
    if not m.R:
        if len(m.E) == 1:
            return f"Q{m.E[0]}"
        return "QE{" + ",".join(map(str, m.E)) + "}"
    if not m.E:
        if len(m.R) == 1:
            return f"P{m.R[0]}"
        if m.R[-1] == 1 and not any(m.R[:-1]):
            return f"q{len(m.R)}"
    return "[" + ",".join(map(str, m.E)) + "|" + ",".join(map(str, m.R)) + "]"


class OpElement(Combination[DualMonomial]):
    def __init__(
        self, alg: MotivicSteenrod, terms: Optional[Mapping[DualMonomial, Coeff]] = None
    ) -> None:
        super().__init__(alg.prime, alg.mode, terms)
        self.alg = alg

    def _like(self, terms: Mapping[DualMonomial, Coeff]) -> OpElement:
        return OpElement(self.alg, terms)

    def __mul__(self, other: Union[OpElement, Coeff, int]) -> OpElement:
        if isinstance(other, OpElement):
            return self.alg.mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Union[Coeff, int]) -> OpElement:
        return self.scale(other)

    def __pow__(self, n: int) -> OpElement:
        result = self.alg.one()
        for _ in range(n):
            result = self.alg.mul(result, self)
        return result

    def homogeneous_parts(self) -> dict[Bidegree, OpElement]:
        parts: dict[Bidegree, dict[DualMonomial, Coeff]] = {}
        for mono, c in self.terms.items():
            for cbd, part in c.homogeneous_parts().items():
                parts.setdefault(mono.bidegree(self.prime) + cbd, {})[mono] = part
        return {bd: self._like(t) for bd, t in parts.items()}

    def bidegree(self) -> Optional[Bidegree]:
        parts = self.homogeneous_parts()
        return next(iter(parts)) if len(parts) == 1 else None

    def max_bidegree(self) -> Bidegree:
        """Componentwise maximum over the supporting basis monomials."""
        degrees = [m.bidegree(self.prime) for m in self.terms]
        return Bidegree(max(bd.d for bd in degrees), max(bd.w for bd in degrees))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        p = self.prime
        rows = []
        for mono, c in self.terms.items():
            mbd = mono.bidegree(p)
            for cm in c.monomials():
                cbd = cm.bidegree()
                assert cbd is not None
                key = (mbd + cbd, cm.sort_key(), mono.key(p))
                rows.append((key, term_str(cm, basis_name(mono))))
        rows.sort(key=lambda row: row[0])
        return " + ".join(text for _, text in rows)


class OpTensor(Combination[TensorKey]):
    """Elements of A^{*,*} (x) A^{*,*}; terms print as left(x)right."""

    def __init__(
        self, alg: MotivicSteenrod, terms: Optional[Mapping[TensorKey, Coeff]] = None
    ) -> None:
        super().__init__(alg.prime, alg.mode, terms)
        self.alg = alg

    def _like(self, terms: Mapping[TensorKey, Coeff]) -> OpTensor:
        return OpTensor(self.alg, terms)

    def __mul__(self, other: OpTensor) -> OpTensor:
        """Componentwise composition with the Koszul sign.

        Only defined while coefficients are central, i.e. when the right unit
        is the identity.
        """
        if self.alg.dual.twisted:
            raise ContractError(
                "Products of operation tensors need central coefficients; "
                "use rho0 mode, an odd prime or the action on H(Bmu_p)"
            )
        alg = self.alg
        out: dict[TensorKey, Coeff] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                c = c1 * c2
                if alg.prime != 2 and alg.first_degree(b1) * alg.first_degree(a2) % 2:
                    c = -c
                left = alg.mul(alg.basis_element(a1), alg.basis_element(a2))
                right = alg.mul(alg.basis_element(b1), alg.basis_element(b2))
                for ml, cl in left.terms.items():
                    for mr, cr in right.terms.items():
                        accumulate(out, (ml, mr), c * cl * cr)
        return OpTensor(alg, out)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        p = self.prime
        rows = []
        for (left, right), c in self.terms.items():
            for cm in c.monomials():
                text = f"{basis_name(left)}(x){basis_name(right)}"
                rows.append(((cm.sort_key(), right.key(p), left.key(p)), term_str(cm, text)))
        rows.sort(key=lambda row: row[0])
        return " + ".join(text for _, text in rows)


@dataclass(frozen=True)
class MotivicSteenrod:
    """A^{*,*} restricted to the window of first degrees <= max_d.

    A product a*b is the composite a after b.
    """

    prime: int
    mode: BaseMode = BaseMode.GENERIC
    max_d: int = -1
    crossing: str = "twisted"
    dual: DualSteenrod = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "dual", DualSteenrod(self.prime, self.mode, self.crossing))
        if self.max_d < 0:
            object.__setattr__(self, "max_d", default_max_d(self.prime))

    def with_window(self, max_d: int) -> MotivicSteenrod:
        return MotivicSteenrod(self.prime, self.mode, max(max_d, self.max_d), self.crossing)

    def check_window(self, bd: Bidegree, what: str) -> None:
        if bd.d > self.max_d:
            raise WindowError(
                f"{what} lands in first degree {bd.d}, outside the window d <= {self.max_d}"
            )

    def first_degree(self, m: DualMonomial) -> int:
        return m.bidegree(self.prime).d

    # ---- constructors ----
    def element(self, terms: Optional[Mapping[DualMonomial, Coeff]] = None) -> OpElement:
        return OpElement(self, terms)

    def zero(self) -> OpElement:
        return OpElement(self)

    def basis_element(self, m: DualMonomial, c: Optional[Coeff] = None) -> OpElement:
        return OpElement(self, {m: self.dual.one_coeff if c is None else c})

    def one(self) -> OpElement:
        return self.basis_element(UNIT)

    def from_coeff(self, c: Coeff) -> OpElement:
        return OpElement(self, {UNIT: c})

    def milnor(self, E: Iterable[int] = (), R: Iterable[int] = ()) -> OpElement:
        return self.basis_element(DualMonomial.make(E, R))

    def milnor_primitive(self, t: int) -> OpElement:
        """Q_t, dual to tau_t."""
        return self.milnor((t,))

    def q_class(self, E: Iterable[int]) -> OpElement:
        return self.milnor(E)

    def beta(self) -> OpElement:
        return self.milnor_primitive(0)

    def reduced_power(self, i: int) -> OpElement:
        """P^i, dual to xi_1^i."""
        return self.milnor((), (i,))

    def q(self, t: int) -> OpElement:
        """(0,...,0,1), dual to xi_t."""
        if t == 0:
            return self.one()
        return self.basis_element(DualMonomial.xi(t))

    def steenrod_square(self, n: int) -> OpElement:
        if self.prime != 2:
            raise ContractError("Steenrod squares exist only at p=2")
        if n % 2 == 0:
            return self.reduced_power(n // 2)
        return self.milnor((0,), (n // 2,))

    def named(self, k: int) -> OpElement:
        """M_k = P^{p^{k-1}} ... P^p P^1, computed as a composite."""
        result = self.one()
        for j in range(k):
            result = self.mul(self.reduced_power(self.prime**j), result)
        return result

    # ---- pairing and products ----
    def pair(self, x: DualElement, theta: OpElement) -> Coeff:
        total = self.dual.zero_coeff
        for m, c in x.terms.items():
            if m in theta.terms:
                total = total + c * theta.terms[m]
        return total

    def mul(self, a: OpElement, b: OpElement) -> OpElement:
        out: dict[DualMonomial, Coeff] = {}
        for pa in a.homogeneous_parts().values():
            for pb in b.homogeneous_parts().values():
                for m, c in self._mul_homogeneous(pa, pb).items():
                    accumulate(out, m, c)
        return OpElement(self, out)

    def _mul_homogeneous(self, a: OpElement, b: OpElement) -> dict[DualMonomial, Coeff]:
        """<x, a*b> = sum c <w' * eta_R(<w'', b>), a> over c w' (x) w'' in phi_*(x)."""
        da, db = a.bidegree(), b.bidegree()
        assert da is not None and db is not None
        target = da + db
        self.check_window(target, f"The product ({a})*({b})")
        lbound = a.max_bidegree()
        rbound = b.max_bidegree()
        dual = self.dual
        out: dict[DualMonomial, Coeff] = {}
        for alpha, beta in coefficient_monomials_upto(target.d, target.w, self.mode):
            bd = Bidegree(target.d - beta, target.w - alpha - beta)
            for omega in dual.basis(bd):
                value = dual.zero_coeff
                split = dual.coproduct(dual.monomial(omega), lbound, rbound)
                for (left, right), c in split.terms.items():
                    if right not in b.terms:
                        continue
                    for mx, cx in dual.cross(b.terms[right]):
                        for m, cm in dual.mono_product(left, mx):
                            if m in a.terms:
                                value = value + c * cx * cm * a.terms[m]
                if value:
                    assert value.bidegree() == Bidegree(beta, alpha + beta), (
                        f"inhomogeneous product coefficient {value} at {omega}"
                    )
                    out[omega] = value
        return out

    def commutator(self, t: int) -> OpElement:
        """q_t Q_0 - Q_0 q_t, which equals Q_t at every prime."""
        q_t, q0 = self.q(t), self.beta()
        return self.mul(q_t, q0) - self.mul(q0, q_t)

    # ---- Cartan coproduct ----
    @functools.lru_cache(maxsize=1 << 14)
    def _basis_coproduct(self, K: DualMonomial) -> tuple[tuple[TensorKey, Coeff], ...]:
        dual = self.dual
        target = K.bidegree(self.prime)
        out: dict[TensorKey, Coeff] = {}
        for alpha, beta in coefficient_monomials_upto(target.d, target.w, self.mode):
            total = Bidegree(target.d - beta, target.w - alpha - beta)
            for d1 in range(total.d + 1):
                for w1 in range(total.w + 1):
                    first = Bidegree(d1, w1)
                    second = total - first
                    right_basis = dual.basis(second)
                    if not right_basis:
                        continue
                    for I in dual.basis(first):
                        for J in right_basis:
                            for m, c in dual.mono_product(I, J):
                                if m == K:
                                    out[(I, J)] = c
        logging.debug(f"psi^* of {basis_name(K)} has {len(out)} terms")
        return tuple(out.items())

    def coproduct(self, theta: OpElement) -> OpTensor:
        """psi^*(rho_K) = sum over I, J of coeff_K(w_I w_J) rho_I (x) rho_J."""
        out: dict[TensorKey, Coeff] = {}
        for K, c in theta.terms.items():
            self.check_window(K.bidegree(self.prime), f"The coproduct of {basis_name(K)}")
            for key, v in self._basis_coproduct(K):
                accumulate(out, key, c * v)
        return OpTensor(self, out)

    def tensor(self, terms: Iterable[tuple[OpElement, OpElement, Coeff]]) -> OpTensor:
        out: dict[TensorKey, Coeff] = {}
        for left, right, c in terms:
            for ml, cl in left.terms.items():
                for mr, cr in right.terms.items():
                    accumulate(out, (ml, mr), c * cl * cr)
        return OpTensor(self, out)

    def cartan_closed_form(self, i: int, kind: str) -> OpTensor:
        """Closed Cartan formula; for Sq-even and Sq-odd, i names Sq^{2i} and Sq^{2i+1}."""
        if kind not in CARTAN_KINDS:
            raise ContractError(f"Unknown Cartan kind {kind!r}")
        one = self.dual.one_coeff
        if kind == "beta":
            b = self.beta()
            return self.tensor([(b, self.one(), one), (self.one(), b, one)])
        if self.prime != 2:
            if kind != "P":
                raise ContractError(f"{kind} formulas exist only at p=2")
            P = self.reduced_power
            return self.tensor((P(r), P(i - r), one) for r in range(i + 1))

        Sq = self.steenrod_square
        tau = self.dual.coeff(1, 0)
        rho = self.dual.coeff(0, 1)
        odd_pairs = [(Sq(2 * s + 1), Sq(2 * i - 2 * s - 1)) for s in range(i)]
        if kind in ("P", "Sq-even"):
            terms = [(Sq(2 * r), Sq(2 * i - 2 * r), one) for r in range(i + 1)]
            terms += [(x, y, tau) for x, y in odd_pairs]
        else:
            terms = [(Sq(r), Sq(2 * i + 1 - r), one) for r in range(2 * i + 2)]
            terms += [(x, y, rho) for x, y in odd_pairs]
        return self.tensor(terms)

    def q_coproduct_closed_form(self, t: int) -> OpTensor:
        """Q_t (x) 1 + 1 (x) Q_t + sum_h rho^h sum Q_I (x) Q_J.

        I and J cover {t-h, ..., t-1} and meet exactly in {t-h}; the rho terms
        exist only at p=2.
        """
        one = self.dual.one_coeff
        Q = self.milnor_primitive(t)
        terms = [(Q, self.one(), one), (self.one(), Q, one)]
        if self.prime == 2:
            for h in range(1, t + 1):
                rest = list(range(t - h + 1, t))
                for choice in itertools.product((0, 1), repeat=len(rest)):
                    I = [t - h] + [k for k, side in zip(rest, choice) if side == 0]
                    J = [t - h] + [k for k, side in zip(rest, choice) if side == 1]
                    terms.append((self.q_class(I), self.q_class(J), self.dual.coeff(0, h)))
        return self.tensor(terms)
