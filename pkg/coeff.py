from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Generic, Hashable, Iterator, Mapping, Optional, TypeVar, Union

# (tau exponent, rho exponent)
Monomial = tuple[int, int]


class ContractError(Exception):
    pass


@dataclass(frozen=True, order=True)
class Bidegree:
    """First (cohomological) degree and weight."""

    d: int
    w: int

    def __add__(self, other: Bidegree) -> Bidegree:
        return Bidegree(self.d + other.d, self.w + other.w)

    def __sub__(self, other: Bidegree) -> Bidegree:
        return Bidegree(self.d - other.d, self.w - other.w)

    def __neg__(self) -> Bidegree:
        return Bidegree(-self.d, -self.w)

    def scale(self, n: int) -> Bidegree:
        return Bidegree(n * self.d, n * self.w)

    def fits(self, bound: Optional[Bidegree]) -> bool:
        """Componentwise comparison against an optional upper bound."""
        return bound is None or (self.d <= bound.d and self.w <= bound.w)

    def __str__(self) -> str:
        return f"({self.d},{self.w})"


ORIGIN = Bidegree(0, 0)


class BaseMode(Enum):
    """Specialization of the coefficients: rho0 sets rho = 0, char2 sets tau = rho = 0."""

    GENERIC = "generic"
    RHO_ZERO = "rho0"
    CHAR2 = "char2"

    @classmethod
    def from_str(cls, name: str) -> BaseMode:
        aliases = {"rho-zero": "rho0", "char2-tau-zero": "char2", "tau-rho-zero": "char2"}
        try:
            return cls(aliases.get(name, name))
        except ValueError:
            raise ContractError(
                f"Unknown base mode {name!r}, expected one of generic, rho0, char2"
            )

    def allows(self, a: int, b: int) -> bool:
        """Whether tau^a rho^b survives the specialization."""
        if self is BaseMode.RHO_ZERO:
            return b == 0
        if self is BaseMode.CHAR2:
            # -1 = 1 in characteristic 2, so rho dies together with tau.
            return a == 0 and b == 0
        return True


def monomial_bidegree(mono: Monomial) -> Bidegree:
    a, b = mono
    return Bidegree(b, a + b)


def coefficient_monomial(bd: Bidegree, mode: BaseMode) -> Optional[Monomial]:
    """The unique monomial tau^a rho^b of bidegree bd, if the mode keeps it."""
    b = bd.d
    a = bd.w - bd.d
    if a < 0 or b < 0 or not mode.allows(a, b):
        return None
    return (a, b)


def coefficient_monomials_upto(max_d: int, max_w: int, mode: BaseMode) -> Iterator[Monomial]:
    """All monomials tau^a rho^b with b <= max_d and a + b <= max_w."""
    for b in range(0, max(max_d, -1) + 1):
        for a in range(0, max_w - b + 1):
            if mode.allows(a, b):
                yield (a, b)


class Coeff:
    """Element of F_p[tau, rho] in canonical sparse form."""

    __slots__ = ("prime", "mode", "terms", "_hash")

    def __init__(
        self,
        prime: int,
        mode: BaseMode,
        terms: Optional[Mapping[Monomial, int]] = None,
    ) -> None:
        self.prime = prime
        self.mode = mode
        clean: dict[Monomial, int] = {}
        if terms:
            for mono, c in terms.items():
                c %= prime
                if c and mode.allows(*mono):
                    clean[mono] = c
        self.terms = clean
        self._hash: Optional[int] = None

    # ---- constructors ----
    @classmethod
    def zero(cls, prime: int, mode: BaseMode) -> Coeff:
        return cls(prime, mode)

    @classmethod
    def constant(cls, prime: int, mode: BaseMode, c: int) -> Coeff:
        return cls(prime, mode, {(0, 0): c})

    @classmethod
    def one(cls, prime: int, mode: BaseMode) -> Coeff:
        return cls(prime, mode, {(0, 0): 1})

    @classmethod
    def monomial(cls, prime: int, mode: BaseMode, a: int, b: int, c: int = 1) -> Coeff:
        return cls(prime, mode, {(a, b): c})

    @classmethod
    def tau(cls, prime: int, mode: BaseMode) -> Coeff:
        return cls.monomial(prime, mode, 1, 0)

    @classmethod
    def rho(cls, prime: int, mode: BaseMode) -> Coeff:
        return cls.monomial(prime, mode, 0, 1)

    def _like(self, terms: Mapping[Monomial, int]) -> Coeff:
        return Coeff(self.prime, self.mode, terms)

    def _check(self, other: Coeff) -> None:
        if other.prime != self.prime or other.mode is not self.mode:
            raise ContractError(
                f"Coefficient rings differ: p={self.prime}/{self.mode.value} "
                f"vs p={other.prime}/{other.mode.value}"
            )

    def _coerce(self, other: Union[Coeff, int]) -> Coeff:
        if isinstance(other, Coeff):
            self._check(other)
            return other
        return Coeff.constant(self.prime, self.mode, other)

    # ---- arithmetic ----
    def __add__(self, other: Union[Coeff, int]) -> Coeff:
        o = self._coerce(other)
        terms = dict(self.terms)
        for mono, c in o.terms.items():
            terms[mono] = terms.get(mono, 0) + c
        return self._like(terms)

    __radd__ = __add__

    def __neg__(self) -> Coeff:
        return self._like({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Union[Coeff, int]) -> Coeff:
        return self + (-self._coerce(other))

    def __mul__(self, other: Union[Coeff, int]) -> Coeff:
        if not isinstance(other, Coeff):
            return self._like({m: c * other for m, c in self.terms.items()})
        self._check(other)
        terms: dict[Monomial, int] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                terms[key] = terms.get(key, 0) + c1 * c2
        return self._like(terms)

    def __rmul__(self, other: int) -> Coeff:
        return self * other

    def __pow__(self, n: int) -> Coeff:
        if n < 0:
            raise ContractError("Negative powers do not exist in F_p[tau, rho]")
        result = Coeff.one(self.prime, self.mode)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exquo(self, divisor: Coeff) -> Coeff:
        """Exact division, by long division in the lexicographic order tau > rho.

        Raises:
            ArithmeticError: if divisor does not divide self.
        """
        self._check(divisor)
        if divisor.is_zero():
            raise ArithmeticError("Division by zero coefficient")
        lead = max(divisor.terms)
        inv = pow(divisor.terms[lead], -1, self.prime)
        remainder = self
        quotient: dict[Monomial, int] = {}
        while not remainder.is_zero():
            top = max(remainder.terms)
            if top[0] < lead[0] or top[1] < lead[1]:
                raise ArithmeticError(f"{divisor} does not divide {self}")
            q_mono = (top[0] - lead[0], top[1] - lead[1])
            q_c = remainder.terms[top] * inv % self.prime
            quotient[q_mono] = q_c
            remainder = remainder - divisor * self._like({q_mono: q_c})
        return self._like(quotient)

    # ---- inspection ----
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_one(self) -> bool:
        return self.terms == {(0, 0): 1}

    def bidegree(self) -> Optional[Bidegree]:
        """(b, a+b) for homogeneous nonzero input, None otherwise."""
        degrees = {monomial_bidegree(m) for m in self.terms}
        if len(degrees) != 1:
            return None
        return degrees.pop()

    def homogeneous_parts(self) -> dict[Bidegree, Coeff]:
        parts: dict[Bidegree, dict[Monomial, int]] = {}
        for mono, c in self.terms.items():
            parts.setdefault(monomial_bidegree(mono), {})[mono] = c
        return {bd: self._like(t) for bd, t in parts.items()}

    def monomials(self) -> Iterator[Coeff]:
        """Single-term summands in ascending bidegree order."""
        for mono in sorted(self.terms, key=monomial_bidegree):
            yield self._like({mono: self.terms[mono]})

    def sort_key(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (bd.d, bd.w) for bd in sorted(monomial_bidegree(m) for m in self.terms)
        )

    def evaluate(self, tau: int, rho: int) -> int:
        """Specialize tau and rho to residues in F_p."""
        total = 0
        for (a, b), c in self.terms.items():
            total += c * pow(tau, a, self.prime) * pow(rho, b, self.prime)
        return total % self.prime

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self == Coeff.constant(self.prime, self.mode, other)
        if not isinstance(other, Coeff):
            return NotImplemented
        return (
            self.prime == other.prime
            and self.mode is other.mode
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.prime, self.mode, frozenset(self.terms.items())))
        return self._hash

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            _monomial_str(mono, self.terms[mono])
            for mono in sorted(self.terms, key=monomial_bidegree)
        )

    def __repr__(self) -> str:
        return f"Coeff(p={self.prime}, {self.mode.value}, {self})"


def _monomial_str(mono: Monomial, c: int) -> str:
    a, b = mono
    parts = []
    if c != 1 or (a == 0 and b == 0):
        parts.append(str(c))
    if a:
        parts.append("tau" if a == 1 else f"tau^{a}")
    if b:
        parts.append("rho" if b == 1 else f"rho^{b}")
    return "*".join(parts)


def coeff_mul(a: Coeff, b: Coeff) -> Coeff:
    return a * b


def coeff_bidegree(a: Coeff) -> Optional[Bidegree]:
    return a.bidegree()


K = TypeVar("K", bound=Hashable)
C = TypeVar("C", bound="Combination[Any]")


class Combination(Generic[K]):
    """Finite F_p[tau, rho]-linear combination of hashable basis keys.

    Coefficients sit on the far left of each key; zero coefficients are never
    stored.
    """

    def __init__(
        self, prime: int, mode: BaseMode, terms: Optional[Mapping[K, Coeff]] = None
    ) -> None:
        self.prime = prime
        self.mode = mode
        self.terms: dict[K, Coeff] = {k: c for k, c in (terms or {}).items() if c}
        self._hash: Optional[int] = None

    def _like(self: C, terms: Mapping[Any, Coeff]) -> C:
        raise NotImplementedError

    def _check(self, other: Combination[Any]) -> None:
        if type(other) is not type(self):
            raise ContractError(
                f"Cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        if other.prime != self.prime or other.mode is not self.mode:
            raise ContractError(
                f"Ground rings differ: p={self.prime}/{self.mode.value} "
                f"vs p={other.prime}/{other.mode.value}"
            )

    def zero_coeff(self) -> Coeff:
        return Coeff.zero(self.prime, self.mode)

    def one_coeff(self) -> Coeff:
        return Coeff.one(self.prime, self.mode)

    def __add__(self: C, other: C) -> C:
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return self._like(terms)

    def __neg__(self: C) -> C:
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self: C, other: C) -> C:
        return self + (-other)

    def scale(self: C, c: Union[Coeff, int]) -> C:
        """Multiply every coefficient on the left by c."""
        if isinstance(c, Coeff) and (c.prime != self.prime or c.mode is not self.mode):
            raise ContractError("Scalar from a different coefficient ring")
        return self._like({k: v * c for k, v in self.terms.items()})

    def coefficient(self, key: K) -> Coeff:
        return self.terms.get(key, self.zero_coeff())

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Combination):
            return NotImplemented
        return (
            type(other) is type(self)
            and self.prime == other.prime
            and self.mode is other.mode
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"


def accumulate(out: dict[K, Coeff], key: K, c: Coeff) -> None:
    """out[key] += c, creating the entry on first use."""
    if key in out:
        out[key] = out[key] + c
    else:
        out[key] = c


def term_str(c: Coeff, name: str) -> str:
    """Print a coefficient monomial in front of a basis name."""
    if name == "1":
        return str(c)
    if c.is_one():
        return name
    return f"{c}*{name}"
