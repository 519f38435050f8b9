"""Recursive descent parser for coefficients, dual elements, operations and
classes of B mu_p.

    expr   := term ('+' term)*
    term   := factor ('*'? factor)*
    factor := atom ('^' INT)?
    atom   := INT | 'tau' | 'rho'                      (every kind)
            | 't' INT | 'x' INT                        (dual)
            | 'Q' INT | 'QE' '{' ints '}' | 'P' INT
            | 'Sq' INT | 'b' | 'q' INT | '[' ints? '|' ints? ']'   (op)
            | 'u' | 'v'                                (bmu)

Juxtaposition is the product of the kind, read left to right; for operations
"A B" is the composite A after B. Leading coefficient factors scale the term
from the left.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

from bmu import BmuElement, BmuModule
from coeff import BaseMode, Coeff, ContractError
from dual import DualElement, DualMonomial, DualSteenrod
from operations import MotivicSteenrod, OpElement

KINDS = ("coeff", "dual", "op", "bmu")

Element = Union[Coeff, DualElement, OpElement, BmuElement]

_TOKEN = re.compile(
    r"\s*(?:(?P<INT>\d+)|(?P<WORD>tau|rho|Sq|QE|Q|P|b|q|t|x|u|v)|(?P<SYM>[\^*+{},\[\]|]))"
)
_TRAILING = re.compile(r"\s*")

_COEFF_ATOMS = ("INT", "'tau'", "'rho'")
_KIND_ATOMS = {
    "coeff": _COEFF_ATOMS,
    "dual": _COEFF_ATOMS + ("'t'", "'x'"),
    "op": _COEFF_ATOMS + ("'Q'", "'QE'", "'P'", "'Sq'", "'b'", "'q'", "'['"),
    "bmu": _COEFF_ATOMS + ("'u'", "'v'"),
}


class ParseError(Exception):
    def __init__(self, message: str, offset: int, expected: Iterable[str]) -> None:
        self.message = message
        self.offset = offset
        self.expected = frozenset(expected)
        super().__init__(
            f"{message} at byte {offset} (expected one of: {', '.join(sorted(self.expected))})"
        )


@dataclass(frozen=True)
class Token:
    kind: str  # INT, WORD, SYM or EOF
    text: str
    offset: int

    def describe(self) -> str:
        return "end of input" if self.kind == "EOF" else repr(self.text)


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while True:
        match = _TOKEN.match(src, pos)
        if match is None:
            pos = _TRAILING.match(src, pos).end()  # type: ignore[union-attr]
            if pos == len(src):
                break
            raise ParseError(
                f"Unexpected character {src[pos]!r}",
                len(src[:pos].encode()),
                ("INT", "word", "symbol"),
            )
        group = match.lastgroup
        assert group is not None
        start = match.start(group)
        tokens.append(Token(group, match.group(group), len(src[:start].encode())))
        pos = match.end()
    tokens.append(Token("EOF", "", len(src.encode())))
    return tokens


class Parser:
    """One parse of one expression of a fixed kind.

    `lift` embeds a coefficient into the target kind, `mul` is the product of
    the kind and `atom` builds the kind's own generators.
    """

    def __init__(
        self,
        src: str,
        kind: str,
        prime: int,
        mode: BaseMode,
        lift: Callable[[Coeff], Element],
        mul: Callable[[Element, Element], Element],
        atom: Optional[Callable[[Parser, Token], Element]] = None,
    ) -> None:
        self.tokens = tokenize(src)
        self.pos = 0
        self.kind = kind
        self.prime = prime
        self.mode = mode
        self.lift = lift
        self.mul = mul
        self.atom = atom

    # ---- token helpers ----
    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(
        self, message: str, expected: Iterable[str], tok: Optional[Token] = None
    ) -> ParseError:
        tok = tok or self.current
        return ParseError(message, tok.offset, expected)

    def expect_sym(self, sym: str) -> Token:
        if self.current.kind == "SYM" and self.current.text == sym:
            return self.advance()
        raise self.fail(f"Unexpected {self.current.describe()}", (f"'{sym}'",))

    def expect_int(self) -> int:
        if self.current.kind == "INT":
            return int(self.advance().text)
        raise self.fail(f"Unexpected {self.current.describe()}", ("INT",))

    def int_list(self, closers: tuple[str, ...]) -> list[int]:
        values: list[int] = []
        if self.current.kind == "SYM" and self.current.text in closers:
            return values
        values.append(self.expect_int())
        while self.current.kind == "SYM" and self.current.text == ",":
            self.advance()
            values.append(self.expect_int())
        return values

    def starts_atom(self) -> bool:
        tok = self.current
        return tok.kind in ("INT", "WORD") or (tok.kind == "SYM" and tok.text == "[")

    # ---- grammar ----
    def parse(self) -> Element:
        result = self.term()
        while self.current.kind == "SYM" and self.current.text == "+":
            self.advance()
            result = result + self.term()  # type: ignore[operator]
        if self.current.kind != "EOF":
            raise self.fail(
                f"Unexpected {self.current.describe()}",
                ("'+'", "'*'", "'^'", "end of input") + _KIND_ATOMS[self.kind],
            )
        return result

    def term(self) -> Element:
        scalar = Coeff.one(self.prime, self.mode)
        acc: Optional[Element] = None
        first = True
        while True:
            if not first:
                if self.current.kind == "SYM" and self.current.text == "*":
                    self.advance()
                elif not self.starts_atom():
                    break
            if not self.starts_atom():
                raise self.fail(f"Unexpected {self.current.describe()}", _KIND_ATOMS[self.kind])
            factor = self.factor()
            first = False
            if isinstance(factor, Coeff) and acc is None:
                scalar = scalar * factor
            elif acc is None:
                acc = factor
            else:
                acc = self.mul(acc, self.lift(factor) if isinstance(factor, Coeff) else factor)
        if acc is None:
            return self.lift(scalar)
        if isinstance(acc, Coeff):
            return acc * scalar
        return acc.scale(scalar)

    def factor(self) -> Element:
        base = self.primary()
        if self.current.kind == "SYM" and self.current.text == "^":
            self.advance()
            n = self.expect_int()
            if isinstance(base, Coeff):
                return base**n
            result = self.lift(Coeff.one(self.prime, self.mode))
            for _ in range(n):
                result = self.mul(result, base)
            return result
        return base

    def primary(self) -> Element:
        tok = self.current
        if tok.kind == "INT":
            self.advance()
            return Coeff.constant(self.prime, self.mode, int(tok.text))
        if tok.kind == "WORD" and tok.text == "tau":
            self.advance()
            return Coeff.tau(self.prime, self.mode)
        if tok.kind == "WORD" and tok.text == "rho":
            self.advance()
            return Coeff.rho(self.prime, self.mode)
        if self.atom is not None and f"'{tok.text}'" in _KIND_ATOMS[self.kind]:
            return self.atom(self, tok)
        raise self.fail(f"Unexpected {tok.describe()}", _KIND_ATOMS[self.kind])


def _dual_atom(alg: DualSteenrod) -> Callable[[Parser, Token], Element]:
    def atom(parser: Parser, tok: Token) -> Element:
        parser.advance()
        index_tok = parser.current
        i = parser.expect_int()
        if tok.text == "t":
            return alg.tau(i)
        if i == 0:
            raise parser.fail("xi_0 is the unit, write 1", ("positive INT",), index_tok)
        return alg.xi(i)

    return atom


def _op_atom(alg: MotivicSteenrod) -> Callable[[Parser, Token], Element]:
    def atom(parser: Parser, tok: Token) -> Element:
        parser.advance()
        name = tok.text
        if name == "b":
            return alg.beta()
        if name == "QE":
            parser.expect_sym("{")
            E = parser.int_list(("}",))
            parser.expect_sym("}")
            return _milnor(parser, alg, E, (), tok)
        if name == "[":
            E = parser.int_list(("|",))
            parser.expect_sym("|")
            R = parser.int_list(("]",))
            parser.expect_sym("]")
            return _milnor(parser, alg, E, R, tok)
        n = parser.expect_int()
        if name == "Q":
            return alg.milnor_primitive(n)
        if name == "P":
            return alg.reduced_power(n)
        if name == "q":
            return alg.q(n)
        if alg.prime != 2:
            raise parser.fail(
                "Sq is only defined at p=2, use P and b", _KIND_ATOMS["op"][:-1], tok
            )
        return alg.steenrod_square(n)

    return atom


def _milnor(
    parser: Parser, alg: MotivicSteenrod, E: list[int], R: Iterable[int], tok: Token
) -> OpElement:
    try:
        return alg.basis_element(DualMonomial.make(E, R))
    except ContractError as e:
        raise parser.fail(str(e), ("distinct INTs",), tok) from e


def _bmu_atom(module: BmuModule) -> Callable[[Parser, Token], Element]:
    def atom(parser: Parser, tok: Token) -> Element:
        parser.advance()
        return module.u() if tok.text == "u" else module.v()

    return atom


def parse_coeff(src: str, prime: int, mode: BaseMode = BaseMode.GENERIC) -> Coeff:
    parser = Parser(
        src,
        "coeff",
        prime,
        mode,
        lift=lambda c: c,
        mul=lambda a, b: a * b,  # type: ignore[operator]
    )
    result = parser.parse()
    assert isinstance(result, Coeff)
    return result


def parse_dual(src: str, alg: DualSteenrod) -> DualElement:
    parser = Parser(
        src,
        "dual",
        alg.prime,
        alg.mode,
        lift=alg.from_coeff,
        mul=alg.mul,  # type: ignore[arg-type]
        atom=_dual_atom(alg),
    )
    result = parser.parse()
    assert isinstance(result, DualElement)
    return result


def parse_op(src: str, alg: MotivicSteenrod) -> OpElement:
    parser = Parser(
        src,
        "op",
        alg.prime,
        alg.mode,
        lift=alg.from_coeff,
        mul=alg.mul,  # type: ignore[arg-type]
        atom=_op_atom(alg),
    )
    result = parser.parse()
    assert isinstance(result, OpElement)
    return result


def parse_bmu(src: str, module: BmuModule) -> BmuElement:
    parser = Parser(
        src,
        "bmu",
        module.prime,
        module.mode,
        lift=lambda c: module.one().scale(c),
        mul=module.mul,  # type: ignore[arg-type]
        atom=_bmu_atom(module),
    )
    result = parser.parse()
    assert isinstance(result, BmuElement)
    return result


def parse_element(
    src: str,
    kind: str,
    prime: int = 2,
    mode: BaseMode = BaseMode.GENERIC,
    max_d: int = -1,
    truncation: int = 16,
    crossing: str = "twisted",
) -> Element:
    """Parse src as an element of the given kind over F_p[tau, rho]."""
    if kind == "coeff":
        return parse_coeff(src, prime, mode)
    if kind == "dual":
        return parse_dual(src, DualSteenrod(prime, mode, crossing))
    if kind == "op":
        return parse_op(src, MotivicSteenrod(prime, mode, max_d, crossing))
    if kind == "bmu":
        return parse_bmu(src, BmuModule(prime, mode, truncation, crossing))
    raise ValueError(f"Unknown element kind {kind}; choose from {', '.join(KINDS)}")
