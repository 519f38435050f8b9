"""Invariant suites behind `motsteen verify`.

Every check is a top-level function (ctx, arg) -> Optional[str] returning a
counterexample or None, so jobs pickle into a multiprocessing pool. Sampled
arguments are drawn up front from the seed, which keeps reports
reproducible for any number of cores.

The dual suite covers every pair and triple of the window through rows led
by a generator (see check_splitting); direct samples run alongside. A check
that leaves the window or the v^N truncation counts as skipped, never as
passed.
"""
from __future__ import annotations

import bisect
import functools
import logging
import random
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Any, Callable, Iterator, Optional

from bmu import BmuElement, BmuModule, BmuMonomial, TruncationError
from coeff import BaseMode, Bidegree, Coeff, accumulate
from dual import DualMonomial, DualSteenrod, Word, tau_bidegree, xi_bidegree
from margolis import (
    ModuleError,
    ModulePresentation,
    direct_sum,
    export_bmu,
    homology_at,
    margolis_homology,
    q_bidegree,
)
from operations import MotivicSteenrod, WindowError, basis_name

SUITE_NAMES = ("dual", "op", "bmu", "margolis")

# tau^a rho^b exponents a1 + a2 checked for multiplicativity of eta_R
RIGHT_UNIT_DEPTH = 8
# degree of a plus degree of b in the action test of psi^*(a b)
ACTION_WINDOW = 20
ROTTURA_WINDOW = 30
DIRECT_SUM_PAIRS = 50

Job = tuple[str, str, Any]


@dataclass(frozen=True)
class VerifyContext:
    prime: int
    mode: BaseMode
    max_d: int
    truncation: int
    crossing: str = "twisted"
    samples: int = 25
    seed: int = 0
    # largest t with Q_t^2 checked; the square is taken outside the window if needed
    q_top: int = 4


STATUSES = ("passed", "failed", "skipped")


@dataclass
class CheckResult:
    suite: str
    check: str
    arg: str
    # one of STATUSES; skipped checks left the window or the truncation
    status: str
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "passed"

    def to_jsonable_dict(self) -> dict[str, str]:
        return {"suite": self.suite, "check": self.check, "arg": self.arg, "detail": self.detail}


@dataclass
class VerifyReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """No check failed. Skipped checks are reported but do not fail the run."""
        return self.first_failure is None

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next((r for r in self.results if r.status == "failed"), None)

    @property
    def skipped(self) -> list[CheckResult]:
        return [r for r in self.results if r.status == "skipped"]

    def summary(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for r in self.results:
            entry = out.setdefault(r.suite, dict.fromkeys(STATUSES, 0))
            entry[r.status] += 1
        return out

    def to_jsonable_dict(self) -> dict[str, Any]:
        failure = self.first_failure
        skipped = self.skipped
        return {
            "ok": self.ok,
            "suites": self.summary(),
            "checks": len(self.results),
            "skipped": len(skipped),
            "first_failure": None if failure is None else failure.to_jsonable_dict(),
            "first_skipped": skipped[0].to_jsonable_dict() if skipped else None,
        }

    def __str__(self) -> str:
        lines = []
        for suite, c in self.summary().items():
            lines.append(
                f"{suite}: {c['passed']} passed, {c['failed']} failed, {c['skipped']} skipped"
            )
        failure = self.first_failure
        skipped = self.skipped
        if failure is not None:
            lines.append(
                f"first counterexample: {failure.suite}/{failure.check} "
                f"{failure.arg}: {failure.detail}"
            )
        elif skipped:
            first = skipped[0]
            lines.append(
                f"no failures, but {len(skipped)} checks did not run; first: "
                f"{first.suite}/{first.check} {first.arg}: {first.detail}"
            )
        else:
            lines.append("all checks passed")
        return "\n".join(lines)


def module_truncation(ctx: VerifyContext) -> int:
    """Truncation of the Bmu_p module used by the checks.

    Inputs are powers up to v^N with N = ctx.truncation and operations reach
    first degree max_d, so v^{N + max_d/2 + 1} holds every value a check can
    produce.
    """
    return ctx.truncation + ctx.max_d // 2 + 1


@functools.lru_cache(maxsize=16)
def algebras(ctx: VerifyContext) -> tuple[DualSteenrod, MotivicSteenrod, BmuModule]:
    steenrod = MotivicSteenrod(ctx.prime, ctx.mode, ctx.max_d, ctx.crossing)
    module = BmuModule(ctx.prime, ctx.mode, module_truncation(ctx), ctx.crossing)
    return steenrod.dual, steenrod, module


@functools.lru_cache(maxsize=16)
def window(ctx: VerifyContext) -> tuple[tuple[DualMonomial, ...], tuple[int, ...]]:
    """Dual basis up to max_d in ascending first degree, with those degrees."""
    basis = tuple(algebras(ctx)[0].basis_upto(ctx.max_d))
    return basis, tuple(m.bidegree(ctx.prime).d for m in basis)


def upto(ctx: VerifyContext, d: int) -> tuple[DualMonomial, ...]:
    basis, degrees = window(ctx)
    return basis[: bisect.bisect_right(degrees, d)]


def generators(ctx: VerifyContext) -> list[DualMonomial]:
    p, D = ctx.prime, ctx.max_d
    gens = []
    i = 0
    while tau_bidegree(p, i).d <= D:
        gens.append(DualMonomial.tau(i))
        if i > 0:
            gens.append(DualMonomial.xi(i))
        i += 1
    if xi_bidegree(p, i).d <= D:
        gens.append(DualMonomial.xi(i))
    return gens


def _differs(what: str, lhs: object, rhs: object) -> Optional[str]:
    return None if lhs == rhs else f"{what}: {lhs} != {rhs}"


# ---- dual suite ----
def check_relation(ctx: VerifyContext, i: int) -> Optional[str]:
    dual, _, _ = algebras(ctx)
    lhs = dual.tau(i) * dual.tau(i)
    if ctx.prime == 2:
        tau, rho = dual.coeff(1, 0), dual.coeff(0, 1)
        rhs = (
            dual.xi(i + 1).scale(tau)
            + dual.tau(i + 1).scale(rho)
            + (dual.tau(0) * dual.xi(i + 1)).scale(rho)
        )
    else:
        rhs = dual.zero()
    return _differs(f"t{i}^2", lhs, rhs)


def _random_rewrite(
    dual: DualSteenrod, word: Word, rng: random.Random
) -> dict[DualMonomial, Coeff]:
    """p=2 rewriting that resolves tau squares in random order."""
    taus: dict[int, int] = {}
    xis: dict[int, int] = {}
    for kind, i, e in word:
        if kind == "t":
            taus[i] = taus.get(i, 0) + e
        elif i > 0:
            xis[i] = xis.get(i, 0) + e
    # t_i^2 -> tau x_{i+1} + rho t_{i+1} + rho t_0 x_{i+1}, as (coefficient, new tau, new xi)
    replacements = (((1, 0), None, True), ((0, 1), "next", False), ((0, 1), "zero", True))
    out: dict[DualMonomial, Coeff] = {}
    stack = [(taus, xis, dual.one_coeff)]
    while stack:
        t, x, c = stack.pop(rng.randrange(len(stack)))
        squares = [i for i, e in t.items() if e >= 2]
        if not squares:
            E = [i for i, e in t.items() if e]
            R = [x.get(j, 0) for j in range(1, max(x, default=0) + 1)]
            accumulate(out, DualMonomial.make(E, R), c)
            continue
        i = rng.choice(squares)
        for (a, b), new_tau, new_xi in replacements:
            nc = c * dual.coeff(a, b)
            if not nc:
                continue
            nt, nx = dict(t), dict(x)
            nt[i] -= 2
            if new_tau is not None:
                k = i + 1 if new_tau == "next" else 0
                nt[k] = nt.get(k, 0) + 1
            if new_xi:
                nx[i + 1] = nx.get(i + 1, 0) + 1
            stack.append((nt, nx, nc))
    return {m: c for m, c in out.items() if c}


def check_confluence(
    ctx: VerifyContext, arg: tuple[tuple[tuple[str, int, int], ...], int]
) -> Optional[str]:
    word, seed = arg
    dual, _, _ = algebras(ctx)
    rng = random.Random(seed)
    normal = dual.normalize(word)
    if ctx.prime == 2:
        other = dual.element(_random_rewrite(dual, word, rng))
        return _differs(f"rewriting {word} in random order", normal, other)
    # odd p: permuting the factors changes the sign by the parity of the tau transpositions
    order = list(range(len(word)))
    rng.shuffle(order)
    shuffled = [word[k] for k in order]
    taus = [k for k in order if word[k][0] == "t" and word[k][2] % 2]
    inversions = sum(
        1 for a in range(len(taus)) for b in range(a + 1, len(taus)) if taus[a] > taus[b]
    )
    other = dual.normalize(shuffled).scale(-1 if inversions % 2 else 1)
    return _differs(f"reordering {word}", normal, other)


def check_coassociativity(ctx: VerifyContext, m: DualMonomial) -> Optional[str]:
    dual, _, _ = algebras(ctx)
    delta = dual.coproduct(dual.monomial(m))
    if dual.coproduct_left(delta) != dual.coproduct_right(delta):
        return f"(phi (x) 1) phi != (1 (x) phi) phi on {m}"
    return None


def check_counit(ctx: VerifyContext, m: DualMonomial) -> Optional[str]:
    dual, _, _ = algebras(ctx)
    x = dual.monomial(m)
    delta = dual.coproduct(x)
    return _differs(f"(eps (x) 1) phi({m})", dual.counit_left(delta), x) or _differs(
        f"(1 (x) eps) phi({m})", dual.counit_right(delta), x
    )


def check_multiplicativity(
    ctx: VerifyContext, arg: tuple[DualMonomial, DualMonomial]
) -> Optional[str]:
    dual, _, _ = algebras(ctx)
    x, y = dual.monomial(arg[0]), dual.monomial(arg[1])
    return _differs(
        f"phi({arg[0]} * {arg[1]})", dual.coproduct(x * y), dual.coproduct(x) * dual.coproduct(y)
    )


def check_commutativity(
    ctx: VerifyContext, arg: tuple[DualMonomial, DualMonomial]
) -> Optional[str]:
    dual, _, _ = algebras(ctx)
    x, y = arg
    sign = -1 if ctx.prime != 2 and x.bidegree(ctx.prime).d * y.bidegree(ctx.prime).d % 2 else 1
    return _differs(
        f"{x} * {y}",
        dual.monomial(x) * dual.monomial(y),
        (dual.monomial(y) * dual.monomial(x)).scale(sign),
    )


def check_associativity(ctx: VerifyContext, arg: tuple[DualMonomial, ...]) -> Optional[str]:
    dual, _, _ = algebras(ctx)
    x, y, z = (dual.monomial(m) for m in arg)
    return _differs(f"({arg[0]} * {arg[1]}) * {arg[2]}", (x * y) * z, x * (y * z))


# Rows led by a generator. With x = g x' the normal form of every monomial,
# induction on the number of generators of x carries an identity from the
# rows below to every pair (x, y) and triple (x, y, z) in the window:
#   (xy)z = (g(x'y))z = g((x'y)z) = g(x'(yz)) = x(yz)
#   phi(x)phi(y) = phi(g)(phi(x')phi(y)) = phi(g)phi(x'y) = phi(xy)
#   xy = g(x'y) = +-g(yx') = +-(gy)x' = +-y(gx') = +-yx
# The product of tensors is associative once the dual product is and eta_R
# is multiplicative, which the splitting and right-unit checks cover.
def check_splitting(ctx: VerifyContext, m: DualMonomial) -> Optional[str]:
    dual, _, _ = algebras(ctx)
    g, rest = m.split_first()
    return _differs(f"{g} * {rest}", dual.monomial(g) * dual.monomial(rest), dual.monomial(m))


def check_right_unit(ctx: VerifyContext, arg: tuple[int, int]) -> Optional[str]:
    dual, _, _ = algebras(ctx)
    a1, a2 = arg
    c1, c2 = dual.coeff(a1, 0), dual.coeff(a2, 1)
    return _differs(
        f"eta_R(tau^{a1} * tau^{a2} rho)",
        dual.eta_right(c1 * c2),
        dual.eta_right(c1) * dual.eta_right(c2),
    )


def _row(
    ctx: VerifyContext, y: DualMonomial, check: Callable[[DualMonomial], Optional[str]]
) -> Optional[str]:
    budget = ctx.max_d - _d(ctx, y)
    for g in generators(ctx):
        if _d(ctx, g) <= budget:
            failure = check(g)
            if failure is not None:
                return failure
    return None


def check_generator_multiplicativity(ctx: VerifyContext, y: DualMonomial) -> Optional[str]:
    return _row(ctx, y, lambda g: check_multiplicativity(ctx, (g, y)))


def check_generator_commutativity(ctx: VerifyContext, y: DualMonomial) -> Optional[str]:
    return _row(ctx, y, lambda g: check_commutativity(ctx, (g, y)))


def check_generator_associativity(ctx: VerifyContext, y: DualMonomial) -> Optional[str]:
    """(g y) z = g (y z) for every generator g and every z that fits."""
    dual, _, _ = algebras(ctx)
    Y = dual.monomial(y)

    def against(g: DualMonomial) -> Optional[str]:
        G = dual.monomial(g)
        GY = G * Y
        for z in upto(ctx, ctx.max_d - _d(ctx, g) - _d(ctx, y)):
            Z = dual.monomial(z)
            if GY * Z != G * (Y * Z):
                return f"({g} * {y}) * {z}: {GY * Z} != {G * (Y * Z)}"
        return None

    return _row(ctx, y, against)


# ---- op suite ----
def check_pairing(ctx: VerifyContext, bd: Bidegree) -> Optional[str]:
    dual, steenrod, _ = algebras(ctx)
    for I in dual.basis(bd):
        for J in dual.basis(bd):
            value = steenrod.pair(dual.monomial(I), steenrod.basis_element(J))
            if value != (1 if I == J else 0):
                return f"<{I}, {basis_name(J)}> = {value}"
    return None


def check_unit(ctx: VerifyContext, m: DualMonomial) -> Optional[str]:
    _, steenrod, _ = algebras(ctx)
    theta = steenrod.basis_element(m)
    P0 = steenrod.reduced_power(0)
    return _differs(f"P0 {basis_name(m)}", P0 * theta, theta) or _differs(
        f"{basis_name(m)} P0", theta * P0, theta
    )


def check_op_associativity(ctx: VerifyContext, arg: tuple[DualMonomial, ...]) -> Optional[str]:
    _, steenrod, _ = algebras(ctx)
    a, b, c = (steenrod.basis_element(m) for m in arg)
    names = " ".join(basis_name(m) for m in arg)
    return _differs(f"associativity of {names}", (a * b) * c, a * (b * c))


def check_q_suite(ctx: VerifyContext, t: int) -> Optional[str]:
    """Q_t^2 = 0, and for t <= 3 the closed psi^*(Q_t) and q_t Q_0 - Q_0 q_t = Q_t.

    The window is widened to 2|Q_t| so the square is formed even past max_d.
    """
    _, steenrod, _ = algebras(ctx)
    wide = steenrod.with_window(2 * q_bidegree(ctx.prime, t).d)
    Q = wide.milnor_primitive(t)
    failure = _differs(f"Q{t} Q{t}", Q * Q, wide.zero())
    if failure is not None or t > 3:
        return failure
    return _differs(
        f"psi(Q{t})", wide.coproduct(Q), wide.q_coproduct_closed_form(t)
    ) or (None if t == 0 else _differs(f"q{t} Q0 - Q0 q{t}", wide.commutator(t), Q))


def check_cartan(ctx: VerifyContext, arg: tuple[str, int]) -> Optional[str]:
    _, steenrod, _ = algebras(ctx)
    kind, i = arg
    if kind == "beta":
        theta = steenrod.beta()
    elif kind == "P":
        theta = steenrod.reduced_power(i)
    elif kind == "Sq-even":
        theta = steenrod.steenrod_square(2 * i)
    else:
        theta = steenrod.steenrod_square(2 * i + 1)
    return _differs(
        f"closed Cartan formula of {theta}",
        steenrod.coproduct(theta),
        steenrod.cartan_closed_form(i, kind),
    )


def check_coproduct_multiplicative(
    ctx: VerifyContext, arg: tuple[DualMonomial, DualMonomial]
) -> Optional[str]:
    _, steenrod, _ = algebras(ctx)
    a, b = (steenrod.basis_element(m) for m in arg)
    return _differs(
        f"psi({a} {b})", steenrod.coproduct(a * b), steenrod.coproduct(a) * steenrod.coproduct(b)
    )


# ---- bmu suite ----
def check_rottura(ctx: VerifyContext, arg: tuple[DualMonomial, int]) -> Optional[str]:
    _, steenrod, module = algebras(ctx)
    m, n = arg
    report = module.verify_rottura(steenrod.basis_element(m), n)
    failed = next((i for i in report.identities if not i.holds), None)
    return None if failed is None else f"{failed.name}: {failed.lhs} != {failed.rhs}"


def check_named(ctx: VerifyContext, k: int) -> Optional[str]:
    _, steenrod, module = algebras(ctx)
    M = steenrod.named(k)
    expected = module.monomial(0, ctx.prime**k)
    beta_u = module.act(steenrod.beta(), module.u())
    return _differs(f"M{k}(v)", module.act(M, module.v()), expected) or _differs(
        f"M{k} b(u)", module.act(M, beta_u), expected
    )


def _bmu(module: BmuModule, mono: tuple[int, int]) -> BmuElement:
    return module.monomial(*mono)


def check_cartan_action(
    ctx: VerifyContext, arg: tuple[DualMonomial, BmuMonomial, BmuMonomial]
) -> Optional[str]:
    _, steenrod, module = algebras(ctx)
    m, xm, ym = arg
    theta = steenrod.basis_element(m)
    x, y = _bmu(module, xm), _bmu(module, ym)
    lhs = module.act(theta, x * y)
    rhs = module.cartan_action(theta, x, y)
    return _differs(f"{basis_name(m)}(({x}) ({y}))", lhs, rhs)


def check_linearity(
    ctx: VerifyContext, arg: tuple[DualMonomial, BmuMonomial, BmuMonomial, int]
) -> Optional[str]:
    _, steenrod, module = algebras(ctx)
    m, xm, ym, c = arg
    theta = steenrod.basis_element(m)
    x, y = _bmu(module, xm), _bmu(module, ym)
    lhs = module.act(theta, x + y.scale(c))
    rhs = module.act(theta, x) + module.act(theta, y).scale(c)
    return _differs(f"{basis_name(m)}({x} + {c} {y})", lhs, rhs)


def check_equivariance(ctx: VerifyContext, m: DualMonomial) -> Optional[str]:
    """theta(u^2) computed through the relation and through the Cartan formula."""
    _, steenrod, module = algebras(ctx)
    theta = steenrod.basis_element(m)
    u = module.u()
    lhs = module.act(theta, u * u)
    rhs = module.cartan_action(theta, u, u)
    return _differs(f"{basis_name(m)}(u^2)", lhs, rhs)


def check_coproduct_action(
    ctx: VerifyContext, arg: tuple[DualMonomial, DualMonomial, BmuMonomial, BmuMonomial]
) -> Optional[str]:
    """psi^*(a b) against psi^*(a) psi^*(b), both read through the action on x y."""
    _, steenrod, module = algebras(ctx)
    ma, mb, xm, ym = arg
    a, b = steenrod.basis_element(ma), steenrod.basis_element(mb)
    x, y = _bmu(module, xm), _bmu(module, ym)
    return _differs(
        f"psi({basis_name(ma)} {basis_name(mb)}) on ({x}) ({y})",
        module.cartan_action(a * b, x, y),
        module.product_action(a, b, x, y),
    )


# ---- margolis suite ----
def _coefficient_bidegrees(mode: BaseMode, depth: int) -> list[tuple[Bidegree, tuple[int, int]]]:
    out = []
    for total in range(depth + 1):
        for b in range(total + 1):
            a = total - b
            if mode.allows(a, b):
                out.append((Bidegree(b, a + b), (a, b)))
    return out


def random_module(
    prime: int,
    mode: BaseMode,
    t: int,
    rng: random.Random,
    free: int,
    trivial: int,
    tag: str = "",
    unit: bool = False,
) -> ModulePresentation:
    """A module of pairs x -> c*y and trivial singletons, with Q_t^2 = 0.

    With unit=True every c is a nonzero constant and the pairs are free over
    the exterior algebra on Q_t.
    """
    q = q_bidegree(prime, t)
    basis: list[tuple[str, Bidegree]] = []
    edges: list[tuple[int, int, Coeff]] = []
    shifts = _coefficient_bidegrees(mode, 0 if unit else 2)
    for k in range(free):
        src = Bidegree(rng.randrange(0, 4), 0)
        src = Bidegree(src.d, rng.randrange(0, src.d + 1))
        cbd, (a, b) = rng.choice(shifts)
        c = Coeff.monomial(prime, mode, a, b, rng.randrange(1, prime))
        basis.append((f"x{k}{tag}", src))
        basis.append((f"y{k}{tag}", src + q - cbd))
        edges.append((len(basis) - 1, len(basis) - 2, c))
    for k in range(trivial):
        d = rng.randrange(0, 4)
        basis.append((f"z{k}{tag}", Bidegree(d, rng.randrange(0, d + 1))))
    zero = Coeff.zero(prime, mode)
    A = [[zero] * len(basis) for _ in basis]
    for row, col, c in edges:
        A[row][col] = c
    module = ModulePresentation(prime, mode, basis, {t: A})
    module.validate()
    return module


def check_free_vanishes(ctx: VerifyContext, arg: tuple[int, int]) -> Optional[str]:
    t, rank = arg
    module = random_module(
        ctx.prime, ctx.mode, t, random.Random(ctx.seed + rank), rank, 0, unit=True
    )
    report = margolis_homology(module, t, coefficient_depth=2)
    bad = next((p for p in report.pieces if p.hm and not p.flagged), None)
    return None if bad is None else f"HM of a free module is {bad.hm} at {bad.bidegree}"


def check_trivial(ctx: VerifyContext, rank: int) -> Optional[str]:
    module = random_module(ctx.prime, ctx.mode, 0, random.Random(ctx.seed + rank), 0, rank)
    report = margolis_homology(module, 0, coefficient_depth=1)
    bad = next((p for p in report.pieces if p.hm != p.dim), None)
    return None if bad is None else f"HM {bad.hm} != dim {bad.dim} at {bad.bidegree}"


def check_direct_sum(ctx: VerifyContext, seed: int) -> Optional[str]:
    rng = random.Random(seed)
    t = rng.randrange(0, 2)
    m1 = random_module(ctx.prime, ctx.mode, t, rng, rng.randrange(0, 3), rng.randrange(0, 3), "a")
    m2 = random_module(ctx.prime, ctx.mode, t, rng, rng.randrange(0, 3), rng.randrange(0, 3), "b")
    total = margolis_homology(direct_sum(m1, m2), t, coefficient_depth=1)
    bidegrees = [p.bidegree for p in total.pieces]
    parts = zip(total.pieces, homology_at(m1, t, bidegrees), homology_at(m2, t, bidegrees))
    for whole, p1, p2 in parts:
        if whole.hm != p1.hm + p2.hm:
            return (
                f"HM of the sum is {whole.hm} at {whole.bidegree}, "
                f"summands give {p1.hm} + {p2.hm}"
            )
    return None


def check_rejects_nonzero_square(ctx: VerifyContext, t: int) -> Optional[str]:
    q = q_bidegree(ctx.prime, t)
    one = Coeff.one(ctx.prime, ctx.mode)
    zero = Coeff.zero(ctx.prime, ctx.mode)
    basis = [("x", Bidegree(0, 0)), ("y", q), ("z", q + q)]
    A = [[zero, zero, zero], [one, zero, zero], [zero, one, zero]]
    try:
        ModulePresentation(ctx.prime, ctx.mode, basis, {t: A}).validate()
    except ModuleError:
        return None
    return f"x -> y -> z under Q{t} was accepted"


def check_bmu_oracle(ctx: VerifyContext, t: int) -> Optional[str]:
    try:
        module = export_bmu(4, t, ctx.prime, ctx.mode, ctx.crossing)
    except (ModuleError, WindowError) as e:
        return f"export failed: {e}"
    report = margolis_homology(module, t)
    if max(report.specialized_ranks.values()) != report.generic_rank:
        return (
            f"generic rank {report.generic_rank} vs specialized ranks "
            f"{report.specialized_ranks}"
        )
    if any(r > report.generic_rank for r in report.specialized_ranks.values()):
        return f"a specialization exceeds the generic rank {report.generic_rank}"
    return None


CHECKS: dict[str, Callable[[VerifyContext, Any], Optional[str]]] = {
    "relation": check_relation,
    "confluence": check_confluence,
    "coassociativity": check_coassociativity,
    "counit": check_counit,
    "multiplicativity": check_multiplicativity,
    "commutativity": check_commutativity,
    "associativity": check_associativity,
    "splitting": check_splitting,
    "right-unit": check_right_unit,
    "generator-multiplicativity": check_generator_multiplicativity,
    "generator-commutativity": check_generator_commutativity,
    "generator-associativity": check_generator_associativity,
    "pairing": check_pairing,
    "unit": check_unit,
    "op-associativity": check_op_associativity,
    "q-suite": check_q_suite,
    "cartan": check_cartan,
    "coproduct-multiplicative": check_coproduct_multiplicative,
    "coproduct-action": check_coproduct_action,
    "rottura": check_rottura,
    "named": check_named,
    "cartan-action": check_cartan_action,
    "linearity": check_linearity,
    "equivariance": check_equivariance,
    "free-vanishes": check_free_vanishes,
    "trivial": check_trivial,
    "direct-sum": check_direct_sum,
    "rejects-nonzero-square": check_rejects_nonzero_square,
    "bmu-oracle": check_bmu_oracle,
}


# ---- job generation ----
def _d(ctx: VerifyContext, m: DualMonomial) -> int:
    return m.bidegree(ctx.prime).d


def _sample(
    rng: random.Random, pool: list[DualMonomial], k: int, ctx: VerifyContext, budget: int
) -> Optional[tuple[DualMonomial, ...]]:
    for _ in range(20):
        pick = tuple(rng.choice(pool) for _ in range(k))
        if sum(_d(ctx, m) for m in pick) <= budget:
            return pick
    return None


def _samples(
    rng: random.Random, pool: list[DualMonomial], k: int, ctx: VerifyContext, budget: int
) -> Iterator[tuple[DualMonomial, ...]]:
    if not pool:
        return
    for _ in range(ctx.samples):
        pick = _sample(rng, pool, k, ctx, budget)
        if pick is not None:
            yield pick


def dual_jobs(ctx: VerifyContext, rng: random.Random) -> list[Job]:
    dual, _, _ = algebras(ctx)
    p, D = ctx.prime, ctx.max_d
    basis = dual.basis_upto(D)
    jobs: list[Job] = []
    i = 0
    while 2 * tau_bidegree(p, i).d <= D:
        jobs.append(("dual", "relation", i))
        jobs.append(("dual", "multiplicativity", (DualMonomial.tau(i), DualMonomial.tau(i))))
        i += 1
    # the relation needs no window
    jobs += [("dual", "relation", k) for k in range(i, 4)]
    gens = [DualMonomial.tau(i) for i in range(8) if tau_bidegree(p, i).d <= D]
    gens += [DualMonomial.xi(j) for j in range(1, 8) if xi_bidegree(p, j).d <= D]
    for _ in range(ctx.samples):
        word: list[tuple[str, int, int]] = []
        d = 0
        while gens:
            g = rng.choice(gens)
            gd = _d(ctx, g)
            if d + gd > D:
                break
            word.extend(g.word())
            d += gd
        if word:
            jobs.append(("dual", "confluence", (tuple(word), rng.randrange(1 << 30))))
    jobs += [("dual", "coassociativity", m) for m in basis]
    jobs += [("dual", "counit", m) for m in basis]
    jobs += [("dual", "splitting", m) for m in basis if not m.is_unit()]
    if dual.twisted:
        top = min(D, RIGHT_UNIT_DEPTH)
        jobs += [
            ("dual", "right-unit", (a1, a2))
            for a1 in range(top + 1)
            for a2 in range(top + 1 - a1)
        ]
    for check in ("multiplicativity", "commutativity", "associativity"):
        jobs += [("dual", f"generator-{check}", m) for m in basis]
    # direct samples cross-check the generator rows
    jobs += [("dual", "multiplicativity", pick) for pick in _samples(rng, basis, 2, ctx, D)]
    jobs += [("dual", "commutativity", pick) for pick in _samples(rng, basis, 2, ctx, D)]
    jobs += [("dual", "associativity", pick) for pick in _samples(rng, basis, 3, ctx, D)]
    return jobs


def op_jobs(ctx: VerifyContext, rng: random.Random) -> list[Job]:
    dual, _, _ = algebras(ctx)
    p, D = ctx.prime, ctx.max_d
    basis = dual.basis_upto(D)
    jobs: list[Job] = []
    bidegrees = sorted({m.bidegree(p) for m in basis})
    jobs += [("op", "pairing", bd) for bd in bidegrees]
    jobs += [("op", "unit", m) for m in basis]
    jobs += [("op", "op-associativity", pick) for pick in _samples(rng, basis, 3, ctx, D)]
    jobs += [("op", "q-suite", t) for t in range(ctx.q_top + 1)]
    if D >= 1:
        jobs.append(("op", "cartan", ("beta", 0)))
    for i in range(9):
        if 2 * i * (p - 1) <= D:
            jobs.append(("op", "cartan", ("P", i)))
        if p == 2 and 2 * i + 1 <= D:
            jobs.append(("op", "cartan", ("Sq-odd", i)))
    if not dual.twisted:
        jobs += [
            ("op", "coproduct-multiplicative", pick) for pick in _samples(rng, basis, 2, ctx, D)
        ]
    top = min(D, ACTION_WINDOW)
    for pick in _samples(rng, dual.basis_upto(top), 2, ctx, top):
        pair = (_bmu_monomials(rng, ctx), _bmu_monomials(rng, ctx))
        jobs.append(("op", "coproduct-action", (*pick, *pair)))
    return jobs


def _bmu_monomials(rng: random.Random, ctx: VerifyContext) -> BmuMonomial:
    return (rng.randrange(0, 2), rng.randrange(0, max(1, ctx.truncation // 4) + 1))


def bmu_jobs(ctx: VerifyContext, rng: random.Random) -> list[Job]:
    dual, _, _ = algebras(ctx)
    p, D = ctx.prime, ctx.max_d
    basis = dual.basis_upto(min(D, ROTTURA_WINDOW))
    jobs: list[Job] = []
    n = 0
    while p**n <= ctx.truncation:
        jobs += [("bmu", "rottura", (m, n)) for m in basis]
        n += 1
    k = 1
    while p**k <= ctx.truncation and 2 * (p**k - 1) <= D:
        jobs.append(("bmu", "named", k))
        k += 1
    if basis:
        for _ in range(ctx.samples):
            m = rng.choice(basis)
            pair = (_bmu_monomials(rng, ctx), _bmu_monomials(rng, ctx))
            jobs.append(("bmu", "cartan-action", (m, *pair)))
            jobs.append(
                (
                    "bmu",
                    "linearity",
                    (m, _bmu_monomials(rng, ctx), _bmu_monomials(rng, ctx), rng.randrange(1, p)),
                )
            )
    jobs += [("bmu", "equivariance", m) for m in basis]
    return jobs


def margolis_jobs(ctx: VerifyContext, rng: random.Random) -> list[Job]:
    jobs: list[Job] = []
    for t in (0, 1):
        jobs += [("margolis", "free-vanishes", (t, rank)) for rank in range(1, 5)]
        jobs.append(("margolis", "rejects-nonzero-square", t))
        jobs.append(("margolis", "bmu-oracle", t))
    jobs += [("margolis", "trivial", rank) for rank in range(1, 5)]
    jobs += [
        ("margolis", "direct-sum", rng.randrange(1 << 30))
        for _ in range(max(ctx.samples, DIRECT_SUM_PAIRS))
    ]
    return jobs


SUITES: dict[str, Callable[[VerifyContext, random.Random], list[Job]]] = {
    "dual": dual_jobs,
    "op": op_jobs,
    "bmu": bmu_jobs,
    "margolis": margolis_jobs,
}


def _describe(arg: Any) -> str:
    if isinstance(arg, DualMonomial):
        return str(arg)
    if isinstance(arg, tuple):
        return "(" + ", ".join(_describe(a) for a in arg) + ")"
    return str(arg)


def run_job(ctx: VerifyContext, job: Job) -> CheckResult:
    suite, name, arg = job
    try:
        detail = CHECKS[name](ctx, arg)
        status = "passed" if detail is None else "failed"
    except (WindowError, TruncationError) as e:
        logging.debug(f"{suite}/{name} {_describe(arg)} did not run: {e}")
        status, detail = "skipped", f"{type(e).__name__}: {e}"
    except Exception as e:
        status, detail = "failed", f"{type(e).__name__}: {e}"
    return CheckResult(suite, name, _describe(arg), status, detail or "")


def run_suites(ctx: VerifyContext, suite: str = "all", cores: int = 1) -> VerifyReport:
    """Run one suite or all of them; results come back in job order."""
    names = SUITE_NAMES if suite == "all" else (suite,)
    rng = random.Random(ctx.seed)
    report = VerifyReport()
    for name in names:
        jobs = SUITES[name](ctx, rng)
        logging.info(f"Running the {name} suite: {len(jobs)} checks")
        if cores > 1 and len(jobs) > 1:
            with Pool(cores) as pool:
                results = list(pool.imap(functools.partial(run_job, ctx), jobs, chunksize=8))
        else:
            results = [run_job(ctx, job) for job in jobs]
        report.results.extend(results)
        counts = {s: sum(1 for r in results if r.status == s) for s in STATUSES}
        logging.info(
            f"{name}: {counts['passed']} passed, {counts['failed']} failed, "
            f"{counts['skipped']} skipped"
        )
    return report
