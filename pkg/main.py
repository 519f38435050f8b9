#!/usr/bin/env python3

import argparse
import json
import logging
import sys
import time
from typing import Any, Optional, Sequence

import grammar
import margolis
import parsers
import utils
import verify
from bmu import TruncationError
from coeff import Bidegree, ContractError
from dual import DualElement
from grammar import ParseError
from margolis import ModuleError
from operations import OpElement, WindowError, basis_name

USAGE_ERRORS = (
    ParseError,
    WindowError,
    TruncationError,
    ModuleError,
    ContractError,
    utils.ConfigError,
)

# products are composites, AB = A after B
COMMUTATOR_CONVENTION = "[q{t}, Q0] = q{t} Q0 - Q0 q{t} (q{t} after Q0, minus Q0 after q{t})"


class Outcome:
    """What a subcommand hands back: its echoed input, the JSON result, the
    text rendering and whether a verification failed."""

    def __init__(self, input: dict[str, Any], result: Any, text: str, ok: bool = True) -> None:
        self.input = input
        self.result = result
        self.text = text
        self.ok = ok


def _dual(session: utils.Session, src: str) -> DualElement:
    x = grammar.parse_dual(src, session.dual())
    for bd in x.term_bidegrees():
        session.steenrod().check_window(bd, f"The dual element {src!r}")
    return x


def _op(session: utils.Session, src: str) -> OpElement:
    return grammar.parse_op(src, session.steenrod())


def _basis(session: utils.Session, args: argparse.Namespace) -> Outcome:
    bd = Bidegree(args.d, args.w)
    session.steenrod().check_window(bd, f"The bidegree {bd}")
    monomials = session.dual().basis(bd)
    names = [basis_name(m) if args.kind == "op" else str(m) for m in monomials]
    return Outcome({"bidegree": [bd.d, bd.w], "kind": args.kind}, names, "\n".join(names))


def _fpdim(session: utils.Session, args: argparse.Namespace) -> Outcome:
    bd = Bidegree(args.d, args.w)
    session.steenrod().check_window(bd, f"The bidegree {bd}")
    dim = session.dual().fp_dimension(bd)
    return Outcome({"bidegree": [bd.d, bd.w]}, dim, str(dim))


def _dmul(session: utils.Session, args: argparse.Namespace) -> Outcome:
    product = str(_dual(session, args.x) * _dual(session, args.y))
    return Outcome({"x": args.x, "y": args.y}, product, product)


def _dcoprod(session: utils.Session, args: argparse.Namespace) -> Outcome:
    x = _dual(session, args.x)
    coproduct = str(session.dual().coproduct(x))
    return Outcome({"x": args.x}, coproduct, coproduct)


def _omul(session: utils.Session, args: argparse.Namespace) -> Outcome:
    product = str(_op(session, args.a) * _op(session, args.b))
    return Outcome({"a": args.a, "b": args.b}, product, product)


def _ocoprod(session: utils.Session, args: argparse.Namespace) -> Outcome:
    steenrod = session.steenrod()
    coproduct = str(steenrod.coproduct(_op(session, args.a)))
    return Outcome({"a": args.a}, coproduct, coproduct)


def _cartan(session: utils.Session, args: argparse.Namespace) -> Outcome:
    steenrod = session.steenrod()
    i, kind = args.i, args.kind
    if kind == "beta":
        theta = steenrod.beta()
    elif kind == "P":
        theta = steenrod.reduced_power(i)
    else:
        theta = steenrod.steenrod_square(2 * i if kind == "Sq-even" else 2 * i + 1)
    closed = steenrod.cartan_closed_form(i, kind)
    computed = steenrod.coproduct(theta)
    agree = closed == computed
    result = {
        "operation": str(theta),
        "closed": str(closed),
        "computed": str(computed),
        "agree": agree,
    }
    text = "\n".join(
        [
            f"psi({theta})",
            f"  closed form:     {closed}",
            f"  by dualization:  {computed}",
            "  agree" if agree else "  DIFFER",
        ]
    )
    return Outcome({"i": i, "kind": kind}, result, text, agree)


def _pair(session: utils.Session, args: argparse.Namespace) -> Outcome:
    value = str(session.steenrod().pair(_dual(session, args.x), _op(session, args.theta)))
    return Outcome({"x": args.x, "theta": args.theta}, value, value)


def _act(session: utils.Session, args: argparse.Namespace) -> Outcome:
    module = session.bmu()
    x = grammar.parse_bmu(args.x, module)
    value = str(module.act(_op(session, args.theta), x))
    return Outcome({"theta": args.theta, "x": args.x}, value, value)


def _rottura(session: utils.Session, args: argparse.Namespace) -> Outcome:
    report = session.bmu().verify_rottura(_op(session, args.theta), args.n)
    return Outcome(
        {"theta": args.theta, "n": args.n}, report.to_jsonable_dict(), str(report), report.ok
    )


def _qop(session: utils.Session, args: argparse.Namespace) -> Outcome:
    steenrod = session.steenrod()
    t = args.t
    Q = steenrod.milnor_primitive(t)
    computed = steenrod.coproduct(Q)
    closed = steenrod.q_coproduct_closed_form(t)
    result: dict[str, Any] = {
        "operation": str(Q),
        "bidegree": [Q.max_bidegree().d, Q.max_bidegree().w],
        "coproduct": str(computed),
        "closed_form": str(closed),
        "square": str(Q * Q),
    }
    ok = computed == closed and not (Q * Q)
    lines = [
        f"{Q} in bidegree {Q.max_bidegree()}",
        f"  psi:          {computed}",
        f"  closed form:  {closed}",
        f"  square:       {Q * Q}",
    ]
    if t > 0:
        commutator = steenrod.commutator(t)
        result["commutator"] = str(commutator)
        result["commutator_convention"] = COMMUTATOR_CONVENTION.format(t=t)
        ok = ok and commutator == Q
        lines.append(f"  {COMMUTATOR_CONVENTION.format(t=t)}: {commutator}")
    result["ok"] = ok
    return Outcome({"t": t}, result, "\n".join(lines), ok)


def _export_bmu(session: utils.Session, args: argparse.Namespace) -> Outcome:
    module = margolis.export_bmu(
        session.truncation, args.t, session.prime, session.mode, session.crossing
    )
    data = module.to_jsonable_dict()
    return Outcome({"N": session.truncation, "t": args.t}, data, json.dumps(data, indent=2))


def _margolis(session: utils.Session, args: argparse.Namespace) -> Outcome:
    module = margolis.load_module(args.module)
    report = margolis.margolis_homology(module, args.t, args.coefficient_depth)
    return Outcome(
        {"module": args.module, "t": args.t, "coefficient_depth": args.coefficient_depth},
        report.to_jsonable_dict(),
        str(report),
    )


def _verify(
    session: utils.Session, args: argparse.Namespace, config: utils.NestedNamespace
) -> Outcome:
    ctx = verify.VerifyContext(
        session.prime,
        session.mode,
        session.max_d,
        session.truncation,
        session.crossing,
        config.verify.samples,
        config.verify.seed,
    )
    report = verify.run_suites(ctx, args.suite, max(1, args.cores))
    return Outcome(
        {"suite": args.suite, "crossing": session.crossing},
        report.to_jsonable_dict(),
        str(report),
        report.ok,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns 0 on success, 1 when a verification
    fails and 2 on usage errors."""
    try:
        config, args = utils.get_config_and_parser(
            parsers.main_parser(utils.EXPECTED_ENTRIES, utils.CHOICES), argv
        )
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    except utils.ConfigError as e:
        print(e, file=sys.stderr)
        return 2

    start = time.perf_counter()
    try:
        session = utils.Session.from_config(config, getattr(args, "crossing", "twisted"))
        logging.debug(f"Session {session}")
        if args.sub == "basis":
            outcome = _basis(session, args)
        elif args.sub == "fpdim":
            outcome = _fpdim(session, args)
        elif args.sub == "dmul":
            outcome = _dmul(session, args)
        elif args.sub == "dcoprod":
            outcome = _dcoprod(session, args)
        elif args.sub == "omul":
            outcome = _omul(session, args)
        elif args.sub == "ocoprod":
            outcome = _ocoprod(session, args)
        elif args.sub == "cartan":
            outcome = _cartan(session, args)
        elif args.sub == "pair":
            outcome = _pair(session, args)
        elif args.sub == "act":
            outcome = _act(session, args)
        elif args.sub == "rottura":
            outcome = _rottura(session, args)
        elif args.sub == "qop":
            outcome = _qop(session, args)
        elif args.sub == "export-bmu":
            outcome = _export_bmu(session, args)
        elif args.sub == "margolis":
            outcome = _margolis(session, args)
        elif args.sub == "verify":
            outcome = _verify(session, args, config)
        else:
            print(f"Unknown subcommand {args.sub}", file=sys.stderr)
            return 2
    except USAGE_ERRORS as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2
    timing_ms = (time.perf_counter() - start) * 1000

    if session.format == "json":
        print(
            json.dumps(
                {
                    "session": session.to_jsonable_dict(),
                    "input": outcome.input,
                    "result": outcome.result,
                    "timing_ms": round(timing_ms, 3),
                }
            )
        )
    else:
        print(outcome.text)
    return 0 if outcome.ok else 1


if __name__ == "__main__":
    sys.exit(run())
