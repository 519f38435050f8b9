import argparse
import multiprocessing as mp
from typing import Any, Mapping, Optional, Sequence

from operations import CARTAN_KINDS

SUITES = ("dual", "op", "bmu", "margolis", "all")


def config_parser(
    expected_entries: Sequence[tuple[Any, ...]],
    choices: Optional[Mapping[tuple[str, ...], Sequence[str]]] = None,
) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    choices = choices or {}

    for _, path, desc in expected_entries:
        if path in choices:
            parser.add_argument(
                "--" + path[-1].replace("_", "-"),
                dest=".".join(path),
                choices=choices[path],
                type=str,
                help=desc,
            )
        else:
            parser.add_argument(
                "--" + path[-1].replace("_", "-"),
                dest=".".join(path),
                type=int,
                help=desc,
            )
    parser.add_argument("--config", type=str, help="Path to config.json")

    parser.add_argument(
        "-ll",
        "--log-level",
        type=str,
        choices=("debug", "info", "warning", "error", "critical"),
        help="Log level",
    )

    parser.add_argument(
        "--cores",
        help="Amount of worker processes for verify. Defaults to all.",
        type=int,
        default=mp.cpu_count(),
    )

    return parser


def main_parser(
    expected_entries: Sequence[tuple[Any, ...]],
    choices: Optional[Mapping[tuple[str, ...], Sequence[str]]] = None,
) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motsteen",
        description="Motivic Steenrod algebra over F_p[tau, rho].",
    )
    common = [config_parser(expected_entries, choices)]

    subparser = parser.add_subparsers(title="sub", dest="sub", required=True)

    basis_parser = subparser.add_parser(
        "basis", parents=common, help="List the Milnor basis in a bidegree."
    )
    basis_parser.add_argument("d", type=int, help="First degree")
    basis_parser.add_argument("w", type=int, help="Weight")
    basis_parser.add_argument(
        "--kind",
        choices=("dual", "op"),
        default="dual",
        help="Print dual monomials or the operations dual to them.",
    )

    fpdim_parser = subparser.add_parser(
        "fpdim",
        parents=common,
        help="F_p-dimension of the dual algebra in a bidegree, coefficients included.",
    )
    fpdim_parser.add_argument("d", type=int, help="First degree")
    fpdim_parser.add_argument("w", type=int, help="Weight")

    dmul_parser = subparser.add_parser(
        "dmul", parents=common, help="Product in the dual algebra."
    )
    dmul_parser.add_argument("x", metavar="X", help="Dual element")
    dmul_parser.add_argument("y", metavar="Y", help="Dual element")

    dcoprod_parser = subparser.add_parser(
        "dcoprod", parents=common, help="Coproduct in the dual algebra."
    )
    dcoprod_parser.add_argument("x", metavar="X", help="Dual element")

    omul_parser = subparser.add_parser(
        "omul", parents=common, help="Composite A after B of two operations."
    )
    omul_parser.add_argument("a", metavar="A", help="Operation")
    omul_parser.add_argument("b", metavar="B", help="Operation")

    ocoprod_parser = subparser.add_parser(
        "ocoprod", parents=common, help="Cartan coproduct of an operation."
    )
    ocoprod_parser.add_argument("a", metavar="A", help="Operation")

    cartan_parser = subparser.add_parser(
        "cartan",
        parents=common,
        help="Closed Cartan formula next to the coproduct obtained by dualization.",
    )
    cartan_parser.add_argument("i", type=int, help="Index of the operation")
    cartan_parser.add_argument(
        "--kind",
        choices=CARTAN_KINDS,
        default="P",
        help="P^i, Sq^{2i}, Sq^{2i+1} or beta (i ignored).",
    )

    pair_parser = subparser.add_parser(
        "pair", parents=common, help="Kronecker pairing <X, THETA>."
    )
    pair_parser.add_argument("x", metavar="X", help="Dual element")
    pair_parser.add_argument("theta", metavar="THETA", help="Operation")

    act_parser = subparser.add_parser(
        "act", parents=common, help="Evaluate an operation on H(B mu_p)."
    )
    act_parser.add_argument("theta", metavar="THETA", help="Operation")
    act_parser.add_argument("x", metavar="X", help="Class in u, v")

    rottura_parser = subparser.add_parser(
        "rottura",
        parents=common,
        help="Check THETA on u^{p^n} and v^{p^n} against the closed p-power sums.",
    )
    rottura_parser.add_argument("theta", metavar="THETA", help="Operation")
    rottura_parser.add_argument("n", type=int, help="Exponent n of p^n")

    qop_parser = subparser.add_parser(
        "qop",
        parents=common,
        help="Q_t with its coproduct, closed form and commutator with Q_0.",
    )
    qop_parser.add_argument("-t", "--t", type=int, default=1, help="Index t of Q_t")

    export_parser = subparser.add_parser(
        "export-bmu",
        parents=common,
        help="Export H(B mu_p) up to v^N (--truncation) with the action of Q_t.",
    )
    export_parser.add_argument("-t", "--t", type=int, default=0, help="Index t of Q_t")

    margolis_parser = subparser.add_parser(
        "margolis", parents=common, help="Margolis homology HM(M, Q_t)."
    )
    margolis_parser.add_argument(
        "--module",
        required=True,
        metavar="FILE|JSON",
        help="Module file or inline JSON.",
    )
    margolis_parser.add_argument("-t", "--t", type=int, default=0, help="Index t of Q_t")
    margolis_parser.add_argument(
        "--coefficient-depth",
        type=int,
        default=0,
        help="Also report bidegrees shifted by coefficient monomials up to this total degree.",
    )

    verify_parser = subparser.add_parser(
        "verify", parents=common, help="Run the invariant suites within the window."
    )
    verify_parser.add_argument(
        "--suite", choices=SUITES, default="all", help="Which suite to run."
    )
    verify_parser.add_argument(
        "--crossing",
        choices=("twisted", "central"),
        default="twisted",
        help="How coefficients cross the tensor sign. 'central' is expected to fail at p=2.",
    )

    return parser
