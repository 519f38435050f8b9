import json
import random
from pathlib import Path
from typing import Any

import pytest

from bmu import BmuModule
from coeff import BaseMode, Bidegree, Coeff
from margolis import (
    ModuleError,
    ModulePresentation,
    direct_sum,
    export_bmu,
    homology_at,
    load_module,
    margolis_homology,
    module_from_dict,
    q_bidegree,
    reported_bidegrees,
)
from operations import MotivicSteenrod
from verify import random_module

G = BaseMode.GENERIC


def pair_module(entry: str = "1", y_bidegree: tuple[int, int] = (1, 0)) -> dict[str, Any]:
    return {
        "prime": 2,
        "mode": "generic",
        "basis": [
            {"name": "x", "bidegree": [0, 0]},
            {"name": "y", "bidegree": list(y_bidegree)},
        ],
        "actions": {"0": [["0", "0"], [entry, "0"]]},
    }


def test_free_pair_has_no_homology() -> None:
    m = module_from_dict(pair_module())
    report = margolis_homology(m, 0)
    assert report.vanishes()
    x_piece = report.at(Bidegree(0, 0))
    y_piece = report.at(Bidegree(1, 0))
    assert x_piece is not None and y_piece is not None
    assert (x_piece.dim, x_piece.ker, x_piece.im) == (1, 0, 0)
    assert (y_piece.dim, y_piece.ker, y_piece.im) == (1, 1, 1)
    assert report.generic_rank == 1
    assert report.generic_hm == 0


def test_rho_torsion() -> None:
    m = module_from_dict(pair_module("rho", (0, -1)))
    report = margolis_homology(m, 0)
    piece = report.at(Bidegree(0, 0))
    assert piece is not None
    # tau*y survives, rho*y is hit from x
    assert (piece.dim, piece.ker, piece.im) == (2, 1, 0)
    assert piece.hm == 1
    assert not report.vanishes()
    assert report.generic_rank == 1
    assert report.generic_hm == 0
    assert report.specialized_ranks == {(0, 0): 0, (1, 0): 0, (0, 1): 1, (1, 1): 1}


def test_rank_nullity() -> None:
    m = random_module(3, G, 1, random.Random(7), 3, 2)
    for piece in margolis_homology(m, 1, coefficient_depth=2).pieces:
        assert piece.ker + piece.rank_out == piece.dim
        assert 0 <= piece.im <= piece.ker


def test_coefficient_depth() -> None:
    m = module_from_dict(pair_module())
    assert reported_bidegrees(m) == [Bidegree(0, 0), Bidegree(1, 0)]
    deeper = reported_bidegrees(m, 1)
    assert Bidegree(0, 1) in deeper and Bidegree(1, 1) in deeper
    assert margolis_homology(m, 0, coefficient_depth=2).vanishes()


def test_trivial_module() -> None:
    m = random_module(2, G, 0, random.Random(1), 0, 3)
    for piece in margolis_homology(m, 0, coefficient_depth=1).pieces:
        assert piece.hm == piece.dim


def test_direct_sum() -> None:
    m1 = random_module(2, G, 0, random.Random(3), 2, 1)
    m2 = random_module(2, G, 0, random.Random(3), 2, 1)
    total = direct_sum(m1, m2)
    assert len(total.basis) == len(m1.basis) + len(m2.basis)
    assert len(set(total.names)) == len(total.names)
    assert "x0'" in total.names
    report = margolis_homology(total, 0, coefficient_depth=1)
    bidegrees = [p.bidegree for p in report.pieces]
    parts = zip(report.pieces, homology_at(m1, 0, bidegrees), homology_at(m2, 0, bidegrees))
    for whole, a, b in parts:
        assert whole.hm == a.hm + b.hm


def test_rejects_inhomogeneous_entry() -> None:
    with pytest.raises(ModuleError, match="x"):
        module_from_dict(pair_module("tau"))


def test_rejects_nonzero_square() -> None:
    one, zero = Coeff.one(2, G), Coeff.zero(2, G)
    q = q_bidegree(2, 0)
    m = ModulePresentation(
        2,
        G,
        [("a", Bidegree(0, 0)), ("b", q), ("c", q + q)],
        {0: [[zero, zero, zero], [one, zero, zero], [zero, one, zero]]},
    )
    with pytest.raises(ModuleError, match="square"):
        m.validate()


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"prime": 4, "basis": [], "actions": {}},
        {"prime": 2, "basis": [{"name": "x"}], "actions": {}},
        {"prime": 2, "basis": [], "actions": {"one": []}},
        {"prime": 2, "mode": "complex", "basis": [], "actions": {}},
        {"prime": 2, "basis": [{"name": "x", "bidegree": [0, 0]}], "actions": {"0": [["0", "0"]]}},
    ],
)
def test_schema_errors(data: Any) -> None:
    with pytest.raises(ModuleError):
        module_from_dict(data)


def test_unparsable_entry_names_the_element() -> None:
    with pytest.raises(ModuleError, match=r"Q_0\(x\) at y"):
        module_from_dict(pair_module("tau +"))


def test_missing_action() -> None:
    m = module_from_dict(pair_module())
    with pytest.raises(ModuleError, match="Q_1"):
        margolis_homology(m, 1)


def test_load_module(tmp_path: Path) -> None:
    data = pair_module()
    path = tmp_path / "module.json"
    path.write_text(json.dumps(data))
    from_file = load_module(str(path))
    inline = load_module(json.dumps(data))
    assert from_file.to_jsonable_dict() == inline.to_jsonable_dict()
    with pytest.raises(ModuleError):
        load_module(str(tmp_path / "missing.json"))
    with pytest.raises(ModuleError):
        load_module("{not json")


def test_export_flags_overflow() -> None:
    m = export_bmu(0, 0)
    assert m.names == ["1", "u"]
    assert all(not c for row in m.action(0) for c in row)
    assert Bidegree(1, 1) in m.flagged
    assert Bidegree(2, 1) in m.flagged
    report = margolis_homology(m, 0)
    u_piece = report.at(Bidegree(1, 1))
    assert u_piece is not None and u_piece.flagged


def test_export_bmu() -> None:
    m = export_bmu(2, 0)
    assert m.names == ["1", "u", "v", "u v", "v^2", "u v^2"]
    assert m.flagged == {Bidegree(5, 3), Bidegree(6, 3)}
    report = margolis_homology(m, 0)
    assert report.generic_rank == 2
    assert all(r == 2 for r in report.specialized_ranks.values())
    again = module_from_dict(json.loads(json.dumps(m.to_jsonable_dict())))
    assert again.to_jsonable_dict() == m.to_jsonable_dict()


def test_export_q1_at_three() -> None:
    m = export_bmu(4, 1, prime=3)
    u, v3 = m.names.index("u"), m.names.index("v^3")
    assert m.action(1)[v3][u] == 1
    report = margolis_homology(m, 1)
    assert report.generic_rank == report.specialized_ranks[(1, 1)] == 2


def test_export_treats_q0_as_linear_over_the_coefficients() -> None:
    m = export_bmu(2, 0)
    u, v = m.names.index("u"), m.names.index("v")
    column = [row[u] for row in m.action(0)]
    assert column[v] == 1
    assert sum(1 for c in column if c) == 1
    # the module itself twists tau: Q0(tau u) = tau v + rho u
    module = BmuModule(2, G, 2)
    tau = module.dual.coeff(1, 0)
    twisted = module.act(MotivicSteenrod(2).beta(), module.u().scale(tau))
    assert twisted != module.v().scale(tau)
    assert "R-linear" in (export_bmu.__doc__ or "")
