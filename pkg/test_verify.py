import random

import pytest

import verify
from coeff import BaseMode
from dual import DualMonomial
from margolis import margolis_homology

T0 = DualMonomial.tau(0)


def context(
    prime: int = 2,
    max_d: int = 6,
    crossing: str = "twisted",
    mode: BaseMode = BaseMode.GENERIC,
) -> verify.VerifyContext:
    return verify.VerifyContext(
        prime, mode, max_d, truncation=4, crossing=crossing, samples=3, seed=1, q_top=1
    )


def test_multiplicativity_check_sees_the_crossing() -> None:
    assert verify.check_multiplicativity(context(), (T0, T0)) is None
    failure = verify.check_multiplicativity(context(crossing="central"), (T0, T0))
    assert failure is not None and "phi(t0 * t0)" in failure


def test_relation_check() -> None:
    for prime in (2, 3):
        for i in (0, 1):
            assert verify.check_relation(context(prime, 12), i) is None


def test_confluence_check() -> None:
    word = (("t", 0, 1), ("t", 0, 1), ("t", 1, 1), ("t", 0, 1))
    for seed in range(5):
        assert verify.check_confluence(context(), (word, seed)) is None
    odd_word = (("t", 1, 1), ("x", 1, 1), ("t", 0, 1))
    for seed in range(5):
        assert verify.check_confluence(context(3, 12), (odd_word, seed)) is None


@pytest.mark.parametrize("suite", ["dual", "op", "bmu", "margolis"])
def test_suites_pass_at_two(suite: str) -> None:
    report = verify.run_suites(context(), suite)
    assert report.ok, str(report)
    assert report.results


@pytest.mark.parametrize("suite", ["dual", "op", "bmu"])
def test_suites_pass_at_three(suite: str) -> None:
    report = verify.run_suites(context(3, 10), suite)
    assert report.ok, str(report)


def test_rho_zero_runs_the_product_check() -> None:
    report = verify.run_suites(context(mode=BaseMode.RHO_ZERO), "op")
    assert report.ok, str(report)
    assert any(r.check == "coproduct-multiplicative" for r in report.results)


def test_central_crossing_fails() -> None:
    report = verify.run_suites(context(crossing="central"), "dual")
    assert not report.ok
    failure = report.first_failure
    assert failure is not None
    assert "first counterexample" in str(report)
    assert report.to_jsonable_dict()["first_failure"]["check"] == failure.check


def test_reports_are_reproducible() -> None:
    ctx = context()
    first = verify.run_suites(ctx, "margolis")
    second = verify.run_suites(ctx, "margolis", cores=2)
    assert [(r.check, r.arg, r.ok) for r in first.results] == [
        (r.check, r.arg, r.ok) for r in second.results
    ]


def test_random_modules() -> None:
    free = verify.random_module(2, BaseMode.GENERIC, 1, random.Random(0), 3, 0, unit=True)
    report = margolis_homology(free, 1, coefficient_depth=2)
    assert report.vanishes()
    trivial = verify.random_module(3, BaseMode.GENERIC, 0, random.Random(0), 0, 2)
    assert len(trivial.basis) == 2


def test_nonzero_square_is_rejected() -> None:
    assert verify.check_rejects_nonzero_square(context(), 0) is None
    assert verify.check_rejects_nonzero_square(context(3), 1) is None


def test_failures_become_results() -> None:
    result = verify.run_job(context(), ("dual", "no-such-check", 0))
    assert not result.ok
    assert "KeyError" in result.detail


def test_out_of_window_checks_are_skipped() -> None:
    x1 = DualMonomial.xi(1, 2)
    result = verify.run_job(context(), ("op", "op-associativity", (x1, x1, x1)))
    assert result.status == "skipped"
    assert not result.ok
    assert "WindowError" in result.detail


def test_truncated_checks_are_skipped_not_passed() -> None:
    ctx = context()
    assert verify.module_truncation(ctx) == 8
    report = verify.VerifyReport([verify.run_job(ctx, ("bmu", "rottura", (T0, 4)))])
    assert report.results[0].status == "skipped"
    assert report.ok
    assert report.summary() == {"bmu": {"passed": 0, "failed": 0, "skipped": 1}}
    assert report.to_jsonable_dict()["skipped"] == 1
    assert "all checks passed" not in str(report)
    assert "1 checks did not run" in str(report)


def test_default_suites_skip_nothing() -> None:
    report = verify.run_suites(context())
    assert report.ok, str(report)
    assert not report.skipped, str(report)


def test_generators() -> None:
    assert verify.generators(context(max_d=6)) == [
        DualMonomial.tau(0),
        DualMonomial.tau(1),
        DualMonomial.xi(1),
        DualMonomial.xi(2),
    ]


def test_generator_rows() -> None:
    ctx = context(max_d=8)
    for m in verify.upto(ctx, 8):
        assert verify.check_generator_multiplicativity(ctx, m) is None
        assert verify.check_generator_commutativity(ctx, m) is None
        assert verify.check_generator_associativity(ctx, m) is None
        if not m.is_unit():
            assert verify.check_splitting(ctx, m) is None
    ctx = context(3, 12)
    for m in verify.upto(ctx, 12):
        assert verify.check_generator_commutativity(ctx, m) is None
        assert verify.check_generator_associativity(ctx, m) is None


def test_generator_rows_see_the_crossing() -> None:
    ctx = context(crossing="central")
    assert verify.check_generator_multiplicativity(ctx, T0) is not None


def test_dual_suite_covers_every_row() -> None:
    ctx = context()
    jobs = verify.dual_jobs(ctx, random.Random(0))
    rows = [arg for _, check, arg in jobs if check == "generator-associativity"]
    assert rows == list(verify.upto(ctx, ctx.max_d))
    assert ("dual", "right-unit", (3, 5)) not in jobs
    assert ("dual", "right-unit", (2, 4)) in jobs


def test_right_unit_check() -> None:
    for a1 in range(4):
        for a2 in range(4):
            assert verify.check_right_unit(context(), (a1, a2)) is None


def test_coproduct_action_runs_with_a_twisted_right_unit() -> None:
    ctx = context()
    T1, X1 = DualMonomial.tau(1), DualMonomial.xi(1)
    for a, b in [(T0, T0), (T0, X1), (X1, T0), (T1, T0)]:
        for x, y in [((1, 0), (1, 0)), ((0, 1), (1, 1))]:
            assert verify.check_coproduct_action(ctx, (a, b, x, y)) is None
    jobs = verify.op_jobs(ctx, random.Random(0))
    assert any(check == "coproduct-action" for _, check, _ in jobs)
    assert not any(check == "coproduct-multiplicative" for _, check, _ in jobs)


def test_margolis_runs_fifty_direct_sums() -> None:
    def pairs(ctx: verify.VerifyContext) -> int:
        jobs = verify.margolis_jobs(ctx, random.Random(0))
        return sum(1 for _, check, _ in jobs if check == "direct-sum")

    assert pairs(context()) == 50
    more = verify.VerifyContext(2, BaseMode.GENERIC, 6, truncation=4, samples=80)
    assert pairs(more) == 80


def test_q_suite_widens_the_window() -> None:
    ctx = context(max_d=4)
    assert verify.check_q_suite(ctx, 2) is None
    jobs = verify.op_jobs(verify.VerifyContext(2, BaseMode.GENERIC, 4, 4), random.Random(0))
    assert [arg for _, check, arg in jobs if check == "q-suite"] == [0, 1, 2, 3, 4]


def test_relation_runs_to_three_past_the_window() -> None:
    jobs = verify.dual_jobs(context(3, 10), random.Random(0))
    assert [arg for _, check, arg in jobs if check == "relation"] == [0, 1, 2, 3]
    assert verify.check_relation(context(3, 10), 3) is None
