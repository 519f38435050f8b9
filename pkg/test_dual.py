from typing import Sequence

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import dual
from bmu import BmuModule
from coeff import BaseMode, Bidegree, Coeff, ContractError
from dual import UNIT, DualMonomial, DualSteenrod, DualTensor, tau_bidegree, xi_bidegree
from operations import MotivicSteenrod

P2 = DualSteenrod(2)
P3 = DualSteenrod(3)


def mono(E: Sequence[int] = (), R: Sequence[int] = ()) -> DualMonomial:
    return DualMonomial.make(E, R)


def test_monomial_bidegrees() -> None:
    assert mono([0]).bidegree(2) == Bidegree(1, 0)
    assert mono([1]).bidegree(2) == tau_bidegree(2, 1) == Bidegree(3, 1)
    assert mono((), [1]).bidegree(3) == xi_bidegree(3, 1) == Bidegree(4, 2)
    assert mono([0], [2]).bidegree(2) == Bidegree(5, 2)


def test_repeated_tau_rejected() -> None:
    with pytest.raises(ContractError):
        DualMonomial.make([1, 1])


def test_tau_square_at_two() -> None:
    tau, rho = P2.coeff(1, 0), P2.coeff(0, 1)
    square = P2.tau(0) * P2.tau(0)
    expected = P2.element(
        {mono((), [1]): tau, mono([1]): rho, mono([0], [1]): rho}
    )
    assert square == expected
    assert str(square) == "tau*x1 + rho*t1 + rho*t0 x1"
    assert square.bidegree() == Bidegree(2, 0)


def test_tau_cube_at_two() -> None:
    tau, rho = P2.coeff(1, 0), P2.coeff(0, 1)
    cube = P2.normalize([("t", 0, 3)])
    expected = P2.element(
        {
            mono([0], [1]): tau,
            mono([0, 1]): rho,
            mono((), [2]): rho * tau,
            mono([1], [1]): rho * rho,
            mono([0], [2]): rho * rho,
        }
    )
    assert cube == expected
    assert cube == P2.tau(0) ** 3


def test_tau_square_vanishes_at_odd_primes() -> None:
    assert (P3.tau(1) * P3.tau(1)).is_zero()
    assert P3.normalize([("t", 0, 2)]).is_zero()


def test_koszul_sign_at_odd_primes() -> None:
    t0t1 = P3.monomial(mono([0, 1]))
    assert P3.tau(0) * P3.tau(1) == t0t1
    assert P3.tau(1) * P3.tau(0) == -t0t1
    assert P3.xi(1) * P3.tau(0) == P3.tau(0) * P3.xi(1)


def test_normal_words_unchanged() -> None:
    assert P2.tau(0) * P2.xi(1) == P2.monomial(mono([0], [1]))
    assert str(P2.tau(0) * P2.xi(1)) == "t0 x1"


def test_generator_coproducts() -> None:
    one = P2.one_coeff
    expected = DualTensor(P2, {(mono([0]), UNIT): one, (UNIT, mono([0])): one})
    assert P2.coproduct(P2.tau(0)) == expected
    assert str(P2.coproduct(P2.tau(0))) == "t0(x)1 + 1(x)t0"
    assert P2.coproduct(P2.tau(1)) == DualTensor(
        P2,
        {(mono([1]), UNIT): one, (mono((), [1]), mono([0])): one, (UNIT, mono([1])): one},
    )
    assert P2.coproduct(P2.xi(1)) == DualTensor(
        P2, {(mono((), [1]), UNIT): one, (UNIT, mono((), [1])): one}
    )
    assert P3.coproduct(P3.xi(2)) == DualTensor(
        P3,
        {
            (mono((), [0, 1]), UNIT): P3.one_coeff,
            (mono((), [3]), mono((), [1])): P3.one_coeff,
            (UNIT, mono((), [0, 1])): P3.one_coeff,
        },
    )


def test_right_unit() -> None:
    tau = P2.coeff(1, 0)
    assert P2.eta_right(tau) == P2.element({UNIT: tau, mono([0]): P2.coeff(0, 1)})
    assert P2.eta_right(P2.coeff(0, 1)) == P2.from_coeff(P2.coeff(0, 1))
    central = DualSteenrod(2, crossing="central")
    assert central.eta_right(central.coeff(1, 0)) == central.from_coeff(central.coeff(1, 0))
    assert P3.eta_right(P3.coeff(1, 0)) == P3.from_coeff(P3.coeff(1, 0))


def test_multiplicativity_needs_the_twist() -> None:
    x = P2.tau(0)
    assert P2.coproduct(x * x) == P2.coproduct(x) * P2.coproduct(x)
    central = DualSteenrod(2, crossing="central")
    y = central.tau(0)
    assert central.coproduct(y * y) != central.coproduct(y) * central.coproduct(y)


def test_basis() -> None:
    assert P2.basis(Bidegree(1, 0)) == (mono([0]),)
    assert P2.basis(Bidegree(2, 0)) == ()
    assert P2.basis(Bidegree(2, 1)) == (mono((), [1]),)
    assert P2.basis(Bidegree(0, 0)) == (UNIT,)
    assert P2.basis(Bidegree(4, 1)) == (mono([0, 1]),)
    assert P2.basis(Bidegree(4, 2)) == (mono((), [2]),)
    assert P2.basis(Bidegree(-1, 0)) == ()


def test_basis_order() -> None:
    found = P2.basis_upto(7)
    keys = [m.key(2) for m in found]
    assert keys == sorted(keys)
    assert all(m.bidegree(2).d <= 7 for m in found)


def test_fp_dimension() -> None:
    assert P2.fp_dimension(Bidegree(1, 0)) == 2
    assert DualSteenrod(2, BaseMode.RHO_ZERO).fp_dimension(Bidegree(1, 0)) == 1
    assert P2.fp_dimension(Bidegree(0, 0)) == 1
    assert P2.fp_dimension(Bidegree(1, 1)) == 0


@pytest.mark.parametrize("alg", [P2, P3, DualSteenrod(2, BaseMode.RHO_ZERO)])
def test_coassociativity_and_counit(alg: DualSteenrod) -> None:
    for m in alg.basis_upto(8):
        x = alg.monomial(m)
        delta = alg.coproduct(x)
        assert alg.coproduct_left(delta) == alg.coproduct_right(delta)
        assert alg.counit_left(delta) == x
        assert alg.counit_right(delta) == x


def test_counit() -> None:
    assert P2.counit(P2.one()) == 1
    assert P2.counit(P2.tau(0)) == 0


def test_bounded_coproduct_keeps_surviving_terms() -> None:
    x = P2.tau(1) * P2.xi(1)
    full = P2.coproduct(x)
    bound = Bidegree(3, 1)
    pruned = P2.coproduct(x, bound, bound)
    for (left, right), c in full.terms.items():
        if left.bidegree(2).fits(bound) and right.bidegree(2).fits(bound):
            assert pruned.coefficient((left, right)) == c


WINDOW_2 = P2.basis_upto(8)
WINDOW_3 = P3.basis_upto(12)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(WINDOW_2), st.sampled_from(WINDOW_2), st.sampled_from(WINDOW_2))
def test_ring_axioms_at_two(a: DualMonomial, b: DualMonomial, c: DualMonomial) -> None:
    x, y, z = P2.monomial(a), P2.monomial(b), P2.monomial(c)
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(WINDOW_3), st.sampled_from(WINDOW_3), st.sampled_from(WINDOW_3))
def test_graded_commutativity_at_three(a: DualMonomial, b: DualMonomial, c: DualMonomial) -> None:
    x, y, z = P3.monomial(a), P3.monomial(b), P3.monomial(c)
    sign = -1 if a.bidegree(3).d * b.bidegree(3).d % 2 else 1
    assert x * y == (y * x).scale(sign)
    assert (x * y) * z == x * (y * z)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(P2.basis_upto(6)), st.sampled_from(P2.basis_upto(6)))
def test_coproduct_is_multiplicative(a: DualMonomial, b: DualMonomial) -> None:
    x, y = P2.monomial(a), P2.monomial(b)
    assert P2.coproduct(x * y) == P2.coproduct(x) * P2.coproduct(y)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(WINDOW_2), st.integers(0, 1), st.integers(0, 1))
def test_scaling_shifts_bidegree(a: DualMonomial, ta: int, rb: int) -> None:
    c = Coeff.monomial(2, BaseMode.GENERIC, ta, rb)
    x = P2.monomial(a, c)
    assert x.bidegree() == a.bidegree(2) - Bidegree(rb, ta + rb)


def test_caches_are_bounded() -> None:
    cached = [
        dual._bidegree,
        DualSteenrod.mono_product,
        DualSteenrod._eta_monomial,
        DualSteenrod.cross,
        DualSteenrod._mono_coproduct,
        DualSteenrod.basis,
        BmuModule._mono_lambda,
        MotivicSteenrod._basis_coproduct,
    ]
    for f in cached:
        assert f.cache_info().maxsize is not None
