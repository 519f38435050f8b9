import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coeff import BaseMode, Bidegree, ContractError
from dual import UNIT, DualMonomial
from operations import MotivicSteenrod, WindowError, basis_name, default_max_d

A2 = MotivicSteenrod(2, max_d=12)
A3 = MotivicSteenrod(3, max_d=24)


def test_default_window() -> None:
    assert MotivicSteenrod(2).max_d == default_max_d(2) == 40
    assert MotivicSteenrod(5).max_d == 60


def test_basis_names() -> None:
    assert basis_name(UNIT) == "1"
    assert basis_name(DualMonomial.tau(3)) == "Q3"
    assert basis_name(DualMonomial.make([0, 1])) == "QE{0,1}"
    assert basis_name(DualMonomial.make((), [2])) == "P2"
    assert basis_name(DualMonomial.xi(3)) == "q3"
    assert basis_name(DualMonomial.make([0], [1])) == "[0|1]"
    assert basis_name(DualMonomial.make((), [1, 1])) == "[|1,1]"


def test_milnor_primitive_bidegrees() -> None:
    assert A2.beta().bidegree() == Bidegree(1, 0)
    assert A2.milnor_primitive(2).bidegree() == Bidegree(7, 3)
    assert A3.milnor_primitive(1).bidegree() == Bidegree(5, 2)


def test_coefficient_shifts_operation_bidegree() -> None:
    theta = A2.reduced_power(1).scale(A2.dual.coeff(1, 1))
    assert theta.bidegree() == Bidegree(2, 1) + Bidegree(1, 2)


def test_pairing() -> None:
    assert A2.pair(A2.dual.tau(0), A2.beta()) == 1
    assert A2.pair(A2.dual.tau(0), A2.milnor_primitive(1)) == 0
    rho = A2.dual.coeff(0, 1)
    assert A2.pair(A2.dual.tau(0).scale(rho), A2.beta()) == rho


@pytest.mark.parametrize("alg", [A2, A3])
def test_beta_squares_to_zero(alg: MotivicSteenrod) -> None:
    assert (alg.beta() * alg.beta()).is_zero()


@pytest.mark.parametrize("alg", [A2, A3])
def test_unit(alg: MotivicSteenrod) -> None:
    P0 = alg.reduced_power(0)
    assert P0 == alg.one()
    for m in alg.dual.basis_upto(8):
        theta = alg.basis_element(m)
        assert P0 * theta == theta
        assert theta * P0 == theta


def test_q1_from_q_classes_at_two() -> None:
    Q0, q1 = A2.beta(), A2.q(1)
    assert Q0 * q1 + q1 * Q0 == A2.milnor_primitive(1)


@pytest.mark.parametrize("alg", [A2, A3])
def test_commutator(alg: MotivicSteenrod) -> None:
    assert alg.commutator(1) == alg.milnor_primitive(1)


@pytest.mark.parametrize("t", [0, 1, 2])
def test_q_squares_to_zero(t: int) -> None:
    alg = A2.with_window(16)
    Q = alg.milnor_primitive(t)
    assert (Q * Q).is_zero()


def test_q_coproducts() -> None:
    one = A2.dual.one_coeff
    rho = A2.dual.coeff(0, 1)
    Q0, Q1 = A2.beta(), A2.milnor_primitive(1)
    expected = A2.tensor([(Q1, A2.one(), one), (A2.one(), Q1, one), (Q0, Q0, rho)])
    assert A2.coproduct(Q1) == expected
    assert A2.q_coproduct_closed_form(1) == expected
    assert str(A3.coproduct(A3.milnor_primitive(1))) == "Q1(x)1 + 1(x)Q1"
    assert A2.coproduct(A2.one()) == A2.tensor([(A2.one(), A2.one(), one)])


@pytest.mark.parametrize("t", [0, 1, 2])
def test_q_coproduct_closed_form(t: int) -> None:
    assert A2.coproduct(A2.milnor_primitive(t)) == A2.q_coproduct_closed_form(t)
    assert A3.coproduct(A3.milnor_primitive(t)) == A3.q_coproduct_closed_form(t)


@pytest.mark.parametrize("i", [0, 1, 2, 3])
def test_cartan_at_two(i: int) -> None:
    for kind, theta in (
        ("Sq-even", A2.steenrod_square(2 * i)),
        ("Sq-odd", A2.steenrod_square(2 * i + 1)),
    ):
        assert A2.coproduct(theta) == A2.cartan_closed_form(i, kind)
    assert A2.cartan_closed_form(i, "P") == A2.cartan_closed_form(i, "Sq-even")


@pytest.mark.parametrize("i", [0, 1, 2, 3])
def test_cartan_at_three(i: int) -> None:
    assert A3.coproduct(A3.reduced_power(i)) == A3.cartan_closed_form(i, "P")


def test_cartan_beta() -> None:
    for alg in (A2, A3):
        assert alg.coproduct(alg.beta()) == alg.cartan_closed_form(0, "beta")


def test_cartan_contract() -> None:
    with pytest.raises(ContractError):
        A3.cartan_closed_form(1, "Sq-even")
    with pytest.raises(ContractError):
        A2.cartan_closed_form(1, "Pow")
    with pytest.raises(ContractError):
        A3.steenrod_square(1)


def test_window() -> None:
    small = MotivicSteenrod(2, max_d=4)
    with pytest.raises(WindowError):
        small.reduced_power(2) * small.reduced_power(2)
    with pytest.raises(WindowError):
        small.coproduct(small.milnor_primitive(2))
    assert small.with_window(8).max_d == 8
    assert small.with_window(2).max_d == 4


def test_named_operations() -> None:
    assert A2.named(1) == A2.reduced_power(1)
    assert A3.named(2) == A3.reduced_power(3) * A3.reduced_power(1)


def test_steenrod_squares_at_two() -> None:
    assert A2.steenrod_square(1) == A2.beta()
    assert A2.steenrod_square(4) == A2.reduced_power(2)
    assert A2.steenrod_square(3) == A2.milnor([0], [1])


def test_central_coefficients_required_for_tensor_products() -> None:
    Q0 = A2.beta()
    psi = A2.coproduct(Q0)
    with pytest.raises(ContractError):
        psi * psi
    rho0 = MotivicSteenrod(2, BaseMode.RHO_ZERO, 12)
    assert (rho0.coproduct(rho0.beta()) * rho0.coproduct(rho0.beta())).is_zero()


OPS_2 = A2.dual.basis_upto(4)
OPS_3 = A3.dual.basis_upto(8)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(OPS_2), st.sampled_from(OPS_2), st.sampled_from(OPS_2))
def test_associativity_at_two(a: DualMonomial, b: DualMonomial, c: DualMonomial) -> None:
    x, y, z = (A2.basis_element(m) for m in (a, b, c))
    assert (x * y) * z == x * (y * z)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(OPS_3), st.sampled_from(OPS_3))
def test_coproduct_is_multiplicative_at_three(a: DualMonomial, b: DualMonomial) -> None:
    x, y = A3.basis_element(a), A3.basis_element(b)
    assert A3.coproduct(x * y) == A3.coproduct(x) * A3.coproduct(y)


def test_pairing_matrix_is_identity() -> None:
    for bd in (Bidegree(4, 1), Bidegree(5, 2), Bidegree(6, 2)):
        basis = A2.dual.basis(bd)
        for I in basis:
            for J in basis:
                value = A2.pair(A2.dual.monomial(I), A2.basis_element(J))
                assert value == (1 if I == J else 0)
