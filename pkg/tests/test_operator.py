from fractions import Fraction

import pytest
from sympy import QQ, Poly

from src.algebra.operator import (
    Y,
    RecurrenceSpec,
    ThetaOperator,
    apply,
    classify,
    convert,
    fit_recurrence,
    fit_recurrence_auto,
    fit_terms_required,
    log_psi,
    q_param,
    residual_index,
    socle,
    theta_partial,
)
from src.algebra.series import Series1, diagonal_restrict
from src.geometry.families import ci_series, product_series
from src.utils.errors import AmbiguousFit, NoFit, NonsolvableRecurrence
from tests.conftest import QUINTIC_OPERATOR, random_series

CASES = 100
ORDER = 20


def _random_mu_spec(rng, m, order):
    # a root of P_0 at a small index cuts the socle series off and the fit becomes ambiguous
    while True:
        lists = [[rng.randint(-4, 4) for _ in range(order + 1)] for _ in range(m)]
        lists[0][order] = rng.choice([-3, -2, -1, 1, 2, 3])
        span = range(fit_terms_required(m, order) + 1)
        if all(sum(c * k**i for i, c in enumerate(lists[0])) != 0 for k in span):
            return RecurrenceSpec.from_coeffs(lists + [[0] * order + [1]])


def test_quintic_recurrence_matches_printed_operator(quintic_spec):
    printed = ThetaOperator.from_expr(QUINTIC_OPERATOR)
    assert quintic_spec.same_operator(printed)
    assert quintic_spec.is_mu()
    assert quintic_spec.m == 1 and quintic_spec.order == 4


def test_quintic_socle(quintic_spec):
    phi0 = socle(quintic_spec, 1, 10)
    assert phi0[1] == 120
    assert phi0[2] == 113400
    assert residual_index(quintic_spec, phi0) is None


def test_quintic_log_solution(quintic_spec):
    phi0 = socle(quintic_spec, 1, 10)
    psi = log_psi(quintic_spec, phi0, 10)
    assert psi[0] == 0
    assert psi[1] == 770
    qp = q_param(phi0, psi)
    assert qp.q_of_z.head(3) == [0, 1, 770]
    assert qp.q_of_z.compose(qp.z_of_q) == Series1.variable(qp.q_of_z.order)


def test_log_solution_defining_identity(rng):
    # D Psi + (dD/dTheta) Phi_0 = 0
    for _ in range(CASES):
        m = rng.choice([1, 2])
        spec = _random_mu_spec(rng, m, rng.choice([2, 3, 4]))
        phi0 = socle(spec, 1, 20)
        psi = log_psi(spec, phi0, 20)
        total = apply(spec, psi) + apply(theta_partial(spec), phi0)
        assert total.is_zero()


def test_socle_uniqueness(rng):
    for _ in range(CASES):
        spec = _random_mu_spec(rng, rng.choice([1, 2, 3]), rng.choice([2, 3, 4]))
        phi0 = socle(spec, 1, 20)
        assert residual_index(spec, phi0) is None
        n = rng.randint(1, 20)
        values = list(phi0.coeffs)
        values[n] += rng.choice([-1, 1, Fraction(1, 3)])
        assert residual_index(spec, Series1(tuple(values))) == n


def test_operator_form_round_trips(rng):
    for _ in range(CASES):
        m = rng.randint(0, 4)
        order = rng.randint(1, 5)
        lists = [[rng.randint(-6, 6) for _ in range(order + 1)] for _ in range(m + 1)]
        lists[m][order] = rng.choice([-2, 1, 5])
        op = ThetaOperator.from_coeffs(lists)
        assert convert(convert(op, "zform"), "theta").polys == op.polys
        assert convert(convert(op, "recurrence"), "theta").polys == op.polys
        zform = op.to_zform()
        assert convert(convert(zform, "recurrence"), "zform").a_polys == zform.a_polys


def test_theta_left_quintic():
    left = ThetaOperator.from_theta_left(
        [(0, Poly(Y**4, Y)), (1, -5 * (5 * Y - 4) * (5 * Y - 3) * (5 * Y - 2) * (5 * Y - 1))]
    )
    assert left.m == 1
    assert left.same_operator(ThetaOperator.from_expr(QUINTIC_OPERATOR))


def test_theta_left_moves_z_through_theta(rng):
    # P(Theta) z^j f = z^j P(Theta + j) f
    for _ in range(CASES):
        j = rng.randint(0, 3)
        coeffs = [rng.randint(-5, 5) for _ in range(rng.randint(1, 4))] + [rng.choice([-2, 1, 3])]
        p = Poly(list(reversed(coeffs)), Y, domain=QQ)
        f = random_series(rng, ORDER, constant=rng.randint(-3, 3))
        left = apply(ThetaOperator.from_theta_left([(j, p)]), f)
        direct = apply(ThetaOperator((p,)), f.shift(j)).truncate(ORDER - j)
        assert left == direct


def test_mu_operators_have_mu_shaped_zform(rng):
    for _ in range(20):
        spec = _random_mu_spec(rng, 2, 4)
        assert classify(spec).is_mu
        zform = spec.to_zform()
        for i, a in enumerate(zform.a_polys[:-1]):
            assert a.eval(0) == 0, i
        assert zform.leading().eval(0) == 1


def test_classify():
    assert classify(ThetaOperator.from_expr(QUINTIC_OPERATOR)).is_mu
    not_mu = ThetaOperator.from_expr("Theta**4 + 1 - z*Theta**4")
    assert classify(not_mu).is_picard_fuchs
    assert not classify(not_mu).is_mu
    degenerate = ThetaOperator.from_expr("z*Theta**4 + Theta**3")
    assert not classify(degenerate).is_picard_fuchs


def test_nonsolvable_recurrence():
    spec = RecurrenceSpec.from_coeffs([[1], [-3, 1]])
    with pytest.raises(NonsolvableRecurrence) as exc:
        socle(spec, 1, 5)
    assert exc.value.index == 3


def test_trivial_operator_has_constant_solutions():
    spec = RecurrenceSpec.from_coeffs([[0, 1]])
    assert socle(spec, 1, 5) == Series1.constant(1, 5)
    assert log_psi(spec, Series1.constant(1, 5), 5).is_zero()


def test_fit_geometric_series():
    spec = fit_recurrence(Series1.of([1] * 21), 1, 1)
    assert spec.polys == RecurrenceSpec.from_coeffs([[-1, -1], [0, 1]]).polys


def test_fit_recovers_quintic(quintic, quintic_spec):
    data = ci_series(quintic, 30)
    assert fit_recurrence(data, 1, 4).polys == quintic_spec.polys
    assert fit_recurrence_auto(data).polys == quintic_spec.polys


def test_fit_recovers_random_mu_recurrences(rng):
    for _ in range(CASES):
        m = rng.choice([1, 2])
        order = rng.choice([2, 3, 4])
        spec = _random_mu_spec(rng, m, order)
        data = socle(spec, 1, fit_terms_required(m, order))
        assert fit_recurrence(data, m, order).polys == spec.polys


def test_fit_needs_enough_terms(quintic):
    with pytest.raises(NoFit) as exc:
        fit_recurrence(ci_series(quintic, 10), 1, 4)
    assert exc.value.minimum_terms == fit_terms_required(1, 4)
    with pytest.raises(NoFit) as exc:
        fit_recurrence_auto(ci_series(quintic, 10))
    assert exc.value.minimum_terms == 21


def test_fit_rejects_unstructured_data(rng):
    data = random_series(rng, 40, constant=1, lo=-1000, hi=1000)
    with pytest.raises(NoFit):
        fit_recurrence_auto(data, order=4, max_m=5)


def test_fit_of_zero_series_is_ambiguous():
    with pytest.raises(AmbiguousFit):
        fit_recurrence(Series1.zero(30), 1, 4)


def test_p1x4_diagonal_operator(p1x4, p1x4_operator):
    data = diagonal_restrict(product_series(p1x4, 40), (1, 1, 1, 1))
    assert data.head(3) == [1, 8, 168]
    assert residual_index(p1x4_operator, data) is None
    fitted = fit_recurrence(data, 2, 4)
    assert fitted.same_operator(p1x4_operator)


def test_printed_p1x4_operator_fails_at_second_coefficient(p1x4):
    printed = ThetaOperator.from_expr(
        "Theta**4 - 4*z*(5*Theta**2 + 5*Theta + 2)*(2*Theta + 1)"
        " + 64*z**2*(2*Theta + 3)*(2*Theta + 1)*(2*Theta + 2)**2"
    )
    data = diagonal_restrict(product_series(p1x4, 10), (1, 1, 1, 1))
    assert residual_index(printed, data) == 2
    assert apply(printed, data)[2] == 2304
