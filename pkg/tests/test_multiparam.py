from fractions import Fraction

import pytest
import sympy
from sympy import Poly, QQ

from src.algebra.operator import log_psi, q_param, residual_index
from src.algebra.series import diagonal_restrict
from src.geometry.families import coefficient_series
from src.services.multiparam_service import (
    L1,
    L2,
    X,
    YV,
    BiRecurrence,
    biv_q,
    biv_solve,
    diagonal_discriminant,
    diagonal_psi,
    discriminant_p2p2,
    operator_residual,
    printed_discriminant,
    psi_residual,
    singular_diagonal_points,
)
from src.utils.errors import InconsistentSystem, ModelError

DEGREE = 8


@pytest.fixture
def rec(p2xp2):
    return BiRecurrence.from_product_model(p2xp2)


@pytest.fixture
def solution(rec):
    return biv_solve(rec, DEGREE)


def test_phi0_coefficients(solution):
    assert solution.phi0[(1, 0)] == 6
    assert solution.phi0[(1, 1)] == 720
    assert solution.phi0[(2, 1)] == 45360


def test_phi0_matches_product_series(solution, p2xp2):
    for l in solution.phi0.exponents():
        assert solution.phi0[l] == p2xp2.coefficient(l)


def test_log_solution_first_coefficients(solution):
    assert solution.psi1[(1, 0)] == 15
    assert solution.psi1[(0, 1)] == 33
    assert solution.psi2[(0, 1)] == 15
    assert solution.psi2[(1, 0)] == 33


def test_log_solutions_are_symmetric(solution):
    for l1, l2 in solution.phi0.exponents():
        assert solution.psi1[(l1, l2)] == solution.psi2[(l2, l1)]


def test_solutions_are_annihilated(rec, solution):
    for residual in operator_residual(rec, solution.phi0):
        assert not residual.terms
    for j in range(2):
        for residual in psi_residual(rec, solution, j):
            assert not residual.terms


def test_q_coordinates_are_integral_and_symmetric(solution):
    q = biv_q(solution.phi0, solution.psi1, solution.psi2)
    assert q.all_integral
    assert q.failures == ()
    assert q.q1[(1, 0)] == 1
    for (l1, l2), value in q.q1.items():
        assert q.q2[(l2, l1)] == value


def test_diagonal_cross_check(solution, p2xp2, p2xp2_operator):
    phi_diag = diagonal_restrict(solution.phi0, (1, 1))
    assert phi_diag == coefficient_series(p2xp2, DEGREE)
    assert residual_index(p2xp2_operator, phi_diag) is None
    psi_diag = diagonal_psi(solution)
    assert psi_diag == log_psi(p2xp2_operator, phi_diag, DEGREE)
    q = biv_q(solution.phi0, solution.psi1, solution.psi2)
    product = diagonal_restrict(q.q1 * q.q2, (1, 1))
    q_diag = q_param(phi_diag, psi_diag).q_of_z
    square = q_diag * q_diag
    n = min(product.order, square.order)
    assert product.truncate(n) == square.truncate(n)


def test_rules_need_two_factors(p1x4):
    with pytest.raises(ModelError):
        BiRecurrence.from_product_model(p1x4)


def test_conflicting_rules_are_reported(rec):
    broken = BiRecurrence(factor_dims=(2, 2), rules=(rec.rules[0], Poly(1, L1, L2, domain=QQ)))
    with pytest.raises(InconsistentSystem):
        biv_solve(broken, 3)


def test_rule_values(rec):
    assert rec.rule(0, (0, 0)) == 6
    assert rec.rule_partial(0, 0, (0, 0)) == 33
    assert rec.power(1) == 3


def test_discriminant():
    disc = discriminant_p2p2()
    expected = Poly((1 - X - YV) ** 3 - 27 * X * YV, X, YV, domain=QQ)
    assert disc == expected
    assert disc.as_expr().subs({X: YV, YV: X}, simultaneous=True).expand() == disc.as_expr().expand()


def test_printed_discriminant_differs():
    assert printed_discriminant() != discriminant_p2p2()


def test_diagonal_discriminant_and_singular_points():
    t = sympy.Symbol("t")
    diagonal = diagonal_discriminant()
    assert diagonal == Poly((1 - 8 * t) * (1 + t) ** 2, t, domain=QQ)
    assert singular_diagonal_points() == [Fraction(-1, 27), Fraction(1, 216)]


def test_singular_points_are_poles_of_the_diagonal_operator(p2xp2_operator):
    leading = p2xp2_operator.to_zform().leading()
    for z in singular_diagonal_points():
        assert leading.eval(sympy.Rational(z.numerator, z.denominator)) == 0
