"""Shared fixtures."""

import random
from fractions import Fraction

import pytest
from click.testing import CliRunner

from src.algebra.operator import ThetaOperator
from src.algebra.series import Series1
from src.geometry.catalog import get_model
from src.geometry.families import CIModel, ProductProjModel, ci_recurrence

QUINTIC_OPERATOR = "Theta**4 - 5*z*(5*Theta + 1)*(5*Theta + 2)*(5*Theta + 3)*(5*Theta + 4)"

# P1^4 diagonal operator annihilating the series (the printed one lacks a factor 2*Theta + 1)
P1X4_OPERATOR = (
    "Theta**4 - 4*z*(2*Theta + 1)**2*(5*Theta**2 + 5*Theta + 2)"
    " + 256*z**2*(Theta + 1)**2*(2*Theta + 1)*(2*Theta + 3)"
)

P2XP2_OPERATOR = (
    "Theta**4 - 3*z*(7*Theta**2 + 7*Theta + 2)*(3*Theta + 1)*(3*Theta + 2)"
    " - 72*z**2*(3*Theta + 5)*(3*Theta + 4)*(3*Theta + 2)*(3*Theta + 1)"
)

QUINTIC_INSTANTONS = [2875, 609250, 317206375, 242467530000, 229305888887625]


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def quintic():
    return CIModel((5,))


@pytest.fixture
def quintic_spec(quintic):
    return ci_recurrence(quintic)


@pytest.fixture
def p2xp2():
    return ProductProjModel((2, 2), ((3, 3),))


@pytest.fixture
def p1x4():
    return ProductProjModel((1, 1, 1, 1), ((2, 2, 2, 2),))


@pytest.fixture
def p1x4_operator():
    return ThetaOperator.from_expr(P1X4_OPERATOR)


@pytest.fixture
def p2xp2_operator():
    return ThetaOperator.from_expr(P2XP2_OPERATOR)


@pytest.fixture
def quintic_config():
    return get_model("quintic")


@pytest.fixture
def cache_dir(tmp_path):
    return tmp_path / "cache"


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


def random_series(rng: random.Random, order: int, constant: int = 0, lo: int = -5, hi: int = 5) -> Series1:
    values = [Fraction(constant)] + [Fraction(rng.randint(lo, hi), rng.randint(1, 4)) for _ in range(order)]
    return Series1(tuple(values))
