from fractions import Fraction
from math import comb, factorial

import pytest

from src.algebra.operator import ThetaOperator, residual_index
from src.algebra.series import Series1
from src.geometry.catalog import catalog, get_model
from src.geometry.families import coefficient_series
from src.models.model_config import ModelConfig, ModelKind
from src.models.report import CheckStatus
from src.services.coupling_service import rational_series
from src.services.pipeline_service import PipelineService, RunOptions, execute
from src.utils.errors import ConfigError, NoFit
from tests.conftest import P1X4_OPERATOR, QUINTIC_INSTANTONS

PRODUCT_KEYS = [key for key, config in catalog().items() if config.kind == ModelKind.PRODUCT_PROJECTIVE]


def _statuses(diagnostics):
    return {d.check: d.status for d in diagnostics}


def _service(key, **options):
    options.setdefault("compare_printed", True)
    return PipelineService(get_model(key), RunOptions(**options))


def test_quintic_chain():
    service = _service("quintic", terms=12)
    report = service.report()
    assert report.operator.source == "constructed"
    assert report.operator.is_mu and report.operator.m == 1
    assert report.fitted_operator is not None
    assert report.q_of_z[:3] == ["0", "1", "770"]
    assert report.instantons.n == [str(n) for n in QUINTIC_INSTANTONS]
    frame = service.frame
    phi0 = frame.phi0.truncate(10)
    expected = Series1.constant(5, 10) / (Series1.of([1, -3125], 10) * phi0 * phi0)
    assert frame.K_z.truncate(10) == expected
    assert CheckStatus.MISMATCH not in _statuses(report.diagnostics).values()


def test_quintic_operator_payload_reports_fit_agreement():
    payload = execute(get_model("quintic"), "operator")
    assert payload["fit_agrees"] is True
    assert payload["operator"]["m"] == 1
    assert payload["operator"]["is_mu"] is True


def test_p2xp2_diagonal_tables():
    service = _service("p2xp2-diagonal", terms=12)
    data = service.coefficients(15)
    for n in range(16):
        assert data[n] == Fraction(factorial(3 * n), factorial(n) ** 3) * sum(
            comb(n, k) ** 3 for k in range(n + 1)
        )
    frame = service.frame
    assert frame.z_of_q.head(6) == [0, 1, -48, -18, 7976, -1697115]
    assert frame.K_q.head(6) == [18, 378, 69498, 7724862, 1030043898, 132082090128]
    assert service.instantons.n[0] == 378
    op, source = service.operator
    assert source == "fitted" and op.m == 2
    statuses = _statuses(service.diagnostics(("operator", "yukawa", "qcoord", "instantons")))
    assert statuses["operator"] == CheckStatus.MATCH
    assert statuses["C_d"] == CheckStatus.MATCH
    assert statuses["z_of_q"] == CheckStatus.MATCH


def test_p1x4_diagonal_tables():
    service = _service("p1x4-diagonal", terms=12)
    op, _ = service.operator
    assert residual_index(op, coefficient_series(service.family, 40)) is None
    assert op.same_operator(ThetaOperator.from_expr(P1X4_OPERATOR))
    assert [int(n) for n in service.instantons.n] == [192, 960, 10304, 147456, 2520576]
    statuses = _statuses(service.report().diagnostics)
    assert statuses["operator"] == CheckStatus.MISMATCH
    assert statuses["coupling"] in (CheckStatus.MATCH, CheckStatus.MATCH_UP_TO_SIGN)
    assert statuses["K_q"] == CheckStatus.MATCH


@pytest.mark.parametrize("key", PRODUCT_KEYS)
def test_product_instanton_tables(key):
    config = get_model(key)
    depth = len(config.printed.instantons)
    service = _service(key, terms=max(12, depth), max_degree=depth)
    assert [str(n) for n in service.instantons.n] == config.printed.instantons
    statuses = _statuses(service.diagnostics(("instantons",)))
    assert statuses["K_q"] == CheckStatus.MATCH
    assert statuses["instantons"] == CheckStatus.MATCH
    assert all(service.instantons.integral)


def test_abelian_model_has_constant_coupling():
    service = _service("p2x3-abelian", terms=10, max_degree=10)
    assert service.frame.K_q == Series1.constant(162, 10)
    assert list(service.instantons.n) == [0] * 10


@pytest.mark.parametrize("key", ["p1x4-diagonal", "p3xp3-22-11-11", "p3xp3-11-12-21", "p3xp3-11-30-03"])
def test_closed_form_couplings_match_up_to_sign(key):
    statuses = _statuses(_service(key, terms=12).diagnostics(("yukawa",)))
    assert statuses["coupling"] != CheckStatus.MISMATCH


@pytest.mark.parametrize("key", ["p3xp3-22-11-11", "p4xp4-11x5", "p2x3-111", "p4xp4-20x2-02x2-11"])
def test_misprinted_operators_are_flagged(key):
    statuses = _statuses(_service(key, terms=12).diagnostics(("operator",)))
    assert statuses["operator"] == CheckStatus.MISMATCH
    assert statuses["operator_annihilates_phi0"] == CheckStatus.MATCH


def test_misprinted_operator_fails_at_first_coefficient():
    diagnostics = _service("p4xp4-20x2-02x2-11", terms=12).diagnostics(("operator",))
    operator = next(d for d in diagnostics if d.check == "operator")
    assert operator.detail == "printed operator fails at n = 1"


def test_misprinted_coupling_numerator_is_flagged():
    service = _service("p2x3-111", terms=12)
    statuses = _statuses(service.diagnostics(("yukawa",)))
    assert statuses["coupling"] == CheckStatus.MISMATCH
    corrected = rational_series("(90 - 162*z)/((1 - 27*z)*(1 + 27*z**2))", 12)
    assert service.frame.W == corrected


@pytest.mark.parametrize("key", ["p21111", "p41111", "p52111"])
def test_weighted_mu_mismatch_is_flagged(key):
    statuses = _statuses(_service(key).diagnostics(("operator",)))
    assert statuses["mu"] == CheckStatus.MISMATCH
    assert statuses["alpha"] == CheckStatus.MATCH
    assert statuses["W0"] == CheckStatus.MATCH


@pytest.mark.parametrize("key", ["v44-p111122", "v66-p112233", "v34-p111112", "v26-p111113", "v46-p111223"])
def test_weighted_complete_intersections_match(key):
    statuses = _statuses(_service(key).diagnostics(("operator",)))
    assert set(statuses.values()) == {CheckStatus.MATCH}


def test_v2222_alpha_mismatch_is_flagged():
    statuses = _statuses(_service("v2222").diagnostics(("operator",)))
    assert statuses["alpha"] == CheckStatus.MISMATCH
    assert statuses["mu"] == CheckStatus.MATCH


def test_toric_quintic_reproduces_instantons():
    service = _service("quintic-toric", terms=12)
    assert [int(n) for n in service.instantons.n] == QUINTIC_INSTANTONS
    report = service.report()
    assert report.mirror_laurent is not None
    assert report.fitted_operator is None


def test_toric_p2xp2_matches_product_pipeline():
    toric = _service("p2xp2-toric", terms=12)
    product = _service("p2xp2-diagonal", terms=12)
    assert toric.phi0 == product.phi0
    assert toric.frame.K_q == product.frame.K_q


def test_two_term_config():
    config = ModelConfig(
        name="g", kind="two_term", alpha=["1/5", "2/5", "3/5", "4/5"], mu=3125, normalization_W0=5
    )
    payload = execute(config, "instantons", RunOptions(terms=8))
    assert payload["instantons"]["n"][:2] == ["2875", "609250"]


def test_explicit_recurrence_config():
    config = ModelConfig(
        name="r",
        kind="explicit_recurrence",
        operator="Theta**4 - 5*z*(5*Theta + 1)*(5*Theta + 2)*(5*Theta + 3)*(5*Theta + 4)",
        normalization_W0=5,
    )
    payload = execute(config, "qcoord", RunOptions(terms=6))
    assert payload["q_of_z"][:3] == ["0", "1", "770"]


def test_explicit_coefficients_are_fitted(quintic):
    data = [str(quintic.coefficient(n)) for n in range(31)]
    config = ModelConfig(name="c", kind="explicit_recurrence", coefficients=data, normalization_W0=5)
    payload = execute(config, "operator")
    assert payload["operator"]["source"] == "fitted"
    assert payload["operator"]["m"] == 1


def test_unstructured_coefficients_do_not_fit():
    config = ModelConfig(
        name="junk",
        kind="explicit_recurrence",
        coefficients=[1, 3, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9],
        normalization_W0=1,
    )
    with pytest.raises(NoFit):
        execute(config, "instantons", RunOptions(terms=10))


def test_bivariate_payload():
    payload = execute(get_model("p2xp2-diagonal"), "bivariate", RunOptions(max_degree=4))
    assert payload["phi0"]["1,1"] == "720"
    assert payload["psi1"]["1,0"] == "15"
    assert payload["all_integral"] is True


def test_bivariate_needs_a_product_model():
    with pytest.raises(ConfigError):
        execute(get_model("quintic"), "bivariate")


def test_catalog_and_discriminant_payloads():
    models = execute(None, "catalog")["models"]
    assert len(models) == 25
    assert models[0] == {"name": "quintic", "kind": "complete_intersection", "dim": 3, "W0": "5"}
    disc = execute(None, "discriminant")
    assert disc["matches_printed"] is False
    assert disc["singular_points"] == ["-1/27", "1/216"]


def test_commands_need_a_model():
    with pytest.raises(ConfigError):
        execute(None, "phi0")
