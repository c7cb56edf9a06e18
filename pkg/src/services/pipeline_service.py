"""Model pipeline: coefficients, operator, q-coordinate, couplings, instantons."""

from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

import structlog
from pydantic import BaseModel

from src.algebra.operator import (
    RecurrenceSpec,
    ThetaOperator,
    fit_recurrence_auto,
    fit_terms_required,
    recurrence_from_coeffs,
    residual_index,
    socle,
)
from src.algebra.series import Series1, SeriesM
from src.config.settings import settings
from src.geometry.catalog import catalog
from src.geometry.families import (
    CIModel,
    HypergeomParams,
    ProductProjModel,
    ToricModel,
    Unfactorable,
    ci_recurrence,
    coefficient_series,
    extract_params,
    two_term_ops,
)
from src.geometry.mirror import mirror_laurent
from src.models.model_config import ModelConfig, ModelKind
from src.models.report import (
    CheckStatus,
    Diagnostic,
    InstantonView,
    OperatorView,
    Report,
    rat_list,
)
from src.services.coupling_service import (
    InstantonReport,
    YukawaFrame,
    instanton,
    match_up_to_sign,
    rational_series,
    yukawa_frame,
)
from src.services.multiparam_service import (
    BiRecurrence,
    biv_q,
    biv_solve,
    diagonal_discriminant,
    discriminant_p2p2,
    printed_discriminant,
    singular_diagonal_points,
)
from src.utils.cache import CoefficientCache
from src.utils.errors import ConfigError, DomainError

logger = structlog.get_logger(__name__)

COMMANDS = (
    "phi0",
    "operator",
    "qcoord",
    "yukawa",
    "instantons",
    "report",
    "catalog",
    "bivariate",
    "discriminant",
)


class RunOptions(BaseModel):
    """Per-invocation overrides of the global settings."""
    terms: Optional[int] = None
    max_degree: Optional[int] = None
    output_format: Optional[str] = None
    cache_dir: Optional[str] = None
    compare_printed: bool = False

    class Config:
        extra = "forbid"


def series_m_view(F: SeriesM) -> Dict[str, str]:
    return {",".join(str(e) for e in exponent): str(v) for exponent, v in F.items()}


def _prefix_check(name: str, computed: List[Fraction], printed: List[str]) -> Diagnostic:
    n = min(len(computed), len(printed))
    expected = [Fraction(p) for p in printed[:n]]
    for i, (c, p) in enumerate(zip(computed, expected)):
        if c != p:
            return Diagnostic(
                check=name,
                status=CheckStatus.MISMATCH,
                detail=f"index {i}: computed {c}, printed {p}",
            )
    return Diagnostic(check=name, status=CheckStatus.MATCH, detail=f"{n} values")


class PipelineService:
    """Lazily evaluated pipeline stages for one model config."""

    def __init__(self, config: ModelConfig, options: Optional[RunOptions] = None):
        self.config = config
        self.options = options or RunOptions()
        self.depth = self.options.max_degree or settings.instanton_depth
        terms = self.options.terms or config.terms or settings.series_terms
        self.terms = max(terms, self.depth)
        cache_dir = self.options.cache_dir or settings.cache_dir
        self.cache = CoefficientCache(cache_dir) if cache_dir else None
        self.family = config.to_family()

    # stages

    @property
    def W0(self) -> Fraction:
        if self.config.W0 is not None:
            return self.config.W0
        if self.family is not None and self.family.W0 is not None:
            return self.family.W0
        raise ConfigError("normalization_W0 is required for this model")

    def coefficients(self, N: int) -> Series1:
        """a_0..a_N of the pipeline series."""
        if self.config.kind == ModelKind.EXPLICIT_RECURRENCE:
            if self.config.coefficients is not None:
                data = Series1.of(self.config.coefficients)
                return data if data.order <= N else data.truncate(N)
            return socle(self.constructed_operator, 1, N)
        if self.cache is None:
            return coefficient_series(self.family, N)
        return self.cache.series(
            self.config, N, lambda order, prefix: coefficient_series(self.family, order, prefix)
        )

    @cached_property
    def constructed_operator(self) -> Optional[ThetaOperator]:
        """Operator known in closed form, without fitting."""
        if isinstance(self.family, CIModel):
            return ci_recurrence(self.family)
        if isinstance(self.family, HypergeomParams):
            return two_term_ops(self.family)
        if self.config.recurrence is not None:
            return recurrence_from_coeffs(self.config.recurrence)
        if self.config.operator is not None:
            return ThetaOperator.from_expr(self.config.operator).normalized().to_recurrence()
        return None

    @cached_property
    def fit_data(self) -> Series1:
        required = fit_terms_required(settings.fit_max_m, settings.fit_order, settings.fit_margin)
        return self.coefficients(max(self.terms, required))

    @cached_property
    def fitted_operator(self) -> Optional[RecurrenceSpec]:
        """MU recurrence recovered from coefficient data (None without data)."""
        if self.config.kind == ModelKind.EXPLICIT_RECURRENCE and self.config.coefficients is None:
            return None
        spec = fit_recurrence_auto(
            self.fit_data,
            order=settings.fit_order,
            max_m=settings.fit_max_m,
            margin=settings.fit_margin,
        )
        logger.info("operator fitted", model=self.config.name, m=spec.m, order=spec.order)
        return spec

    @property
    def operator(self) -> Tuple[ThetaOperator, str]:
        constructed = self.constructed_operator
        if constructed is not None:
            return constructed, "constructed"
        return self.fitted_operator, "fitted"

    @cached_property
    def phi0(self) -> Series1:
        if self.config.kind == ModelKind.EXPLICIT_RECURRENCE and self.config.coefficients is None:
            return self.coefficients(self.terms)
        data = self.coefficients(self.terms)
        if data.order < self.terms:
            raise DomainError(f"coefficients given to order {data.order}, need {self.terms}")
        return data

    @cached_property
    def frame(self) -> YukawaFrame:
        op, _ = self.operator
        return yukawa_frame(op, self.W0, self.terms, phi0=self.phi0)

    @cached_property
    def instantons(self) -> InstantonReport:
        return instanton(self.frame.K_q, dim=self.frame.dim, D=self.depth)

    # printed comparisons

    def diagnostics(self, stages: Tuple[str, ...]) -> List[Diagnostic]:
        printed = self.config.printed
        out: List[Diagnostic] = []
        op, _ = self.operator
        data = self.phi0
        bad = residual_index(op, data)
        out.append(
            Diagnostic(
                check="operator_annihilates_phi0",
                status=CheckStatus.MATCH if bad is None else CheckStatus.MISMATCH,
                detail=None if bad is None else f"residual at n = {bad}",
            )
        )
        if printed is None:
            return out
        if "operator" in stages:
            out.extend(self._operator_checks(op))
        if "yukawa" in stages:
            out.extend(self._coupling_checks())
        if "qcoord" in stages and printed.z_of_q:
            out.append(_prefix_check("z_of_q", self.frame.z_of_q.head(), printed.z_of_q))
        if "instantons" in stages:
            if printed.k_q:
                out.append(_prefix_check("K_q", self.frame.K_q.head(), printed.k_q))
            if printed.instantons:
                out.append(_prefix_check("instantons", list(self.instantons.n), printed.instantons))
        for diagnostic in out:
            if diagnostic.status == CheckStatus.MISMATCH:
                logger.warning(
                    "printed value mismatch",
                    model=self.config.name,
                    check=diagnostic.check,
                    detail=diagnostic.detail,
                )
        return out

    def _operator_checks(self, op: ThetaOperator) -> List[Diagnostic]:
        printed = self.config.printed
        out = []
        if printed.operator:
            candidate = ThetaOperator.from_expr(printed.operator)
            bad = residual_index(candidate, self.phi0)
            if bad is not None:
                status, detail = CheckStatus.MISMATCH, f"printed operator fails at n = {bad}"
            elif op.same_operator(candidate):
                status, detail = CheckStatus.MATCH, None
            else:
                status, detail = CheckStatus.MISMATCH, "printed operator differs from the computed one"
            out.append(Diagnostic(check="operator", status=status, detail=detail))
        if printed.W0 is not None:
            family_w0 = self.family.W0 if self.family is not None else self.W0
            expected = Fraction(printed.W0)
            out.append(
                Diagnostic(
                    check="W0",
                    status=CheckStatus.MATCH if family_w0 == expected else CheckStatus.MISMATCH,
                    detail=f"derived {family_w0}, printed {expected}",
                )
            )
        if printed.alpha is not None or printed.mu is not None:
            params = extract_params(op.to_recurrence(), W0=self.W0) if op.m == 1 else None
            if params is None or isinstance(params, Unfactorable):
                out.append(
                    Diagnostic(check="alpha_mu", status=CheckStatus.MISMATCH, detail="not a two-term operator")
                )
            else:
                if printed.alpha is not None:
                    expected = sorted(Fraction(a) for a in printed.alpha)
                    out.append(
                        Diagnostic(
                            check="alpha",
                            status=CheckStatus.MATCH if list(params.alpha) == expected else CheckStatus.MISMATCH,
                            detail=", ".join(rat_list(params.alpha)),
                        )
                    )
                if printed.mu is not None:
                    expected_mu = Fraction(printed.mu)
                    out.append(
                        Diagnostic(
                            check="mu",
                            status=CheckStatus.MATCH if params.mu == expected_mu else CheckStatus.MISMATCH,
                            detail=f"derived {params.mu}, printed {expected_mu}",
                        )
                    )
        return out

    def _coupling_checks(self) -> List[Diagnostic]:
        printed = self.config.printed
        out = []
        if printed.c_d:
            expected = rational_series(printed.c_d, self.terms)
            status = CheckStatus.MATCH if self.frame.C_d == expected else CheckStatus.MISMATCH
            out.append(Diagnostic(check="C_d", status=status))
        if printed.coupling:
            expected = rational_series(printed.coupling, self.terms)
            sign = match_up_to_sign(self.frame.W, expected)
            if sign == 1:
                status, detail = CheckStatus.MATCH, None
            elif sign == -1:
                status, detail = CheckStatus.MATCH_UP_TO_SIGN, "printed closed form has the opposite sign"
            else:
                status, detail = CheckStatus.MISMATCH, None
            out.append(Diagnostic(check="coupling", status=status, detail=detail))
        return out

    # command payloads

    def _operator_payload(self) -> Dict[str, Any]:
        op, source = self.operator
        payload: Dict[str, Any] = {"operator": OperatorView.build(op, source).model_dump(mode="json")}
        if source == "constructed" and self.config.kind != ModelKind.EXPLICIT_RECURRENCE:
            fitted = self.fitted_operator
            payload["fitted_operator"] = OperatorView.build(fitted, "fitted").model_dump(mode="json")
            payload["fit_agrees"] = fitted.same_operator(op.to_theta())
        return payload

    def _instanton_view(self) -> InstantonView:
        report = self.instantons
        return InstantonView(
            n0=str(report.n0),
            gamma=rat_list(report.gamma),
            n=rat_list(report.n),
            integral=list(report.integral),
            nonnegative=list(report.nonnegative),
        )

    def report(self) -> Report:
        frame = self.frame
        op, source = self.operator
        fitted = None
        if source == "constructed" and self.config.kind != ModelKind.EXPLICIT_RECURRENCE:
            fitted = OperatorView.build(self.fitted_operator, "fitted")
        instantons = self._instanton_view() if frame.dim == 3 else None
        stages = ("operator", "yukawa", "qcoord", "instantons")
        return Report(
            model=self.config.name,
            kind=self.config.kind.value,
            dim=frame.dim,
            W0=str(self.W0),
            terms=self.terms,
            config=self.config.model_dump(mode="json", exclude_none=True, exclude={"printed"}),
            phi0=rat_list(frame.phi0),
            operator=OperatorView.build(op, source),
            fitted_operator=fitted,
            psi=rat_list(frame.psi),
            q_of_z=rat_list(frame.q_of_z),
            z_of_q=rat_list(frame.z_of_q),
            C_d=rat_list(frame.C_d),
            W=rat_list(frame.W),
            K_z=rat_list(frame.K_z),
            K_q=rat_list(frame.K_q),
            instantons=instantons,
            mirror_laurent=mirror_laurent(self.family) if isinstance(self.family, ToricModel) else None,
            diagnostics=self.diagnostics(stages) if self.options.compare_printed else [],
        )

    def bivariate(self) -> Dict[str, Any]:
        if not isinstance(self.family, ProductProjModel):
            raise ConfigError("bivariate needs a product_projective model with two factors")
        rec = BiRecurrence.from_product_model(self.family)
        solution = biv_solve(rec, self.depth)
        q = biv_q(solution.phi0, solution.psi1, solution.psi2)
        return {
            "degree": self.depth,
            "phi0": series_m_view(solution.phi0),
            "psi1": series_m_view(solution.psi1),
            "psi2": series_m_view(solution.psi2),
            "q1": series_m_view(q.q1),
            "q2": series_m_view(q.q2),
            "all_integral": q.all_integral,
            "failures": [
                {"q": j, "exponent": ",".join(map(str, e)), "value": str(v)} for j, e, v in q.failures
            ],
        }

    def payload(self, command: str) -> Dict[str, Any]:
        """
        Serializable output of one command.

        Args:
            command: one of COMMANDS other than catalog and discriminant

        Returns:
            Dict headed by the model name; with compare_printed set it also
            carries the diagnostics of that command's stage

        Raises:
            ConfigError: unknown command
        """
        head: Dict[str, Any] = {"model": self.config.name}
        if command == "phi0":
            body = {"terms": self.terms, "phi0": rat_list(self.phi0)}
        elif command == "operator":
            body = self._operator_payload()
        elif command == "qcoord":
            frame = self.frame
            body = {
                "terms": self.terms,
                "psi": rat_list(frame.psi),
                "q_of_z": rat_list(frame.q_of_z),
                "z_of_q": rat_list(frame.z_of_q),
            }
        elif command == "yukawa":
            frame = self.frame
            body = {
                "terms": self.terms,
                "C_d": rat_list(frame.C_d),
                "W": rat_list(frame.W),
                "K_z": rat_list(frame.K_z),
                "K_q": rat_list(frame.K_q),
                "J": rat_list(frame.J),
            }
        elif command == "instantons":
            body = {
                "K_q": rat_list(self.frame.K_q.head(self.depth + 1)),
                "instantons": self._instanton_view().model_dump(mode="json"),
            }
        elif command == "report":
            return self.report().model_dump(mode="json")
        elif command == "bivariate":
            body = self.bivariate()
        else:
            raise ConfigError(f"unknown command: {command}", allowed=",".join(COMMANDS))
        if self.options.compare_printed and command != "bivariate":
            body["diagnostics"] = [d.model_dump(mode="json") for d in self.diagnostics((command,))]
        return {**head, **body}


def catalog_payload() -> Dict[str, Any]:
    models = []
    for key, config in catalog().items():
        family = config.to_family()
        W0 = config.W0 if config.W0 is not None else family.W0
        models.append({"name": key, "kind": config.kind.value, "dim": config.dim, "W0": str(W0)})
    return {"models": models}


def discriminant_payload() -> Dict[str, Any]:
    disc = discriminant_p2p2()
    printed = printed_discriminant()
    return {
        "discriminant": str(disc.as_expr()),
        "diagonal": str(diagonal_discriminant(disc).as_expr().factor()),
        "singular_points": rat_list(singular_diagonal_points(disc)),
        "printed": str(printed.as_expr()),
        "matches_printed": disc == printed,
        "printed_singular_points": rat_list(singular_diagonal_points(printed)),
    }


def execute(config: Optional[ModelConfig], command: str, options: Optional[RunOptions] = None) -> Dict[str, Any]:
    """Payload of a command; raises MirrorError subclasses on failure."""
    if command == "catalog":
        return catalog_payload()
    if command == "discriminant":
        return discriminant_payload()
    if config is None:
        raise ConfigError(f"command {command} needs --model or --config")
    logger.debug("running command", model=config.name, command=command)
    return PipelineService(config, options).payload(command)

