"""Model configuration schema."""

import hashlib
import json
from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional

from pydantic import BaseModel, field_validator, model_validator

from src.geometry.families import (
    CIModel,
    Family,
    HypergeomParams,
    ProductProjModel,
    ToricModel,
)
from src.utils.errors import ModelError


class ModelKind(str, Enum):
    """Model family enumeration."""
    COMPLETE_INTERSECTION = "complete_intersection"
    WEIGHTED_CI = "weighted_ci"
    PRODUCT_PROJECTIVE = "product_projective"
    TORIC = "toric"
    EXPLICIT_RECURRENCE = "explicit_recurrence"
    TWO_TERM = "two_term"


def _rational_text(value: Any) -> str:
    if isinstance(value, bool):
        raise ValueError("expected a rational, got a boolean")
    try:
        return str(Fraction(str(value).strip()))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not an exact rational: {value!r}")


class PrintedData(BaseModel):
    """Reference values a model is compared against with --compare-printed."""
    operator: Optional[str] = None
    coupling: Optional[str] = None  # rational function in z, compared to W
    c_d: Optional[str] = None
    z_of_q: Optional[List[str]] = None
    k_q: Optional[List[str]] = None
    instantons: Optional[List[str]] = None
    alpha: Optional[List[str]] = None
    mu: Optional[str] = None
    W0: Optional[str] = None

    class Config:
        extra = "forbid"

    @field_validator("z_of_q", "k_q", "instantons", "alpha", mode="before")
    @classmethod
    def _rational_lists(cls, v):
        return None if v is None else [_rational_text(x) for x in v]

    @field_validator("mu", "W0", mode="before")
    @classmethod
    def _rational(cls, v):
        return None if v is None else _rational_text(v)


_REQUIRED = {
    ModelKind.COMPLETE_INTERSECTION: ("degrees",),
    ModelKind.WEIGHTED_CI: ("degrees", "weights"),
    ModelKind.PRODUCT_PROJECTIVE: ("factor_dims", "multidegrees"),
    ModelKind.TORIC: ("generators", "partition", "mori_basis", "normalization_W0"),
    ModelKind.EXPLICIT_RECURRENCE: ("normalization_W0",),
    ModelKind.TWO_TERM: ("alpha", "mu", "normalization_W0"),
}


class ModelConfig(BaseModel):
    """Declarative description of one Calabi-Yau model."""
    name: str
    kind: ModelKind
    dim: int = 3
    normalization_W0: Optional[str] = None
    terms: Optional[int] = None

    # complete_intersection, weighted_ci
    degrees: Optional[List[int]] = None
    weights: Optional[List[int]] = None

    # product_projective
    factor_dims: Optional[List[int]] = None
    multidegrees: Optional[List[List[int]]] = None
    diagonal_weights: Optional[List[int]] = None

    # toric
    generators: Optional[List[List[int]]] = None
    partition: Optional[List[List[int]]] = None
    mori_basis: Optional[List[List[int]]] = None

    # explicit_recurrence: exactly one of the three
    recurrence: Optional[List[List[str]]] = None
    operator: Optional[str] = None
    coefficients: Optional[List[str]] = None

    # two_term
    alpha: Optional[List[str]] = None
    mu: Optional[str] = None

    printed: Optional[PrintedData] = None

    class Config:
        extra = "forbid"

    @field_validator("normalization_W0", "mu", mode="before")
    @classmethod
    def _rational(cls, v):
        return None if v is None else _rational_text(v)

    @field_validator("alpha", "coefficients", mode="before")
    @classmethod
    def _rational_list(cls, v):
        return None if v is None else [_rational_text(x) for x in v]

    @field_validator("recurrence", mode="before")
    @classmethod
    def _rational_table(cls, v):
        return None if v is None else [[_rational_text(x) for x in row] for row in v]

    @field_validator("dim")
    @classmethod
    def _dimension(cls, v):
        if v < 1:
            raise ValueError("dim must be positive")
        return v

    @field_validator("terms")
    @classmethod
    def _terms(cls, v):
        if v is not None and v < 1:
            raise ValueError("terms must be positive")
        return v

    @model_validator(mode="after")
    def _check_payload(self):
        missing = [f for f in _REQUIRED[self.kind] if getattr(self, f) is None]
        if missing:
            raise ValueError(f"{self.kind.value} config needs {', '.join(missing)}")
        if self.kind == ModelKind.EXPLICIT_RECURRENCE:
            given = [f for f in ("recurrence", "operator", "coefficients") if getattr(self, f)]
            if len(given) != 1:
                raise ValueError(
                    "explicit_recurrence config needs exactly one of recurrence, operator, coefficients"
                )
        # Calabi-Yau and lattice conditions
        try:
            self.to_family()
        except ModelError as exc:
            raise ValueError(exc.message)
        return self

    @property
    def W0(self) -> Optional[Fraction]:
        return None if self.normalization_W0 is None else Fraction(self.normalization_W0)

    def to_family(self) -> Optional[Family]:
        """Domain model for the config; None for explicit recurrences."""
        if self.kind in (ModelKind.COMPLETE_INTERSECTION, ModelKind.WEIGHTED_CI):
            weights = tuple(self.weights) if self.weights else None
            return CIModel(tuple(self.degrees), dim=self.dim, weights=weights, W0=self.W0)
        if self.kind == ModelKind.PRODUCT_PROJECTIVE:
            model = ProductProjModel(
                tuple(self.factor_dims),
                tuple(tuple(row) for row in self.multidegrees),
                diagonal_weights=tuple(self.diagonal_weights) if self.diagonal_weights else None,
                W0=self.W0,
            )
            if model.dim != self.dim:
                raise ModelError(f"dim: multidegrees cut out a {model.dim}-fold, config says {self.dim}")
            return model
        if self.kind == ModelKind.TORIC:
            model = ToricModel(
                tuple(tuple(v) for v in self.generators),
                tuple(tuple(p) for p in self.partition),
                tuple(tuple(lam) for lam in self.mori_basis),
                W0=self.W0,
                diagonal_weights=tuple(self.diagonal_weights) if self.diagonal_weights else None,
            )
            if model.dim != self.dim:
                raise ModelError(f"dim: toric data describe a {model.dim}-fold, config says {self.dim}")
            return model
        if self.kind == ModelKind.TWO_TERM:
            params = HypergeomParams(tuple(self.alpha), Fraction(self.mu), W0=self.W0)
            if params.dim != self.dim:
                raise ModelError(f"alpha: {len(self.alpha)} exponents do not match dim {self.dim}")
            return params
        return None

    def config_hash(self) -> str:
        """sha256 of the config without truncation and printed reference data."""
        payload = self.model_dump(mode="json", exclude={"terms", "printed"}, exclude_none=True)
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()
