"""Report models emitted by the CLI.

Field order of every model is the serialization order; rationals are
canonical "p" or "p/q" strings.
"""

from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

from pydantic import BaseModel

from src.algebra.operator import AnyForm, classify
from src.algebra.rational import format_rat, poly_coeffs


class CheckStatus(str, Enum):
    """Outcome of a comparison against printed data."""
    MATCH = "match"
    MATCH_UP_TO_SIGN = "match_up_to_sign"
    MISMATCH = "mismatch"


def rat_list(values: Iterable[Fraction]) -> List[str]:
    return [format_rat(v) for v in values]


class OperatorView(BaseModel):
    """One operator in recurrence and Theta form."""
    source: str
    m: int
    order: int
    recurrence: List[List[str]]
    theta: str
    is_mu: bool
    is_picard_fuchs: bool

    @classmethod
    def build(cls, op: AnyForm, source: str) -> "OperatorView":
        theta = op.to_theta()
        kind = classify(theta)
        return cls(
            source=source,
            m=theta.m,
            order=theta.order,
            recurrence=[rat_list(poly_coeffs(p)) for p in theta.polys],
            theta=theta.text(),
            is_mu=kind.is_mu,
            is_picard_fuchs=kind.is_picard_fuchs,
        )


class InstantonView(BaseModel):
    """Classical term, Gromov-Witten sums and predicted curve counts."""
    n0: str
    gamma: List[str]
    n: List[str]
    integral: List[bool]
    nonnegative: List[bool]


class Diagnostic(BaseModel):
    """One comparison against a printed value."""
    check: str
    status: CheckStatus
    detail: Optional[str] = None


class Report(BaseModel):
    """Full pipeline output for one model."""
    model: str
    kind: str
    dim: int
    W0: str
    terms: int
    config: Dict[str, Any]
    phi0: List[str]
    operator: Optional[OperatorView] = None
    fitted_operator: Optional[OperatorView] = None
    psi: List[str]
    q_of_z: List[str]
    z_of_q: List[str]
    C_d: List[str]
    W: List[str]
    K_z: List[str]
    K_q: List[str]
    instantons: Optional[InstantonView] = None
    mirror_laurent: Optional[List[str]] = None
    diagnostics: List[Diagnostic] = []
