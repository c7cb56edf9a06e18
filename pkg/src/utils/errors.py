"""Exception hierarchy shared by the library and the CLI."""

from typing import Any, Dict, Optional


VALIDATION_EXIT_CODE = 1
COMPUTATION_EXIT_CODE = 2


class MirrorError(Exception):
    """Base class for every error raised by the pipeline."""

    code = "MIRROR_ERROR"
    exit_code = COMPUTATION_EXIT_CODE

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_envelope(self) -> Dict[str, Any]:
        """Error payload printed by the CLI."""
        error: Dict[str, Any] = {"code": self.code, "message": self.message}
        if self.context:
            error["context"] = {key: str(value) for key, value in sorted(self.context.items())}
        return {"error": error}


# Validation errors (exit code 1)

class ConfigError(MirrorError):
    """Model config cannot be parsed or names an unknown model."""

    code = "CONFIG_ERROR"
    exit_code = VALIDATION_EXIT_CODE


class ModelError(MirrorError):
    """Model data violates the Calabi-Yau condition or a lattice relation."""

    code = "MODEL_ERROR"
    exit_code = VALIDATION_EXIT_CODE


# Computation errors (exit code 2)

class NotAUnit(MirrorError):
    """Division by a series whose constant term vanishes."""

    code = "NOT_A_UNIT"


class DomainError(MirrorError):
    """Series precondition (valuation, constant term) violated."""

    code = "DOMAIN_ERROR"


class NonsolvableRecurrence(MirrorError):
    """Leading recurrence polynomial vanishes at a positive index."""

    code = "NONSOLVABLE_RECURRENCE"

    def __init__(self, message: str, index: int, **context: Any):
        super().__init__(message, index=index, **context)
        self.index = index


class NoFit(MirrorError):
    """No recurrence of the requested shape annihilates the data."""

    code = "NO_FIT"

    def __init__(self, message: str, minimum_terms: Optional[int] = None, **context: Any):
        if minimum_terms is not None:
            context["minimum_terms"] = minimum_terms
        super().__init__(message, **context)
        self.minimum_terms = minimum_terms


class AmbiguousFit(MirrorError):
    """Fit nullspace has dimension greater than one."""

    code = "AMBIGUOUS_FIT"

    def __init__(self, message: str, dimension: int, **context: Any):
        super().__init__(message, dimension=dimension, **context)
        self.dimension = dimension


class NotPicardFuchs(MirrorError):
    """Leading coefficient A_{d+1} vanishes at z = 0."""

    code = "NOT_PICARD_FUCHS"


class UnsupportedDimension(MirrorError):
    """Instanton expansion requested for a dimension other than 3."""

    code = "UNSUPPORTED_DIMENSION"


class InconsistentSystem(MirrorError):
    """Two operators of a multi-parameter system disagree on a coefficient."""

    code = "INCONSISTENT_SYSTEM"
