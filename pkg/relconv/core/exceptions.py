"""
relconv exception hierarchy.

This module defines all custom exceptions raised by the relation kernels,
the structure checkers, the definition-file loader and the CLI.
"""

import logging
from typing import Any, Callable, Optional, TypeVar

logger = logging.getLogger(__name__)


class RelConvError(Exception):
    """Base exception for all relconv errors."""

    def __init__(self, message: str, error_code: Optional[str] = None, context: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.__class__.__name__
        self.context = context or {}

    def __str__(self) -> str:
        if self.context:
            return "%s [%s]: %s" % (self.error_code, self.context, self.message)  # noqa: UP031
        return "%s: %s" % (self.error_code, self.message)  # noqa: UP031


# ============================================================================
# Relation Errors
# ============================================================================


class RelationError(RelConvError):
    """Base class for errors in the finite-set and relation kernels."""

    pass


class CarrierError(RelationError):
    """Raised for duplicate labels, unknown labels or carriers above the size cap."""

    def __init__(self, message: str, label: Optional[str] = None, size: Optional[int] = None, **kwargs: Any):
        context = kwargs.pop("context", {})
        if label is not None:
            context["label"] = label
        if size is not None:
            context["size"] = size
        super().__init__(message, context=context, **kwargs)


class RelationArityError(RelationError):
    """Raised when factor lists of two relations do not line up."""

    def __init__(self, message: str, position: Optional[int] = None, **kwargs: Any):
        context = kwargs.pop("context", {})
        if position is not None:
            context["position"] = position
        super().__init__(message, context=context, **kwargs)
        self.position = position


# ============================================================================
# Structure Errors
# ============================================================================


class StructureError(RelConvError):
    """Base class for malformed groups, groupoids and actions."""

    def __init__(self, message: str, witness: Optional[tuple[Any, ...]] = None, **kwargs: Any):
        context = kwargs.pop("context", {})
        if witness is not None:
            context["witness"] = witness
        super().__init__(message, context=context, **kwargs)
        self.witness = witness


class InvalidGroupoidTableError(StructureError):
    """Raised when a groupoid table violates a groupoid law."""

    def __init__(self, message: str, law: Optional[str] = None, **kwargs: Any):
        context = kwargs.pop("context", {})
        if law:
            context["law"] = law
        super().__init__(message, context=context, **kwargs)
        self.law = law


class NotASubgroupError(StructureError):
    """Raised when a subset of a group is not a subgroup."""

    pass


class NotNormalError(StructureError):
    """Raised when a subgroup is not normal; the witness is a conjugation pair."""

    pass


class ActionAxiomError(StructureError):
    """Raised when a map G x X -> X is not a group action."""

    pass


class NotAnEquivalenceError(StructureError):
    """Raised when a relation expected to be an equivalence is not one."""

    pass


class InvalidArgumentError(StructureError):
    """Raised for out-of-range generator parameters."""

    pass


# ============================================================================
# Axiom Errors
# ============================================================================


class AxiomViolationError(RelConvError):
    """Raised when a relational groupoid fails one of its axioms."""

    def __init__(
        self, message: str, axiom: Optional[str] = None, witness: Optional[tuple[Any, ...]] = None, **kwargs: Any
    ):
        context = kwargs.pop("context", {})
        if axiom:
            context["axiom"] = axiom
        if witness is not None:
            context["witness"] = witness
        super().__init__(message, context=context, **kwargs)
        self.axiom = axiom
        self.witness = witness


# ============================================================================
# Reduction Errors
# ============================================================================


class ReductionError(RelConvError):
    """Base class for failures while building the quotient groupoid."""

    def __init__(self, message: str, witness: Optional[tuple[Any, ...]] = None, **kwargs: Any):
        context = kwargs.pop("context", {})
        if witness is not None:
            context["witness"] = witness
        super().__init__(message, context=context, **kwargs)
        self.witness = witness


class IllDefinedMultiplicationError(ReductionError):
    """Raised when the induced multiplication on classes depends on representatives."""

    pass


class SourceNotFunctionalError(ReductionError):
    """Raised when the reduced source or target relation is not a function."""

    pass


# ============================================================================
# Measure Errors
# ============================================================================


class MeasureError(RelConvError):
    """Base class for measure and Haar system errors."""

    pass


class PushforwardError(MeasureError):
    """Raised when a map is not total on the support of a measure."""

    pass


class HaarSystemError(MeasureError):
    """Raised when Haar system data is malformed (negative weights, wrong support, non-probability)."""

    pass


# ============================================================================
# Algebra Errors
# ============================================================================


class AlgebraError(RelConvError):
    """Base class for convolution algebra errors."""

    pass


class NotInvariantError(AlgebraError):
    """Raised when a function is required to be constant on L2-classes but is not."""

    pass


class UnknownFunctionError(AlgebraError):
    """Raised when a named function is not defined."""

    pass


# ============================================================================
# Numerics Errors
# ============================================================================


class NumericsError(RelConvError):
    """Base class for floating-point layer errors."""

    pass


class UnknownObjectError(NumericsError):
    """Raised when a representation is requested at a label that is not an object."""

    pass


class ConvergenceError(NumericsError):
    """Raised when the power iteration does not converge; carries the last iterate."""

    def __init__(self, message: str, last_iterate: Any = None, estimate: Optional[float] = None, **kwargs: Any):
        context = kwargs.pop("context", {})
        if estimate is not None:
            context["estimate"] = estimate
        super().__init__(message, context=context, **kwargs)
        self.last_iterate = last_iterate
        self.estimate = estimate


# ============================================================================
# Definition File Errors
# ============================================================================


class DefinitionError(RelConvError):
    """Base class for all definition-file errors."""

    def __init__(
        self,
        message: str,
        file_path: Optional[str] = None,
        line_no: Optional[int] = None,
        column_no: Optional[int] = None,
        **kwargs: Any,
    ):
        context = kwargs.pop("context", {})
        if file_path:
            context["file"] = file_path
        if line_no is not None:
            context["line"] = line_no
        if column_no is not None:
            context["column"] = column_no
        super().__init__(message, context=context, **kwargs)
        self.file_path = file_path
        self.line_no = line_no
        self.column_no = column_no


class DefinitionSyntaxError(DefinitionError):
    """Raised when JSON or a function expression cannot be parsed."""

    pass


class UnknownKeyError(DefinitionError):
    """Raised when a definition file contains a key outside the schema."""

    pass


class FractionFormatError(DefinitionError):
    """Raised when a weight or scalar is not an exact fraction string."""

    pass


# ============================================================================
# Runtime Errors
# ============================================================================


class InternalError(RelConvError):
    """Raised for internal errors that should not occur."""

    pass


# ============================================================================
# Error Handler Decorator
# ============================================================================


F = TypeVar("F", bound=Callable[..., Any])


def handle_errors(
    error_code: str = "UNKNOWN", reraise: bool = True, log_level: int = logging.ERROR
) -> Callable[[F], F]:
    """
    Decorator for error handling on verification steps.

    Args:
        error_code: Error code prefix for logging
        reraise: Whether to reraise the exception after logging
        log_level: Logging level to use

    Usage:
        @handle_errors("VERIFY")
        def run_check(groupoid):
            ...
    """

    def decorator(func):  # type: ignore[no-untyped-def]
        def wrapper(*args, **kwargs):  # type: ignore[no-untyped-def]
            try:
                return func(*args, **kwargs)
            except RelConvError:
                logger.log(log_level, "%s error in %s", error_code, func.__name__, exc_info=True)
                if reraise:
                    raise
            except Exception as e:
                logger.log(log_level, "%s unexpected error in %s: %s", error_code, func.__name__, str(e), exc_info=True)
                if reraise:
                    raise InternalError(
                        "Unexpected error: %s" % str(e),  # noqa: UP031
                        error_code=error_code,
                        context={"function": func.__name__, "original_error": type(e).__name__},
                    ) from e
            return None

        wrapper.__name__ = func.__name__
        wrapper.__doc__ = func.__doc__
        return wrapper

    return decorator
