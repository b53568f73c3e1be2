from typing import Any, Dict, Optional


class HarmonicZerosError(Exception):
    """Base error carrying a machine code and the CLI exit code"""

    error = "HARMONIC_ZEROS_ERROR"
    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Error envelope written to reports and echoed by the CLI"""
        body = {"ok": False, "error": self.error, "message": self.message}
        if self.details:
            body["details"] = self.details
        return body


# Validation family (exit 2)


class ValidationError(HarmonicZerosError):
    error = "VALIDATION_ERROR"
    exit_code = 2


class NonFiniteInput(ValidationError):
    error = "NON_FINITE_INPUT"


class DegenerateFamily(ValidationError):
    error = "DEGENERATE_FAMILY"


class HypothesisNotMet(ValidationError):
    error = "HYPOTHESIS_NOT_MET"


class UnsupportedShape(ValidationError):
    error = "UNSUPPORTED_SHAPE"


class InvalidParameter(ValidationError):
    error = "INVALID_PARAMETER"


# Numerical family (exit 3)


class NumericalError(HarmonicZerosError):
    error = "NUMERICAL_ERROR"
    exit_code = 3


class ZeroOnContour(NumericalError):
    error = "ZERO_ON_CONTOUR"


class NonIntegerWinding(NumericalError):
    error = "NON_INTEGER_WINDING"


class SingularJacobian(NumericalError):
    error = "SINGULAR_JACOBIAN"


class NoConvergence(NumericalError):
    error = "NO_CONVERGENCE"


class CertificationFailed(NumericalError):
    error = "CERTIFICATION_FAILED"


class BudgetExceeded(HarmonicZerosError):
    error = "BUDGET_EXCEEDED"
    exit_code = 4


def error_class(code: str):
    """Exception class for a machine code (base class when unknown)"""
    pending = [HarmonicZerosError]
    while pending:
        cls = pending.pop()
        if cls.error == code:
            return cls
        pending.extend(cls.__subclasses__())
    return HarmonicZerosError
