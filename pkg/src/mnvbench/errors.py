"""Exception hierarchy shared by the verification modules."""

from __future__ import annotations

from typing import Any


class VerificationError(Exception):
    """A certificate failed.  ``report`` holds the failing report when one exists."""

    def __init__(self, message: str, report: Any = None, **context: Any):
        super().__init__(message)
        self.report = report
        self.context = context


class ConstraintViolation(VerificationError):
    pass


class ResidualNonzero(VerificationError):
    pass


class IdentityViolation(VerificationError):
    pass


class RealnessViolation(VerificationError):
    pass


class AuditFailure(VerificationError):
    pass


class ConformalityViolation(VerificationError):
    pass


class PotentialMismatch(VerificationError):
    pass


class SignInconsistency(VerificationError):
    pass


class SingularPoint(ArithmeticError):
    """The denominator of a field vanishes (numerically) at the requested point."""


class ToleranceNotMet(RuntimeError):
    pass
