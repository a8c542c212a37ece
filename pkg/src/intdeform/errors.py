"""Exception hierarchy shared by every engine.

Everything raised on purpose derives from :class:`DeformationError`; the CLI
maps that whole family to exit status 2.
"""

from __future__ import annotations


class DeformationError(Exception):
    """Base class for input, hypothesis and numerical failures."""

    def details(self) -> dict:
        return {}


class ContextError(DeformationError, ValueError):
    """Operands live in different variable contexts or have incompatible shapes."""


class DegreeBoundError(DeformationError, ValueError):
    def __init__(self, message: str, *, order: int | None = None, degree=None, bound=None):
        super().__init__(message)
        self.order = order
        self.degree = degree
        self.bound = bound

    def details(self) -> dict:
        return {"order": self.order, "degree": self.degree, "bound": self.bound}


class FiberError(DeformationError, ValueError):
    """The factored fiber violates a checkable hypothesis (homogeneity, reducedness, (P-1))."""


class HypothesisError(DeformationError, ValueError):
    """A precondition of an operation fails; ``witness`` holds the offending object."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness

    def details(self) -> dict:
        return {"witness": _jsonable(self.witness)}


class NotIntegrableError(HypothesisError):
    pass


class NotExactError(HypothesisError):
    pass


class NoSolutionError(DeformationError, ValueError):
    """An exact linear system has no solution.

    ``certificate`` maps equation labels to multipliers ``y`` with
    ``y^T A = 0`` and ``y^T b != 0``; ``first_row`` labels the row whose
    reduction exposed the inconsistency.
    """

    def __init__(self, message: str, *, first_row=None, certificate=None, residual=None):
        super().__init__(message)
        self.first_row = first_row
        self.certificate = certificate or {}
        self.residual = residual

    def details(self) -> dict:
        return {
            "first_row": self.first_row,
            "certificate": {k: v.to_pair() for k, v in self.certificate.items()},
            "residual": None if self.residual is None else self.residual.to_pair(),
        }


class DecompositionFailure(DeformationError):
    def __init__(self, message: str, *, order: int | None = None, cause: Exception | None = None, witness=None):
        super().__init__(message)
        self.order = order
        self.cause = cause
        self.witness = witness

    def details(self) -> dict:
        out = {"order": self.order, "witness": _jsonable(self.witness)}
        if isinstance(self.cause, DeformationError):
            out["cause"] = self.cause.details()
        return out


class FactorizationFailure(HypothesisError):
    pass


class AnsatzFailure(DeformationError):
    pass


class ResidencyFailure(DeformationError):
    pass


class NonConvergence(DeformationError):
    pass


class PoleProximity(DeformationError):
    pass


class WindingAmbiguity(DeformationError):
    pass


class SamplingFailure(DeformationError):
    pass


def _jsonable(obj):
    if obj is None:
        return None
    to_json = getattr(obj, "to_json", None)
    if to_json is not None:
        return to_json()
    return str(obj)
