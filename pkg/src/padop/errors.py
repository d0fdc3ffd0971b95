"""Exception hierarchy.

Every domain error carries a stable ``name`` used in CLI reports; the CLI maps
``PadopError`` subclasses to exit code 2 and ``MalformedInput`` to exit code 3.
"""


class PadopError(Exception):
    """Base class for all domain errors raised by padop."""

    exit_code = 2

    @property
    def name(self) -> str:
        return type(self).__name__


class PrimeMismatch(PadopError):
    pass


class ExtensionMismatch(PadopError):
    """Operands live in different quadratic extensions."""


class DivisionByZero(PadopError, ZeroDivisionError):
    pass


class PrecisionExhausted(PadopError):
    """Cancellation or pivoting consumed all known digits."""


class UnsupportedPrime(PadopError):
    pass


class NoResidueRoot(PadopError):
    pass


class RamifiedCase(PadopError):
    pass


class Singular(PadopError):
    pass


class NotSymmetric(PadopError):
    pass


class NotAntisymmetric(PadopError):
    pass


class SpectrumNotSplit(PadopError):
    pass


class RepeatedResidueRoots(PadopError):
    pass


class RepeatedEigenvalues(PadopError):
    pass


class NotUnitriangular(PadopError):
    pass


class SeriesDiverges(PadopError):
    pass


class NotInner(PadopError):
    pass


class NoBlockStructure(PadopError):
    pass


class PreconditionViolated(PadopError):
    pass


class BoundViolation(PadopError):
    """A norm inequality that must hold by construction was violated."""


class MalformedInput(PadopError):
    exit_code = 3

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class SelftestFailed(PadopError):
    """At least one self-test suite recorded a failing case."""
