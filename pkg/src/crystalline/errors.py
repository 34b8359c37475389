"""Exception hierarchy shared by every stage of the pipeline."""


class CrystallineError(Exception):
    """Base class for all errors raised by this package."""


class EmptyPolynomial(CrystallineError):
    pass


class SingleTerm(CrystallineError):
    """A one-term exponential polynomial has no zeros and no expansion."""


class EvaluationOverflow(CrystallineError, OverflowError):
    pass


class BoundaryTooClose(CrystallineError):
    pass


class NonSimpleZero(CrystallineError):
    pass


class NewtonDivergence(CrystallineError):
    pass


class DerivativeUnderflow(CrystallineError):
    pass


class CutoffTooSmall(CrystallineError):
    pass


class CutoffMismatch(CrystallineError):
    pass


class BlowupGuard(CrystallineError):
    pass


class SubsViolated(CrystallineError):
    """Every zero of phi inside the window is also a zero of psi."""


class ComplexZeros(CrystallineError):
    pass


class TailDominates(CrystallineError):
    """A truncation tail bound exceeds the requested tolerance.

    The partially computed report is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ParseError(CrystallineError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
