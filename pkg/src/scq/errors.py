"""Exception hierarchy shared across the package."""


class SCQError(Exception):
    """Base class for every error raised by this package."""


class InvalidData(SCQError, ValueError):
    pass


class InvalidInput(SCQError, ValueError):
    pass


class InvalidConfig(SCQError, ValueError):
    pass


class NumericalFailure(SCQError, ArithmeticError):
    pass


class SingularRegularization(NumericalFailure):
    """Some eigenvalue plus n*nu is not strictly positive."""


class OutOfBracket(NumericalFailure):
    """A multiplier lies outside the open interval (-lambda_min/n, inf)."""


class DegenerateColumn(NumericalFailure):
    """The right-hand side of a column solve vanished, so no unit-norm stationary point exists."""


class ConvergenceFailure(NumericalFailure):
    """Inner alternation hit its cap. ``v`` and ``state`` hold the last iterate."""

    def __init__(self, message, v=None, state=None):
        super().__init__(message)
        self.v = v
        self.state = state


class DegenerateSpectrum(NumericalFailure):
    pass


class DegenerateData(InvalidData):
    pass


class FormatError(SCQError, ValueError):
    pass


class UnsupportedVersion(FormatError):
    pass


class CorruptModel(FormatError):
    pass
