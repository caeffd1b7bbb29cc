"""Exception hierarchy shared by every module of the package."""


class TorsionError(Exception):
    """Base class for all errors raised by su2torsion."""


class InputError(TorsionError):
    """Malformed user input (maps to CLI exit code 2)."""


class NumericalError(TorsionError):
    """A numerical procedure failed (maps to CLI exit code 3)."""


class SchemaError(InputError):
    pass


class PeripheralError(InputError):
    """The supplied peripheral words do not decompose the boundary commutator."""


class DomainError(InputError):
    pass


class AntipodeError(NumericalError):
    """log was requested at -1, where the chart is not defined."""


class NoConvergence(NumericalError):
    pass


class NotACocycle(NumericalError):
    pass


class SingularPoint(NumericalError):
    """A path ran into a non-regular representation."""


class CentralMeridian(NumericalError):
    pass


class RankMismatch(NumericalError):
    pass


class NotRegular(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class NonCommuting(NumericalError):
    pass


class CornerPoint(NumericalError):
    pass


class NoPathForTubeSampler(InputError):
    pass


class FitFailure(NumericalError):
    pass
