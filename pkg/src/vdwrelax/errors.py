"""Exception hierarchy.

Every error carries a ``category`` (the class name) so the command line can
report failures as a single machine-parsable line.
"""


class VdwError(Exception):
    """Base class for all errors raised by the package."""

    @property
    def category(self):
        return type(self).__name__


class DomainError(VdwError, ValueError):
    """A density (or mass/volume pair) lies outside ``(0, 1/b)``."""


class NoSpinodal(VdwError):
    """The isotherm is monotone (T >= T_C): no spinodal zone, no saturation pair."""


class ConvergenceFailure(VdwError):
    pass


class DegenerateMixture(VdwError, ValueError):
    """Volume fractions are undefined because both phase densities coincide."""


class StiffnessOverflow(VdwError):
    pass


class NotConverged(VdwError):
    pass


class EquilibriumMismatch(VdwError):
    """A two-phase limit of the dynamics disagrees with the Maxwell pair."""


class ComplexSoundSpeed(VdwError):
    """Negative sound-speed radicand: the convective system lost hyperbolicity."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DegenerateWaveSpeed(VdwError):
    pass


class InvalidState(VdwError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ParseError(VdwError):
    pass


class ValidationError(VdwError, ValueError):
    pass
