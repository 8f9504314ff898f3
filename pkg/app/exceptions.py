class LabError(Exception):
    """Base class for every error raised by the matrix laboratory."""


class DimensionError(LabError):
    pass


class SpectrumError(LabError):
    """An eigenvalue is not inside the open unit disk (or a contour does
    not separate the spectrum from the unit circle)."""


class HypothesisError(LabError):
    """The inputs of a checker violate the hypotheses of its statement."""


class ConvergenceError(LabError):
    pass


class ResolventError(LabError):
    """A sample point or quadrature node is too close to the spectrum."""


class ConfigError(LabError):
    pass
