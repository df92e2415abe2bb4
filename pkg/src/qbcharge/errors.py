"""Exception types shared across the package."""


class QBChargeError(Exception):
    """Base class for all package-specific errors."""


class DegeneracyError(QBChargeError):
    """A quantity is undefined because the driving field vanishes.

    Raised for a zero pulse vector (mixing angle, CD pulse), a zero
    (pulse, assistant) pair (frame angle), or a degenerate instantaneous
    spectrum in the numerical counter-diabatic construction.
    """


class GaugeTrackingError(QBChargeError):
    """Eigenvector continuation between nearby times lost track of a branch.

    Usually means the differentiation step is too coarse or the spectrum
    crosses between the two evaluation points.
    """


class IntegrationError(QBChargeError):
    """Base class for propagation failures."""


class StiffnessError(IntegrationError):
    """Step size underflowed or the step budget was exhausted."""


class DivergenceError(IntegrationError):
    """The integrated state became non-finite."""


class TraceDriftError(IntegrationError):
    """Trace of the density matrix drifted beyond the abort threshold."""


class ConfigError(QBChargeError):
    """Invalid run configuration document.

    Parameters
    ----------
    message : str
        Human-readable description.
    line : int, optional
        1-based line number in the source document.
    column : int, optional
        1-based column number.
    field : str, optional
        Name of the offending configuration key.
    """

    def __init__(self, message, line=None, column=None, field=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc = f" ({loc})"
        super().__init__(message + loc)
        self.line = line
        self.column = column
        self.field = field
