"""Exception hierarchy shared across the package."""


class DwellGraphError(Exception):
    """Base class for all errors raised by dwellgraph."""


class NotSchurStable(DwellGraphError):
    """A subsystem matrix has spectral radius >= 1."""

    def __init__(self, message, index=None, name=None, spectral_radius=None):
        super().__init__(message)
        self.index = index
        self.name = name
        self.spectral_radius = spectral_radius


class Defective(DwellGraphError):
    """Eigenspace of some eigenvalue cluster is smaller than its multiplicity."""


class ChainFailure(DwellGraphError):
    """Generalized eigenvector chains could not be built at the given tolerance."""


class Singular(DwellGraphError):
    """Matrix is not invertible to working precision."""


class DimensionMismatch(DwellGraphError, ValueError):
    pass


class MixedFormsInvalid(DwellGraphError):
    """A Jordan-kind modal form has factor norm >= 1."""


class NonPositiveLoss(DwellGraphError, ValueError):
    pass


class TooLarge(DwellGraphError):
    pass


class EpsilonSearchFailed(DwellGraphError):
    pass


class SignalNotAdmissible(DwellGraphError):
    pass


class SpecError(DwellGraphError):
    """Base class for system-file problems; carries the offending field path."""

    def __init__(self, message, field=None, line=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field:
            loc.append(f"field '{field}'")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.field = field
        self.line = line


class ParseError(SpecError):
    pass


class ValidationError(SpecError, ValueError):
    pass


class UnknownExample(DwellGraphError, KeyError):
    pass
