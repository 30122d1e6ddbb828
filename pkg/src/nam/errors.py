"""Exception hierarchy shared by every module of the package."""


class NamError(Exception):
    """Base class for all library errors."""


class PrimeMismatchError(NamError):
    """Operands live over different primes."""


class ModeMismatchError(NamError):
    """Real-valued and s-adic-valued measures were mixed."""


class ResolutionError(NamError):
    """A query is finer than the resolution a measure carries."""


class AdmissibilityError(ResolutionError):
    """A transform argument is too large for the measure's cells."""


class AbsoluteContinuityViolation(NamError):
    """A cell carries mu-mass but no nu-mass."""


class SingularMatrixError(NamError):
    """The operator block is not invertible."""


class EnumerationCapError(NamError):
    """An enumeration would exceed the configured size cap."""


class SchemaError(NamError):
    """An input document does not match its schema."""
