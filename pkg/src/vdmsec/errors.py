"""Exception hierarchy shared by all modules."""


class VdmError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(VdmError, ValueError):
    """Array shapes or stream counts are inconsistent."""


class DegenerateChannelError(VdmError, ValueError):
    """A channel (or set of channels) is all-zero, rank deficient or dependent."""


class NotPSDError(VdmError, ValueError):
    """A covariance argument is not Hermitian positive semidefinite."""


class PropertyViolation(VdmError):
    """A certified structural property (rank, nulling, KKT) failed."""


class RankCertificateError(PropertyViolation):
    """The effective channel of a precoder block lost rank."""


class ConfigError(VdmError, ValueError):
    """An experiment configuration is invalid."""


class NotOrthonormalError(VdmError, ValueError):
    """A matrix expected to have orthonormal columns does not."""
