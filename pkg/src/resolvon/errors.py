"""Exception types shared across the package."""


class ResolvonError(Exception):
    """Base class for package errors."""


class DimensionMismatch(ResolvonError):
    """Operands live on spaces of different dimension."""


class SpectralError(ResolvonError):
    """Eigensolver failed to converge.

    Carries the operator dimension and a rough conditioning estimate so the
    failure is diagnosable without the operator itself.
    """

    def __init__(self, dim, scale_estimate, message="eigensolver did not converge"):
        self.dim = dim
        self.scale_estimate = scale_estimate
        super().__init__(f"{message} (dim={dim}, scale~{scale_estimate:.3e})")


class ContractViolation(ResolvonError):
    """An operator failed a semidefinite-order contract (e.g. 0 <= M <= I)."""


class GuardrailError(ResolvonError):
    """A request exceeds the dense desk-scale limits or a parameter range."""


class CertificateError(ResolvonError):
    """An asserted numerical certificate does not hold."""


class ChannelSpecError(ResolvonError):
    """A channel document failed validation; names the offending field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
