"""Typed errors raised across the package."""

from __future__ import annotations


class ScatterError(Exception):
    """Base class for every error this package raises deliberately."""


class SingularMatrixError(ScatterError):
    """A pivot fell below the singularity threshold during factorization."""


class ScatteringSingularityError(SingularMatrixError):
    """The lead-dressed center matrix is singular at this momentum.

    Physically a lasing / perfect-absorption point; reported instead of
    silently returning huge finite numbers.
    """


class DimensionTooLargeError(ScatterError):
    """Input exceeds the size cap of an oracle-grade routine."""


class BandEdgeError(ScatterError):
    """Wave vector outside the open interval (0, pi) where the lead group velocity vanishes."""


class ConventionMismatchError(ScatterError):
    """Scattering matrices use different phase conventions."""


class KMismatchError(ScatterError):
    """Scattering matrices were computed at different momenta."""


class NotTwoPortError(ScatterError):
    """Operation is defined for two-port systems only."""


class PortConditionError(ScatterError):
    """Metric fails the port condition.  ``index`` is the first offending entry."""

    def __init__(self, message: str, index: tuple[int, int] | None = None):
        super().__init__(message)
        self.index = index


class GeometryTooSmallError(ScatterError):
    """Chain segment too short for the requested construction or experiment."""


class PacketOutOfBoundsError(ScatterError):
    """Initial packet support does not fit inside the input lead."""


class BoundaryContaminationError(ScatterError):
    """Chain-edge occupancy too large for a valid reflection/transmission readout."""


class PremiseViolatedError(ScatterError):
    """A precondition identity of a verification routine does not hold.

    ``identity`` names the violated relation.
    """

    def __init__(self, message: str, identity: str | None = None):
        super().__init__(message)
        self.identity = identity


class ConfigError(ScatterError):
    """Invalid or inconsistent scenario configuration."""
