"""Exception types shared across the package.

The CLI maps these onto exit codes (see ``ionramsey.cli``): configuration
problems exit 2, register-capacity violations exit 3, and iterative
procedures that fail to settle exit 4.
"""


class IonRamseyError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(IonRamseyError):
    """Invalid configuration value, file, or combination of options."""


class CapacityError(IonRamseyError):
    """Requested register exceeds the dense state-vector capacity."""


class NormError(IonRamseyError):
    """State norm drifted outside tolerance, or renormalization is degenerate."""


class ProtocolError(IonRamseyError):
    """Register handed to a protocol step in a state the step's contract
    forbids (e.g. bus not in its ground state)."""


class DegenerateSlopeError(IonRamseyError):
    """Fringe slope vanishes at the operating point; frequency is not locally
    identifiable there."""


class AmbiguousFringeError(IonRamseyError):
    """Detuning-time product wraps past the unambiguous fringe; the inversion
    would alias onto a neighbouring fringe."""


class ConvergenceError(IonRamseyError):
    """Iterative procedure exhausted its iteration budget without meeting its
    tolerance."""


class FitError(IonRamseyError):
    """Least-squares decomposition is rank deficient or otherwise unusable."""
