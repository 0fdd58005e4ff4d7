"""
Exception hierarchy for the functional-inequality toolkit.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""


class HeavyTailError(Exception):
    """Base exception for all toolkit errors."""
    pass


class ParameterError(HeavyTailError, ValueError):
    """A parameter lies outside its admissible domain."""
    pass


class QuadratureError(HeavyTailError):
    """Adaptive quadrature did not reach the requested tolerance."""
    pass


class BracketError(HeavyTailError):
    """No sign change found while growing a root bracket."""
    pass


class DomainError(HeavyTailError, ValueError):
    """Argument outside the domain on which a quantity is defined."""
    pass


class RegularityError(HeavyTailError):
    """A regularity clause for Phi cannot be satisfied on the grid."""

    def __init__(self, clause: str, message: str):
        super().__init__(f"clause {clause}: {message}")
        self.clause = clause


class DualityError(HeavyTailError):
    """Profile or rate vanishes where the duality transform divides by it."""
    pass


class CertificateError(HeavyTailError):
    """A Lyapunov certificate violates its construction contract."""
    pass


class PolarSingularityError(CertificateError):
    """Radial generator evaluated at the origin in dimension n >= 2."""
    pass


class MonotonicityError(CertificateError):
    """The rate function phi is not increasing on the required range."""
    pass


class RatioConditionError(CertificateError):
    """V''/V'^2 does not stay above -1/2 at infinity."""
    pass


class ConverseConditionError(CertificateError):
    """Neither sufficient condition of the converse Cheeger theorem holds."""
    pass


class HypothesisError(HeavyTailError):
    """A theorem hypothesis (Muckenhoupt ratio bound, DHR base) fails on the grid."""
    pass


class LogConcavityError(HeavyTailError):
    """Radial density is not log-concave on the grid."""
    pass


class TransportError(HeavyTailError):
    """Radial transport profile is invalid or cannot be inverted."""
    pass


class InfiniteRateError(HeavyTailError):
    """G(s) = 0, so the weak rate C/G(s) is infinite."""
    pass


class ConfigError(HeavyTailError):
    """Run configuration cannot be parsed or validated."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field
