"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: instance problems to 65, capability
limits to 70. Internal consistency failures are bugs and stay loud.
"""

from __future__ import annotations


class VopcertError(Exception):
    """Base class for all package-specific errors."""


class CapabilityError(VopcertError):
    """Input is outside the supported envelope (e.g. dimension caps)."""


class InstanceFormatError(VopcertError):
    """Malformed or invalid instance/report document."""


class ConeValidationError(VopcertError):
    """An ordering-cone axiom failed; carries an exact witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotPointedError(ConeValidationError):
    """Witness: a nonzero direction d with both d and -d in the cone."""


class EmptyInteriorError(ConeValidationError):
    """Witness: nonneg row multipliers combining to zero (flatness proof)."""


class TrivialConeError(ConeValidationError):
    """The cone is {0} or the whole space."""


class InfeasiblePointError(VopcertError):
    """A base point handed to a local construction is not in the set."""


class ConsistencyError(VopcertError):
    """Two routes that must agree disagreed; build-breaking."""
