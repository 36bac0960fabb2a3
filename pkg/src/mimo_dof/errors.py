"""Exception hierarchy.

Validation problems derive from ``ValueError`` so plain callers can catch
them generically; planning failures share ``PlanError`` so the CLI can map
them to a dedicated exit code.
"""


class ValidationError(ValueError):
    """Invalid antenna configuration, exponents or run parameters."""


class PlanError(Exception):
    """Base class for scheme-planning failures."""


class TargetInactive(PlanError):
    """Requested corner point is not part of the active corner set."""

    def __init__(self, label, active):
        self.label = label
        self.active = tuple(active)
        names = ", ".join(self.active) or "none"
        super().__init__(f"corner point {label} is not active (active set: {names})")


class DeltaBarOutOfRange(PlanError):
    """Power-allocation mean exponent outside [0, delta_bar_bound]."""


class Infeasible(PlanError):
    """No per-slot exponent sequence satisfies the allocation constraints."""


class RankDeficient(Exception):
    """Zero-forcing precoder requested without a spare transmit dimension."""


class InsufficientSamples(ValueError):
    """Too few SNR points or samples for an exponent regression."""


class InsufficientLadder(ValueError):
    """SNR ladder too short for a DoF slope regression."""
