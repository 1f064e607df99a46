"""Shared domain types: errors, slot fractions, scheme tags, rate regions.

Every quantity in this package is a rate in bits per channel use.  A
"region" here is the triple of single-user bounds plus the sum bound that
cuts the corner off the rectangle, together with a feasibility flag for
schemes (compress-and-forward) whose operating point may violate a side
constraint.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Optional


class HdmarcError(Exception):
    """Base class for every error raised by this package."""


class OutOfRange(HdmarcError):
    """A scalar parameter lies outside its admissible interval."""


class DimensionMismatch(HdmarcError):
    """Array shapes or alphabet sizes disagree."""


class UnknownVariable(HdmarcError):
    """A variable name is not part of the model it was used with."""


class OverlappingSets(HdmarcError):
    """Variable sets that must be disjoint share a name."""


class InvalidParams(HdmarcError):
    """A parameter combination is rejected (wrong sign, bad pmf, ...)."""


class DegenerateRelayLink(HdmarcError):
    """The relay-to-destination link carries nothing (h_R1^2 * P_R = 0)."""


class SingularCovariance(HdmarcError):
    """A covariance submatrix is numerically singular."""


class TensorTooLarge(HdmarcError):
    """A dense joint pmf would exceed the cell cap."""


class ConfigError(HdmarcError):
    """A configuration document is malformed or inconsistent."""


class SchemeId(enum.Enum):
    """Relaying scheme selector used by sweeps and the CLI."""

    GQF = "GQF"
    CF = "CF"
    NO_RELAY = "NO_RELAY"


@dataclass(frozen=True)
class SlotFraction:
    """Fraction beta of the block in which the relay listens.

    The remaining fraction 1 - beta is the slot in which the relay
    transmits.  Both endpoints are excluded: at beta = 0 the relay never
    hears anything and at beta = 1 it never gets to talk, so each endpoint
    collapses the two-slot model into a different single-slot channel.
    """

    beta: float

    def __post_init__(self) -> None:
        beta = self.beta
        if not isinstance(beta, (int, float)) or isinstance(beta, bool):
            raise OutOfRange(f"slot fraction must be a real number, got {beta!r}")
        beta = float(beta)
        if not math.isfinite(beta) or not 0.0 < beta < 1.0:
            raise OutOfRange(
                f"slot fraction must lie strictly inside (0, 1), got {beta!r}"
            )
        object.__setattr__(self, "beta", beta)

    @property
    def complement(self) -> float:
        """The transmit-slot fraction 1 - beta."""
        return 1.0 - self.beta


def validate_beta(beta: float) -> SlotFraction:
    """Wrap ``beta`` as a :class:`SlotFraction`, rejecting values outside (0, 1)."""
    return SlotFraction(beta)


@dataclass(frozen=True)
class RateRegion:
    """Axis-aligned description of an achievable region.

    ``r1_max`` and ``r2_max`` bound the individual rates, ``sum_max`` bounds
    their sum; all three are clamped to be non-negative and mutually
    consistent (``sum_max <= r1_max + r2_max``).  ``feasible`` is False when
    a scheme's side constraint failed and the values describe the fallback
    operating point instead.  ``terms`` preserves the raw, unclamped
    quantities the bounds were assembled from, keyed by short names such as
    ``"a_1(1)"`` or ``"I1"``, so callers can see which branch was active.
    """

    r1_max: float
    r2_max: float
    sum_max: float
    feasible: bool
    terms: Mapping[str, float]


def clamp_region(
    r1: float,
    r2: float,
    rsum: float,
    feasible: bool = True,
    terms: Optional[Mapping[str, float]] = None,
) -> RateRegion:
    """Clamp raw bounds into a valid :class:`RateRegion`.

    A negative information bound just means the achievable point is rate 0,
    and a sum bound above ``r1 + r2`` is slack, so values are clamped to
    ``r1, r2 >= 0`` and ``0 <= sum <= r1 + r2``.  The raw values stay
    available through ``terms``.
    """
    r1c = max(0.0, float(r1))
    r2c = max(0.0, float(r2))
    sumc = min(max(0.0, float(rsum)), r1c + r2c)
    return RateRegion(r1c, r2c, sumc, bool(feasible), dict(terms or {}))
