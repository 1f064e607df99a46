"""Closed-form rates for the Gaussian half-duplex relay channel.

The model: two sources reach destination 1 through gains ``h11, h21`` in
both slots; the relay hears them through ``h1R, h2R`` in slot 1, quantizes
its observation with additive Gaussian quantization noise of variance
``sigma_q2``, and talks to the destination through ``hR1`` in slot 2.  All
receiver noises have unit variance, and per-slot transmit powers are fixed
(no power allocation across slots is optimized here).

All rates are in bits per channel use.  Formula shape notes:

* every slot contributes ``(slot fraction) / 2 * log2(1 + SNR-like term)``;
* the "quantization index treated as noise" branches pick up the factor
  ``sigma_q2 / (1 + sigma_q2)``, the price of not recovering the index;
* ``relay_view`` below is the determinant-like quantity coupling the two
  source-to-relay paths, and ``relay_link`` is the relay-to-destination
  received power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .core import (
    DegenerateRelayLink,
    InvalidParams,
    RateRegion,
    SchemeId,
    SlotFraction,
    clamp_region,
    validate_beta,
)

#: Initial bisection bracket for the quantization-variance crossing.
SIGMA_BRACKET = (1e-9, 1e9)

#: Bisection stops when the bracket is narrower than this.
SIGMA_TOL = 1e-9

#: Interval searched by the slot-fraction optimizer.
BETA_RANGE = (0.01, 0.99)

#: Golden-section stops when the bracket is narrower than this.
BETA_TOL = 1e-6

#: Number of evenly spaced seeds evaluated before golden-section refinement.
BETA_SEEDS = 33

#: Relative offset above the feasibility threshold used when a sweep needs a
#: concrete CF operating point.
CF_SIGMA_NUDGE = 1e-9

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class GaussianMarcParams:
    """Channel gains, per-slot powers, slot fraction, quantization variance.

    ``sigma_q2`` may be ``None`` while an optimizer is choosing it; any
    rate evaluation that needs it will reject ``None``.  Powers must be
    non-negative, ``sigma_q2`` strictly positive when set.
    """

    h11: float
    h21: float
    h1r: float
    h2r: float
    hr1: float
    p11: float
    p12: float
    p21: float
    p22: float
    pr: float
    beta: SlotFraction
    sigma_q2: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("h11", "h21", "h1r", "h2r", "hr1"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParams(f"gain {name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        for name in ("p11", "p12", "p21", "p22", "pr"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0.0:
                raise InvalidParams(
                    f"power {name} must be finite and non-negative, got {value!r}"
                )
            object.__setattr__(self, name, value)
        if not isinstance(self.beta, SlotFraction):
            object.__setattr__(self, "beta", validate_beta(self.beta))
        if self.sigma_q2 is not None:
            sigma = float(self.sigma_q2)
            if not math.isfinite(sigma) or sigma <= 0.0:
                raise InvalidParams(
                    f"quantization variance must be finite and positive, got {sigma!r}"
                )
            object.__setattr__(self, "sigma_q2", sigma)


def _require_sigma(params: GaussianMarcParams) -> float:
    if params.sigma_q2 is None:
        raise InvalidParams("quantization variance is unset; fix sigma_q2 first")
    return params.sigma_q2


def slot1_signal(params: GaussianMarcParams) -> float:
    """Received power at the destination in slot 1 (incl. unit noise)."""
    return 1.0 + params.h11**2 * params.p11 + params.h21**2 * params.p21


def slot2_signal(params: GaussianMarcParams) -> float:
    """Received power at the destination in slot 2, relay excluded (incl. unit noise)."""
    return 1.0 + params.h11**2 * params.p12 + params.h21**2 * params.p22


def relay_view(params: GaussianMarcParams) -> float:
    """Joint source-pair power as seen through the relay's slot-1 observation."""
    cross = (params.h11 * params.h2r - params.h1r * params.h21) ** 2
    return (
        cross * params.p11 * params.p21
        + params.h1r**2 * params.p11
        + params.h2r**2 * params.p21
    )


def relay_link(params: GaussianMarcParams) -> float:
    """Relay-to-destination received power in slot 2."""
    return params.hr1**2 * params.pr


def _source_view(params: GaussianMarcParams, i: int) -> tuple[float, float, float, float]:
    """(direct gain, relay gain, slot-1 power, slot-2 power) of source ``i``."""
    if i == 1:
        return params.h11, params.h1r, params.p11, params.p12
    if i == 2:
        return params.h21, params.h2r, params.p21, params.p22
    raise InvalidParams(f"source index must be 1 or 2, got {i!r}")


def _indiv_branch_index_decoded(params: GaussianMarcParams, i: int) -> float:
    """Source-i bound when the quantization index is recovered and helps."""
    hi1, hir, pi1, pi2 = _source_view(params, i)
    sigma = _require_sigma(params)
    b = params.beta.beta
    slot1 = 0.5 * b * math.log2(
        1.0 + hi1**2 * pi1 + hir**2 * pi1 / (1.0 + sigma)
    )
    slot2 = 0.5 * (1.0 - b) * math.log2(1.0 + hi1**2 * pi2)
    return slot1 + slot2


def _indiv_branch_index_as_noise(params: GaussianMarcParams, i: int) -> float:
    """Source-i bound when the quantization index is jointly explained."""
    hi1, _, pi1, pi2 = _source_view(params, i)
    sigma = _require_sigma(params)
    b = params.beta.beta
    slot1 = 0.5 * b * math.log2((1.0 + hi1**2 * pi1) * sigma / (1.0 + sigma))
    slot2 = 0.5 * (1.0 - b) * math.log2(1.0 + hi1**2 * pi2 + relay_link(params))
    return slot1 + slot2


def _sum_index_decoded(params: GaussianMarcParams) -> float:
    """Sum bound when the quantization index is recovered and helps (I1)."""
    sigma = _require_sigma(params)
    b = params.beta.beta
    slot1 = 0.5 * b * math.log2(
        slot1_signal(params) + relay_view(params) / (1.0 + sigma)
    )
    slot2 = 0.5 * (1.0 - b) * math.log2(slot2_signal(params))
    return slot1 + slot2


def _sum_index_as_noise(params: GaussianMarcParams) -> float:
    """Sum bound when the quantization index is jointly explained (I2)."""
    sigma = _require_sigma(params)
    b = params.beta.beta
    slot1 = 0.5 * b * math.log2(slot1_signal(params) * sigma / (1.0 + sigma))
    slot2 = 0.5 * (1.0 - b) * math.log2(slot2_signal(params) + relay_link(params))
    return slot1 + slot2


@dataclass(frozen=True)
class SumRateTerms:
    """The two sum-rate branches; the achievable sum bound is their minimum."""

    i1: float
    i2: float

    @property
    def bound(self) -> float:
        return min(self.i1, self.i2)


def gqf_individual_rate(params: GaussianMarcParams, i: int) -> float:
    """GQF bound on source ``i``'s rate at fixed (sigma_q2, beta), clamped at 0."""
    return max(
        0.0,
        min(
            _indiv_branch_index_decoded(params, i),
            _indiv_branch_index_as_noise(params, i),
        ),
    )


def gqf_sum_terms(params: GaussianMarcParams) -> SumRateTerms:
    """Both GQF sum-rate branches at fixed (sigma_q2, beta), unclamped."""
    return SumRateTerms(_sum_index_decoded(params), _sum_index_as_noise(params))


def gqf_rates(params: GaussianMarcParams) -> RateRegion:
    """Full GQF region at fixed (sigma_q2, beta).  Always feasible."""
    terms = {
        "a(1)": _indiv_branch_index_decoded(params, 1),
        "b(1)": _indiv_branch_index_as_noise(params, 1),
        "a(2)": _indiv_branch_index_decoded(params, 2),
        "b(2)": _indiv_branch_index_as_noise(params, 2),
    }
    sum_terms = gqf_sum_terms(params)
    terms["I1"] = sum_terms.i1
    terms["I2"] = sum_terms.i2
    return clamp_region(
        min(terms["a(1)"], terms["b(1)"]),
        min(terms["a(2)"], terms["b(2)"]),
        sum_terms.bound,
        feasible=True,
        terms=terms,
    )


@dataclass(frozen=True)
class SigmaOptimum:
    """Result of the quantization-variance search.

    ``crossing`` is True when the two sum branches actually intersect; when
    they never do (e.g. the relay link is useless), ``sigma_q2`` is the
    better bracket endpoint and ``sum_rate`` the bound there.
    """

    sigma_q2: float
    sum_rate: float
    crossing: bool


def gqf_optimize_sigma(
    params: GaussianMarcParams,
    bracket: tuple[float, float] = SIGMA_BRACKET,
) -> SigmaOptimum:
    """Quantization variance maximizing the GQF sum bound min(I1, I2).

    I1 falls and I2 rises in sigma_q2, so the max-min sits where they
    cross; bisection on the monotone difference I1 - I2 finds it.  The
    initial ``bracket`` is expanded geometrically when the sign change
    lies outside it, so the result does not depend on the bracket choice.
    """
    if not (0.0 < bracket[0] < bracket[1]) or not all(
        math.isfinite(edge) for edge in bracket
    ):
        raise InvalidParams(f"bracket must satisfy 0 < lo < hi, got {bracket!r}")

    s1 = slot1_signal(params)
    view = relay_view(params)
    link_gain = relay_link(params) / slot2_signal(params)
    b = params.beta.beta

    def gap(sigma: float) -> float:
        # Algebraically identical to gqf_sum_terms(...).i1 - .i2, but with the
        # shared log2(slot1_signal) cancelled symbolically: near the crossing
        # the plain difference of O(1) logs loses enough precision to misplace
        # the root by far more than SIGMA_TOL when the crossing is large.
        return 0.5 * (
            b * math.log1p((s1 + view) / (s1 * sigma))
            - (1.0 - b) * math.log1p(link_gain)
        ) / math.log(2.0)

    lo, hi = bracket
    gap_lo, gap_hi = gap(lo), gap(hi)
    while gap_lo <= 0.0 and lo > 1e-30:
        lo /= 10.0
        gap_lo = gap(lo)
    while gap_hi >= 0.0 and hi < 1e30:
        hi *= 10.0
        gap_hi = gap(hi)

    if gap_lo <= 0.0 or gap_hi >= 0.0:
        # The difference never changes sign: one branch dominates everywhere,
        # so the supremum sits at an extreme of the search range.
        edge = hi if gap_hi >= 0.0 else lo
        terms = gqf_sum_terms(replace(params, sigma_q2=edge))
        return SigmaOptimum(sigma_q2=edge, sum_rate=terms.bound, crossing=False)

    while (hi - lo) > SIGMA_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket narrower than float spacing
            break
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    sigma = 0.5 * (lo + hi)
    terms = gqf_sum_terms(replace(params, sigma_q2=sigma))
    return SigmaOptimum(sigma_q2=sigma, sum_rate=terms.i1, crossing=True)


def cf_sigma_min(params: GaussianMarcParams) -> float:
    """Smallest quantization variance the CF binning constraint allows.

    Solves the constraint "index description rate fits into the slot-2
    relay pipe" for sigma_q2.  Requires a live relay-to-destination link;
    otherwise the pipe has zero capacity and no variance is small enough.
    """
    link = relay_link(params)
    if link <= 0.0:
        raise DegenerateRelayLink(
            "relay-to-destination link carries nothing (hr1**2 * pr == 0)"
        )
    b = params.beta.beta
    # (1 + link/S2)**((1-b)/b) - 1, via expm1/log1p: the plain pow loses the
    # trailing digits that decide the threshold when the exponentiated base
    # is close to 1, and thresholds grow like 1/pipe.
    pipe = math.expm1(
        (1.0 - b) / b * math.log1p(link / slot2_signal(params))
    )
    return (1.0 + relay_view(params) / slot1_signal(params)) / pipe


def _two_slot_no_relay_bounds(
    params: GaussianMarcParams,
) -> tuple[float, float, float]:
    """Two-slot MAC bounds with the relay silent in both slots."""
    b = params.beta.beta
    r1 = 0.5 * b * math.log2(1.0 + params.h11**2 * params.p11) + 0.5 * (
        1.0 - b
    ) * math.log2(1.0 + params.h11**2 * params.p12)
    r2 = 0.5 * b * math.log2(1.0 + params.h21**2 * params.p21) + 0.5 * (
        1.0 - b
    ) * math.log2(1.0 + params.h21**2 * params.p22)
    rsum = 0.5 * b * math.log2(slot1_signal(params)) + 0.5 * (1.0 - b) * math.log2(
        slot2_signal(params)
    )
    return r1, r2, rsum


def cf_rates(params: GaussianMarcParams) -> RateRegion:
    """CF region at fixed (sigma_q2, beta).

    When the binning constraint fails (sigma_q2 at or below the threshold),
    ``feasible`` is False and the bounds are evaluated at the threshold
    itself — the closure point of the CF region.  With a dead relay link
    the fallback is the plain two-slot no-relay region.
    """
    sigma = _require_sigma(params)
    try:
        sigma_min = cf_sigma_min(params)
    except DegenerateRelayLink:
        r1, r2, rsum = _two_slot_no_relay_bounds(params)
        terms = {"sigma_min": math.inf, "degenerate_relay_link": 1.0}
        return clamp_region(r1, r2, rsum, feasible=False, terms=terms)

    feasible = sigma > sigma_min
    operating = replace(params, sigma_q2=sigma if feasible else sigma_min)
    r1 = _indiv_branch_index_decoded(operating, 1)
    r2 = _indiv_branch_index_decoded(operating, 2)
    rsum = _sum_index_decoded(operating)
    terms = {
        "a(1)": r1,
        "a(2)": r2,
        "I1": rsum,
        "sigma_min": sigma_min,
        "sigma_used": operating.sigma_q2,
    }
    return clamp_region(r1, r2, rsum, feasible=feasible, terms=terms)


def no_relay_rates(h11: float, h21: float, p1: float, p2: float) -> RateRegion:
    """Single-slot two-user MAC region (the no-relay baseline).

    With no relay there is no slot structure; each source spends its whole
    power budget in one full-length block.
    """
    for name, value in (("h11", h11), ("h21", h21)):
        if not math.isfinite(float(value)):
            raise InvalidParams(f"gain {name} must be finite, got {value!r}")
    for name, value in (("p1", p1), ("p2", p2)):
        if not math.isfinite(float(value)) or float(value) < 0.0:
            raise InvalidParams(
                f"power {name} must be finite and non-negative, got {value!r}"
            )
    r1 = 0.5 * math.log2(1.0 + h11**2 * p1)
    r2 = 0.5 * math.log2(1.0 + h21**2 * p2)
    rsum = 0.5 * math.log2(1.0 + h11**2 * p1 + h21**2 * p2)
    terms = {"r1": r1, "r2": r2, "sum": rsum}
    return clamp_region(r1, r2, rsum, feasible=True, terms=terms)


@dataclass(frozen=True)
class BetaOptimum:
    """Result of the slot-fraction search."""

    beta: float
    rate: float


def cf_operating_point(params: GaussianMarcParams) -> GaussianMarcParams:
    """CF parameters with sigma_q2 pinned just above the binning threshold.

    With a dead relay link there is no threshold; sigma_q2 is set to 1 and
    :func:`cf_rates` will take its no-relay fallback.
    """
    try:
        sigma = cf_sigma_min(params) * (1.0 + CF_SIGMA_NUDGE)
    except DegenerateRelayLink:
        sigma = 1.0
    return replace(params, sigma_q2=sigma)


def optimize_beta(
    params: GaussianMarcParams,
    scheme: SchemeId,
    objective: str = "sum",
) -> BetaOptimum:
    """Slot fraction maximizing a rate bound for the given scheme.

    For GQF the quantization variance is re-optimized at every candidate
    beta; for CF it is pinned just above the binning threshold.  The
    objective ("sum", "r1" or "r2") need not be unimodal in beta, so a
    33-point grid picks the best neighborhood first and golden-section
    refines inside it.
    """
    if scheme not in (SchemeId.GQF, SchemeId.CF):
        raise InvalidParams(
            f"slot-fraction search applies to GQF or CF, got {scheme!r}"
        )
    if objective not in ("sum", "r1", "r2"):
        raise InvalidParams(
            f"objective must be 'sum', 'r1' or 'r2', got {objective!r}"
        )

    def value(beta: float) -> float:
        candidate = replace(params, beta=validate_beta(beta), sigma_q2=None)
        if scheme is SchemeId.GQF:
            optimum = gqf_optimize_sigma(candidate)
            if objective == "sum":
                return optimum.sum_rate
            at_opt = replace(candidate, sigma_q2=optimum.sigma_q2)
            return gqf_individual_rate(at_opt, 1 if objective == "r1" else 2)
        region = cf_rates(cf_operating_point(candidate))
        return {
            "sum": region.sum_max,
            "r1": region.r1_max,
            "r2": region.r2_max,
        }[objective]

    lo_edge, hi_edge = BETA_RANGE
    step = (hi_edge - lo_edge) / (BETA_SEEDS - 1)
    seeds = [lo_edge + step * index for index in range(BETA_SEEDS)]
    values = [value(seed) for seed in seeds]
    best = max(range(BETA_SEEDS), key=values.__getitem__)
    lo = seeds[best - 1] if best > 0 else lo_edge
    hi = seeds[best + 1] if best < BETA_SEEDS - 1 else hi_edge

    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = value(x1), value(x2)
    while (hi - lo) > BETA_TOL:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = value(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = value(x2)
    beta = 0.5 * (lo + hi)
    return BetaOptimum(beta=beta, rate=value(beta))
