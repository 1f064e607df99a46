"""Achievable rate regions for the finite-alphabet two-slot relay models.

Two schemes are implemented on top of :mod:`hdmarc.dminfo`:

* **GQF** — the relay quantizes its slot-1 observation and sends the
  quantization index uncoded (no binning); destinations decode the two
  messages and the quantization index jointly.  Each bound is the minimum
  of two decoding branches: one where the quantization index is recovered
  and helps, one where it is treated as part of the noise to be jointly
  explained.
* **CF** — classic compress-and-forward, where the quantization index is
  binned and must be recovered before the messages.  The bounds are the
  "index recovered" branches alone, but the scheme is only usable when the
  binning constraint holds; the constraint is strict, and on failure the
  evaluation falls back to the same channel with the relay silenced.

The single-destination model evaluates destination 1; the compound model
takes the worst case over both destinations.  A destination whose slot-1
and slot-2 outputs both have singleton alphabets observes nothing and is
treated as absent from the compound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import InvalidParams, RateRegion, SlotFraction, clamp_region
from .dminfo import (
    DmChannelSpec,
    JointPmf,
    build_slot1_joint,
    build_slot2_joint,
    mutual_information,
)

#: The binning constraint is a strict inequality; a margin this close to
#: equality (or worse) counts as infeasible.
CF_MARGIN = 1e-12


@dataclass(frozen=True)
class RegionTerms:
    """Raw bound ingredients, unclamped, in bits per channel use.

    ``a[(k, i)]``/``b[(k, i)]`` are the two decoding branches bounding
    source ``i``'s rate at destination ``k``; ``c[k]``/``d[k]`` the two
    branches bounding the sum rate.  Entries exist exactly for the
    destinations that were evaluated.
    """

    a: Mapping[tuple[int, int], float]
    b: Mapping[tuple[int, int], float]
    c: Mapping[int, float]
    d: Mapping[int, float]

    def merged_with(self, other: "RegionTerms") -> "RegionTerms":
        return RegionTerms(
            a={**self.a, **other.a},
            b={**self.b, **other.b},
            c={**self.c, **other.c},
            d={**self.d, **other.d},
        )

    def destinations(self) -> tuple[int, ...]:
        return tuple(sorted(self.c))


def _dest_outputs(k: int) -> tuple[str, str]:
    """Slot-1 and slot-2 output names of destination ``k``."""
    if k == 1:
        return "Y11", "Y12"
    if k == 2:
        return "Y21", "Y22"
    raise InvalidParams(f"destination index must be 1 or 2, got {k!r}")


def _terms_from_joints(
    joint1: JointPmf, joint2: JointPmf, beta: float, k: int
) -> RegionTerms:
    """Evaluate the four raw bounds at destination ``k`` from prebuilt joints."""
    yk1, yk2 = _dest_outputs(k)
    comp = 1.0 - beta
    a: dict[tuple[int, int], float] = {}
    b: dict[tuple[int, int], float] = {}
    for i, j in ((1, 2), (2, 1)):
        xi1, xj1 = f"X{i}1", f"X{j}1"
        xi2, xj2 = f"X{i}2", f"X{j}2"
        a[(k, i)] = beta * mutual_information(
            joint1, {xi1}, {xj1, yk1, "YhR"}
        ) + comp * mutual_information(joint2, {xi2}, {xj2, "XR", yk2})
        b[(k, i)] = beta * (
            mutual_information(joint1, {xi1}, {xj1, yk1})
            - mutual_information(joint1, {"YhR"}, {"YR"}, {xi1, xj1, yk1})
        ) + comp * mutual_information(joint2, {xi2, "XR"}, {xj2, yk2})
    c = beta * mutual_information(
        joint1, {"X11", "X21"}, {yk1, "YhR"}
    ) + comp * mutual_information(joint2, {"X12", "X22"}, {"XR", yk2})
    d = beta * (
        mutual_information(joint1, {"X11", "X21", "YhR"}, {yk1})
        + mutual_information(joint1, {"X11", "X21"}, {"YhR"})
        - mutual_information(joint1, {"YR"}, {"YhR"})
    ) + comp * mutual_information(joint2, {"X12", "X22", "XR"}, {yk2})
    return RegionTerms(a=a, b=b, c={k: c}, d={k: d})


def _terms_for(
    spec: DmChannelSpec, beta: SlotFraction, ks: tuple[int, ...]
) -> RegionTerms:
    joint1 = build_slot1_joint(spec)
    joint2 = build_slot2_joint(spec)
    terms = _terms_from_joints(joint1, joint2, beta.beta, ks[0])
    for k in ks[1:]:
        terms = terms.merged_with(
            _terms_from_joints(joint1, joint2, beta.beta, k)
        )
    return terms


def gqf_terms(spec: DmChannelSpec, beta: SlotFraction, k: int = 1) -> RegionTerms:
    """Raw GQF bound ingredients at destination ``k``."""
    if k not in (1, 2):
        raise InvalidParams(f"destination index must be 1 or 2, got {k!r}")
    return _terms_for(spec, beta, (k,))


def active_destinations(spec: DmChannelSpec) -> tuple[int, ...]:
    """Destinations that observe anything at all.

    A destination whose slot-1 and slot-2 outputs are both singletons gets
    zero information in either slot and is treated as absent from the
    compound model.  At least one destination must remain.
    """
    ks = []
    if spec.n_y11 > 1 or spec.n_y12 > 1:
        ks.append(1)
    if spec.n_y21 > 1 or spec.n_y22 > 1:
        ks.append(2)
    if not ks:
        raise InvalidParams(
            "every destination output has a singleton alphabet; "
            "no destination can decode anything"
        )
    return tuple(ks)


def _flat_terms(terms: RegionTerms) -> dict[str, float]:
    flat: dict[str, float] = {}
    for k in terms.destinations():
        for i in (1, 2):
            flat[f"a_{k}({i})"] = terms.a[(k, i)]
            flat[f"b_{k}({i})"] = terms.b[(k, i)]
        flat[f"c_{k}"] = terms.c[k]
        flat[f"d_{k}"] = terms.d[k]
    return flat


def _gqf_bounds(terms: RegionTerms) -> tuple[float, float, float]:
    ks = terms.destinations()
    r1 = min(min(terms.a[(k, 1)], terms.b[(k, 1)]) for k in ks)
    r2 = min(min(terms.a[(k, 2)], terms.b[(k, 2)]) for k in ks)
    rsum = min(min(terms.c[k], terms.d[k]) for k in ks)
    return r1, r2, rsum


def _gqf_region(
    spec: DmChannelSpec, beta: SlotFraction, ks: tuple[int, ...]
) -> RateRegion:
    terms = _terms_for(spec, beta, ks)
    r1, r2, rsum = _gqf_bounds(terms)
    return clamp_region(r1, r2, rsum, feasible=True, terms=_flat_terms(terms))


def gqf_region_marc(spec: DmChannelSpec, beta: SlotFraction) -> RateRegion:
    """GQF region with a single destination (destination 1)."""
    return _gqf_region(spec, beta, (1,))


def gqf_region_cmacr(spec: DmChannelSpec, beta: SlotFraction) -> RateRegion:
    """GQF region of the compound model: worst case over active destinations."""
    return _gqf_region(spec, beta, active_destinations(spec))


def degenerate_relay_spec(spec: DmChannelSpec) -> DmChannelSpec:
    """The same channel with the relay silenced.

    XR is pinned to the first letter of its alphabet (a point mass; which
    letter means "silence" is a modeling convention) and the quantizer is
    collapsed to a single output, so the relay conveys nothing in either
    slot.  Evaluating GQF on the result gives the plain two-slot
    no-relay region of the channel.
    """
    pxr = np.zeros_like(spec.pxr)
    pxr[0] = 1.0
    test_channel = np.ones((spec.n_yr, 1))
    return DmChannelSpec(
        px11=spec.px11,
        px21=spec.px21,
        px12=spec.px12,
        px22=spec.px22,
        pxr=pxr,
        test_channel=test_channel,
        slot1=spec.slot1,
        slot2=spec.slot2,
    )


def no_relay_region_marc(spec: DmChannelSpec, beta: SlotFraction) -> RateRegion:
    """Two-slot region of the single-destination channel with the relay silenced."""
    return gqf_region_marc(degenerate_relay_spec(spec), beta)


def no_relay_region_cmacr(spec: DmChannelSpec, beta: SlotFraction) -> RateRegion:
    """Two-slot compound region with the relay silenced."""
    return _gqf_region(degenerate_relay_spec(spec), beta, active_destinations(spec))


def _cf_region(
    spec: DmChannelSpec, beta: SlotFraction, ks: tuple[int, ...]
) -> RateRegion:
    joint1 = build_slot1_joint(spec)
    joint2 = build_slot2_joint(spec)
    b = beta.beta
    terms = _terms_from_joints(joint1, joint2, b, ks[0])
    for k in ks[1:]:
        terms = terms.merged_with(_terms_from_joints(joint1, joint2, b, k))

    # Binning feasibility: the quantization-index description rate left
    # after side-information gains must fit through the relay's slot-2
    # pipe, at every destination.
    i_yr_yhr = mutual_information(joint1, {"YR"}, {"YhR"})
    lhs = max(
        b * (i_yr_yhr - mutual_information(joint1, {_dest_outputs(k)[0]}, {"YhR"}))
        for k in ks
    )
    rhs = min(
        (1.0 - b) * mutual_information(joint2, {"XR"}, {_dest_outputs(k)[1]})
        for k in ks
    )
    feasible = (rhs - lhs) > CF_MARGIN

    flat = _flat_terms(terms)
    flat["cf_lhs"] = lhs
    flat["cf_rhs"] = rhs

    if feasible:
        r1 = min(terms.a[(k, 1)] for k in ks)
        r2 = min(terms.a[(k, 2)] for k in ks)
        rsum = min(terms.c[k] for k in ks)
        return clamp_region(r1, r2, rsum, feasible=True, terms=flat)

    # Binning fails: the destinations cannot recover the quantization index,
    # so the relay is silenced and the plain two-slot region is reported.
    silenced_terms = _terms_for(degenerate_relay_spec(spec), beta, ks)
    r1, r2, rsum = _gqf_bounds(silenced_terms)
    for key, value in _flat_terms(silenced_terms).items():
        flat[f"no_relay_{key}"] = value
    return clamp_region(r1, r2, rsum, feasible=False, terms=flat)


def cf_region_marc(spec: DmChannelSpec, beta: SlotFraction) -> RateRegion:
    """CF region with a single destination (destination 1).

    ``feasible`` reports whether the binning constraint held; when it did
    not, the returned bounds are those of the relay-silenced channel (the
    raw CF terms stay available in ``terms``).
    """
    return _cf_region(spec, beta, (1,))


def cf_region_cmacr(spec: DmChannelSpec, beta: SlotFraction) -> RateRegion:
    """CF region of the compound model: worst case over active destinations.

    The binning constraint must hold at every active destination (the
    worst left-hand side must clear the worst right-hand side).
    """
    return _cf_region(spec, beta, active_destinations(spec))
