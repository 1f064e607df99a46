"""Exact information measures over finite-alphabet joint distributions.

Joint pmfs are dense numpy tensors with one axis per named variable.
Entropies and mutual informations are evaluated by brute-force
marginalization; this module is meant to be an exact reference for small
alphabets, not an estimator, so tensors are capped at :data:`MAX_CELLS`
cells and anything larger is rejected with a clear error.

The variable names are fixed: two sources transmit ``X11, X21`` in slot 1
and ``X12, X22`` in slot 2, the relay hears ``YR`` in slot 1, quantizes it
into ``YhR`` and transmits ``XR`` in slot 2, and destination k observes
``Yk1`` in slot 1 and ``Yk2`` in slot 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import (
    ConfigError,
    DimensionMismatch,
    InvalidParams,
    OverlappingSets,
    TensorTooLarge,
    UnknownVariable,
)

#: The only admissible variable names (see the module docstring).
VAR_NAMES = frozenset(
    {"X11", "X21", "X12", "X22", "XR", "YR", "YhR", "Y11", "Y21", "Y12", "Y22"}
)

#: Pmfs must sum to 1 within this tolerance; off-normalized input is
#: rejected, never silently renormalized.
NORM_TOL = 1e-12

#: Probabilities at or below this are treated as exact zeros inside logs.
ZERO_EPS = 1e-15

#: Dense-tensor cap (number of cells).  Brute force is the point; scale is not.
MAX_CELLS = 2**18

#: Variable order of the slot-1 joint built by :func:`build_slot1_joint`.
SLOT1_VARS = ("X11", "X21", "YR", "Y11", "Y21", "YhR")

#: Variable order of the slot-2 joint built by :func:`build_slot2_joint`.
SLOT2_VARS = ("X12", "X22", "XR", "Y12", "Y22")


@dataclass(frozen=True)
class Var:
    """A named finite-alphabet random variable."""

    name: str
    size: int

    def __post_init__(self) -> None:
        if self.name not in VAR_NAMES:
            raise UnknownVariable(
                f"unknown variable name {self.name!r}; expected one of "
                f"{sorted(VAR_NAMES)}"
            )
        if not isinstance(self.size, (int, np.integer)) or isinstance(self.size, bool):
            raise InvalidParams(f"alphabet size must be an integer, got {self.size!r}")
        if self.size < 1:
            raise InvalidParams(f"alphabet size must be at least 1, got {self.size}")
        object.__setattr__(self, "size", int(self.size))


@dataclass(frozen=True)
class JointPmf:
    """Dense joint pmf over an ordered tuple of variables.

    The probability tensor has ``vars[i].size`` entries along axis ``i``,
    all entries non-negative, and sums to 1 within :data:`NORM_TOL`.  The
    stored array is a read-only copy of the input.
    """

    vars: tuple[Var, ...]
    probs: np.ndarray

    def __post_init__(self) -> None:
        variables = tuple(self.vars)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise InvalidParams(f"duplicate variable names in joint pmf: {names}")
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.size > MAX_CELLS:
            raise TensorTooLarge(
                f"joint pmf would hold {probs.size} cells; the cap is {MAX_CELLS}"
            )
        expected = tuple(v.size for v in variables)
        if probs.shape != expected:
            raise DimensionMismatch(
                f"tensor shape {probs.shape} does not match alphabet sizes {expected}"
            )
        if probs.size and float(probs.min()) < 0.0:
            raise InvalidParams("joint pmf has negative entries")
        total = float(probs.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise InvalidParams(
                f"joint pmf sums to {total!r}; must equal 1 within {NORM_TOL}"
            )
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "vars", variables)
        object.__setattr__(self, "probs", probs)

    def names(self) -> tuple[str, ...]:
        """Variable names in axis order."""
        return tuple(v.name for v in self.vars)


def marginalize(pmf: JointPmf, keep: Iterable[str]) -> JointPmf:
    """Sum out every variable not named in ``keep``.

    Axis order of the surviving variables is preserved.  Names in ``keep``
    that are not part of ``pmf`` raise :class:`UnknownVariable`.
    """
    keep_set = set(keep)
    names = pmf.names()
    unknown = keep_set - set(names)
    if unknown:
        raise UnknownVariable(
            f"variables {sorted(unknown)} are not part of this pmf over {names}"
        )
    drop = tuple(i for i, name in enumerate(names) if name not in keep_set)
    kept_vars = tuple(v for v in pmf.vars if v.name in keep_set)
    reduced = pmf.probs.sum(axis=drop) if drop else pmf.probs
    return JointPmf(kept_vars, reduced)


def entropy(pmf: JointPmf, names: Iterable[str]) -> float:
    """Joint entropy H of the marginal on ``names``, in bits.

    Uses the convention 0 * log 0 = 0; probabilities at or below
    :data:`ZERO_EPS` are treated as exact zeros.
    """
    flat = marginalize(pmf, names).probs.ravel()
    positive = flat[flat > ZERO_EPS]
    if positive.size == 0:
        return 0.0
    return float(-(positive * np.log2(positive)).sum())


def mutual_information(
    pmf: JointPmf,
    a: Iterable[str],
    b: Iterable[str],
    c: Iterable[str] = (),
) -> float:
    """Conditional mutual information I(A; B | C) in bits.

    Evaluated as H(A,C) + H(B,C) - H(C) - H(A,B,C).  ``a``, ``b`` and ``c``
    must be pairwise disjoint; an empty ``c`` gives the unconditional
    I(A; B).  The value is non-negative up to float round-off (no clamping
    is applied here).
    """
    a_set, b_set, c_set = set(a), set(b), set(c)
    for left, right, tag in (
        (a_set, b_set, "A and B"),
        (a_set, c_set, "A and C"),
        (b_set, c_set, "B and C"),
    ):
        shared = left & right
        if shared:
            raise OverlappingSets(f"{tag} share variables {sorted(shared)}")
    return (
        entropy(pmf, a_set | c_set)
        + entropy(pmf, b_set | c_set)
        - entropy(pmf, c_set)
        - entropy(pmf, a_set | b_set | c_set)
    )


def _check_pmf_vector(name: str, vec: np.ndarray) -> None:
    if vec.ndim != 1:
        raise DimensionMismatch(f"{name} must be a 1-D probability vector")
    if vec.size < 1:
        raise DimensionMismatch(f"{name} must have at least one entry")
    if float(vec.min()) < 0.0:
        raise InvalidParams(f"{name} has negative entries")
    total = float(vec.sum())
    if abs(total - 1.0) > NORM_TOL:
        raise InvalidParams(f"{name} sums to {total!r}; must equal 1 within {NORM_TOL}")


def _check_conditional(name: str, table: np.ndarray, cond_axes: int) -> None:
    """Check that ``table`` is a stochastic map from its first ``cond_axes`` axes."""
    if float(table.min()) < 0.0:
        raise InvalidParams(f"{name} has negative entries")
    out_axes = tuple(range(cond_axes, table.ndim))
    totals = table.sum(axis=out_axes)
    worst = float(np.abs(totals - 1.0).max())
    if worst > NORM_TOL:
        raise InvalidParams(
            f"{name} rows must each sum to 1 within {NORM_TOL}; "
            f"worst deviation is {worst!r}"
        )


@dataclass(frozen=True)
class DmChannelSpec:
    """A finite-alphabet two-slot channel with a quantizing relay.

    The distribution factors as independent inputs, a slot-1 transition, a
    relay test channel, and a slot-2 transition::

        p(x11) p(x21) p(x12) p(x22) p(xR)
        * slot1[x11, x21, yR, y11, y21]   = p(yR, y11, y21 | x11, x21)
        * test_channel[yR, yhR]           = p(yhR | yR)
        * slot2[x12, x22, xR, y12, y22]   = p(y12, y22 | x12, x22, xR)

    All tables are dense row-major arrays.  Construction validates
    non-negativity, normalization of every conditional slice within
    :data:`NORM_TOL` (rejected, not renormalized), and size consistency
    across tables.
    """

    px11: np.ndarray
    px21: np.ndarray
    px12: np.ndarray
    px22: np.ndarray
    pxr: np.ndarray
    test_channel: np.ndarray
    slot1: np.ndarray
    slot2: np.ndarray

    def __post_init__(self) -> None:
        arrays = {}
        for field in (
            "px11",
            "px21",
            "px12",
            "px22",
            "pxr",
            "test_channel",
            "slot1",
            "slot2",
        ):
            arr = np.asarray(getattr(self, field), dtype=np.float64)
            arr = arr.copy()
            arr.flags.writeable = False
            arrays[field] = arr
            object.__setattr__(self, field, arr)

        for name in ("px11", "px21", "px12", "px22", "pxr"):
            _check_pmf_vector(name, arrays[name])
        if arrays["test_channel"].ndim != 2:
            raise DimensionMismatch("test_channel must be a 2-D table [yR, yhR]")
        if arrays["slot1"].ndim != 5:
            raise DimensionMismatch(
                "slot1 must be a 5-D table [x11, x21, yR, y11, y21]"
            )
        if arrays["slot2"].ndim != 5:
            raise DimensionMismatch(
                "slot2 must be a 5-D table [x12, x22, xR, y12, y22]"
            )
        _check_conditional("test_channel", arrays["test_channel"], 1)
        _check_conditional("slot1", arrays["slot1"], 2)
        _check_conditional("slot2", arrays["slot2"], 3)

        slot1, slot2 = arrays["slot1"], arrays["slot2"]
        checks = (
            (slot1.shape[0], arrays["px11"].size, "slot1 x11 axis", "px11"),
            (slot1.shape[1], arrays["px21"].size, "slot1 x21 axis", "px21"),
            (slot1.shape[2], arrays["test_channel"].shape[0], "slot1 yR axis", "test_channel yR axis"),
            (slot2.shape[0], arrays["px12"].size, "slot2 x12 axis", "px12"),
            (slot2.shape[1], arrays["px22"].size, "slot2 x22 axis", "px22"),
            (slot2.shape[2], arrays["pxr"].size, "slot2 xR axis", "pxr"),
        )
        for got, want, where, other in checks:
            if got != want:
                raise DimensionMismatch(
                    f"{where} has size {got} but {other} has size {want}"
                )

    # Alphabet sizes, named for readability at call sites.
    @property
    def n_x11(self) -> int:
        return self.px11.size

    @property
    def n_x21(self) -> int:
        return self.px21.size

    @property
    def n_x12(self) -> int:
        return self.px12.size

    @property
    def n_x22(self) -> int:
        return self.px22.size

    @property
    def n_xr(self) -> int:
        return self.pxr.size

    @property
    def n_yr(self) -> int:
        return self.slot1.shape[2]

    @property
    def n_yhr(self) -> int:
        return self.test_channel.shape[1]

    @property
    def n_y11(self) -> int:
        return self.slot1.shape[3]

    @property
    def n_y21(self) -> int:
        return self.slot1.shape[4]

    @property
    def n_y12(self) -> int:
        return self.slot2.shape[3]

    @property
    def n_y22(self) -> int:
        return self.slot2.shape[4]


def build_slot1_joint(spec: DmChannelSpec) -> JointPmf:
    """Joint pmf of ``(X11, X21, YR, Y11, Y21, YhR)`` for slot 1.

    Assembled as p(x11) p(x21) p(yR, y11, y21 | x11, x21) p(yhR | yR); the
    relay quantizes based on YR alone, which is exactly the test-channel
    factorization above.
    """
    cells = (
        spec.n_x11 * spec.n_x21 * spec.n_yr * spec.n_y11 * spec.n_y21 * spec.n_yhr
    )
    if cells > MAX_CELLS:
        raise TensorTooLarge(
            f"slot-1 joint would hold {cells} cells; the cap is {MAX_CELLS}"
        )
    tensor = np.einsum(
        "a,b,abruv,rh->abruvh",
        spec.px11,
        spec.px21,
        spec.slot1,
        spec.test_channel,
        optimize=True,
    )
    sizes = (spec.n_x11, spec.n_x21, spec.n_yr, spec.n_y11, spec.n_y21, spec.n_yhr)
    variables = tuple(Var(n, s) for n, s in zip(SLOT1_VARS, sizes))
    return JointPmf(variables, tensor)


def build_slot2_joint(spec: DmChannelSpec) -> JointPmf:
    """Joint pmf of ``(X12, X22, XR, Y12, Y22)`` for slot 2.

    Assembled as p(x12) p(x22) p(xR) p(y12, y22 | x12, x22, xR); in slot 2
    the relay input XR is an independent codebook symbol.
    """
    cells = spec.n_x12 * spec.n_x22 * spec.n_xr * spec.n_y12 * spec.n_y22
    if cells > MAX_CELLS:
        raise TensorTooLarge(
            f"slot-2 joint would hold {cells} cells; the cap is {MAX_CELLS}"
        )
    tensor = np.einsum(
        "a,b,c,abcuv->abcuv",
        spec.px12,
        spec.px22,
        spec.pxr,
        spec.slot2,
        optimize=True,
    )
    sizes = (spec.n_x12, spec.n_x22, spec.n_xr, spec.n_y12, spec.n_y22)
    variables = tuple(Var(n, s) for n, s in zip(SLOT2_VARS, sizes))
    return JointPmf(variables, tensor)


#: JSON keys of a channel document, mapped to constructor fields.
_JSON_FIELDS = {
    "p_x11": "px11",
    "p_x21": "px21",
    "p_x12": "px12",
    "p_x22": "px22",
    "p_xr": "pxr",
    "test_channel": "test_channel",
    "slot1": "slot1",
    "slot2": "slot2",
}


def spec_from_dict(doc: dict) -> DmChannelSpec:
    """Build a :class:`DmChannelSpec` from its JSON document form.

    The document must contain exactly the keys ``p_x11, p_x21, p_x12,
    p_x22, p_xr`` (probability vectors), ``test_channel`` (2-D nested
    list), and ``slot1``/``slot2`` (5-D nested lists), all row-major.
    """
    if not isinstance(doc, dict):
        raise ConfigError(f"channel document must be an object, got {type(doc).__name__}")
    missing = sorted(set(_JSON_FIELDS) - set(doc))
    if missing:
        raise ConfigError(f"channel document is missing fields {missing}")
    extra = sorted(set(doc) - set(_JSON_FIELDS))
    if extra:
        raise ConfigError(f"channel document has unknown fields {extra}")
    kwargs = {}
    for key, field in _JSON_FIELDS.items():
        try:
            kwargs[field] = np.asarray(doc[key], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"channel field {key!r} is not numeric: {exc}") from exc
    return DmChannelSpec(**kwargs)


def load_dm_spec(path) -> DmChannelSpec:
    """Load a :class:`DmChannelSpec` from a JSON file."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return spec_from_dict(doc)
