"""Parameter sweeps over quantization variance or slot fraction.

A sweep is described by a JSON document (see :func:`config_from_dict`),
evaluated on a grid, and emitted as a CSV plus a gnuplot script that plots
the per-scheme sum-rate curves from that CSV.  Output is deterministic:
the same configuration always produces byte-identical files.

CSV layout (one row per scheme per grid point, grouped by scheme)::

    swept,scheme,r1,r2,sum,feasible,diag_sigma

``diag_sigma`` records the quantization variance actually used at that
point (the optimizer's choice, or the threshold for CF), and is empty for
schemes without a quantizer.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import ConfigError, HdmarcError, RateRegion, SchemeId, validate_beta
from .dminfo import DmChannelSpec, spec_from_dict
from .dmregions import (
    cf_region_cmacr,
    cf_region_marc,
    gqf_region_cmacr,
    gqf_region_marc,
    no_relay_region_cmacr,
    no_relay_region_marc,
)
from .gaussian import (
    GaussianMarcParams,
    cf_operating_point,
    cf_rates,
    gqf_optimize_sigma,
    gqf_rates,
    no_relay_rates,
)

#: The only schema version this package reads.
SCHEMA_VERSION = 1

#: Significant digits used for every CSV number.
CSV_DIGITS = 12

#: Column header of every emitted CSV.
CSV_HEADER = "swept,scheme,r1,r2,sum,feasible,diag_sigma"

_GAIN_KEYS = {"h11": "h11", "h21": "h21", "h1R": "h1r", "h2R": "h2r", "hR1": "hr1"}
_POWER_KEYS = {"P11": "p11", "P12": "p12", "P21": "p21", "P22": "p22", "PR": "pr"}


@dataclass(frozen=True)
class GridSpec:
    """A one-dimensional sweep grid."""

    lo: float
    hi: float
    points: int
    spacing: str  # "linear" | "log"

    def __post_init__(self) -> None:
        if self.spacing not in ("linear", "log"):
            raise ConfigError(
                f"grid spacing must be 'linear' or 'log', got {self.spacing!r}"
            )
        if not self.lo < self.hi:
            raise ConfigError(
                f"grid needs min < max, got min={self.lo!r} max={self.hi!r}"
            )
        if self.points < 2:
            raise ConfigError(f"grid needs at least 2 points, got {self.points!r}")
        if self.spacing == "log" and self.lo <= 0.0:
            raise ConfigError("log-spaced grid needs min > 0")

    def values(self) -> tuple[float, ...]:
        if self.spacing == "log":
            grid = np.geomspace(self.lo, self.hi, self.points)
        else:
            grid = np.linspace(self.lo, self.hi, self.points)
        return tuple(float(v) for v in grid)


@dataclass(frozen=True)
class SweepConfig:
    """A validated sweep description.

    Exactly one of ``gaussian``/``dm_spec`` is set, matching ``model``.
    For the Gaussian model, ``no_relay`` holds the single-slot baseline
    powers (required only when NO_RELAY is among the schemes).  For the
    finite-alphabet model, ``topology`` selects the single-destination or
    compound region.
    """

    model: str  # "gaussian" | "dm"
    swept: str  # "sigma_q2" | "beta"
    grid: GridSpec
    schemes: tuple[SchemeId, ...]
    gaussian: Optional[GaussianMarcParams] = None
    no_relay: Optional[tuple[float, float]] = None
    dm_spec: Optional[DmChannelSpec] = None
    topology: str = "marc"  # "marc" | "cmacr" (dm only)
    output: Optional[str] = None


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise ConfigError(f"{where} is missing required field {key!r}")
    value = doc[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}.{key} must be an integer, got {value!r}")
        return value
    if not isinstance(value, kind):
        raise ConfigError(
            f"{where}.{key} must be {kind.__name__}, got {type(value).__name__}"
        )
    return value


def _parse_schemes(raw) -> tuple[SchemeId, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("schemes must be a non-empty list")
    schemes = []
    for name in raw:
        try:
            schemes.append(SchemeId(name))
        except ValueError:
            raise ConfigError(
                f"unknown scheme {name!r}; expected one of "
                f"{[s.value for s in SchemeId]}"
            ) from None
    if len(set(schemes)) != len(schemes):
        raise ConfigError(f"schemes list has duplicates: {raw}")
    return tuple(schemes)


def _parse_gaussian_channel(doc: dict, swept: str) -> GaussianMarcParams:
    gains_doc = _require(doc, "gains", dict, "channel")
    powers_doc = _require(doc, "powers", dict, "channel")
    for label, table, known in (
        ("gains", gains_doc, _GAIN_KEYS),
        ("powers", powers_doc, _POWER_KEYS),
    ):
        extra = sorted(set(table) - set(known))
        if extra:
            raise ConfigError(f"channel.{label} has unknown fields {extra}")
        missing = sorted(set(known) - set(table))
        if missing:
            raise ConfigError(f"channel.{label} is missing fields {missing}")
    kwargs = {field: _require(gains_doc, key, float, "channel.gains")
              for key, field in _GAIN_KEYS.items()}
    kwargs.update(
        {field: _require(powers_doc, key, float, "channel.powers")
         for key, field in _POWER_KEYS.items()}
    )

    known_top = {"gains", "powers", "beta", "sigma_q2"}
    extra = sorted(set(doc) - known_top)
    if extra:
        raise ConfigError(f"channel has unknown fields {extra}")

    if swept == "beta":
        if "beta" in doc:
            raise ConfigError("channel.beta must be omitted when sweeping beta")
        beta = 0.5  # placeholder; every evaluation replaces it with a grid value
    else:
        beta = _require(doc, "beta", float, "channel")
    if "sigma_q2" in doc:
        raise ConfigError(
            "channel.sigma_q2 must be omitted in sweeps: it is either the swept "
            "parameter or chosen per point by the scheme"
        )
    try:
        return GaussianMarcParams(beta=validate_beta(beta), sigma_q2=None, **kwargs)
    except HdmarcError as exc:
        raise ConfigError(f"invalid channel parameters: {exc}") from exc


def gaussian_point_from_dict(doc: dict) -> GaussianMarcParams:
    """Parse a Gaussian channel document with beta and sigma_q2 both fixed.

    Same layout as a sweep's ``channel`` block, but for single-point
    evaluation: ``gains``, ``powers``, ``beta`` and ``sigma_q2`` are all
    required.
    """
    if not isinstance(doc, dict):
        raise ConfigError(f"channel must be an object, got {type(doc).__name__}")
    sigma = _require(doc, "sigma_q2", float, "channel")
    trimmed = {key: value for key, value in doc.items() if key != "sigma_q2"}
    base = _parse_gaussian_channel(trimmed, swept="sigma_q2")
    try:
        return replace(base, sigma_q2=sigma)
    except HdmarcError as exc:
        raise ConfigError(f"invalid channel parameters: {exc}") from exc


def config_from_dict(doc: dict) -> SweepConfig:
    """Validate a sweep document and build a :class:`SweepConfig`.

    Top-level fields: ``schema_version`` (must be 1), ``model`` ("gaussian"
    or "dm"), ``swept`` ("sigma_q2" or "beta"), ``grid`` (``min``, ``max``,
    ``points``, optional ``spacing``), ``schemes``, ``channel`` (model
    parameters), optional ``no_relay`` (``P1``, ``P2``; Gaussian baseline),
    optional ``topology`` ("marc" or "cmacr"; dm only), optional ``output``
    (CSV path).
    """
    if not isinstance(doc, dict):
        raise ConfigError(f"config must be an object, got {type(doc).__name__}")
    version = _require(doc, "schema_version", int, "config")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version}; this package reads "
            f"version {SCHEMA_VERSION}"
        )
    known = {
        "schema_version",
        "model",
        "swept",
        "grid",
        "schemes",
        "channel",
        "no_relay",
        "topology",
        "output",
    }
    extra = sorted(set(doc) - known)
    if extra:
        raise ConfigError(f"config has unknown fields {extra}")

    model = _require(doc, "model", str, "config")
    if model not in ("gaussian", "dm"):
        raise ConfigError(f"model must be 'gaussian' or 'dm', got {model!r}")
    swept = _require(doc, "swept", str, "config")
    if swept not in ("sigma_q2", "beta"):
        raise ConfigError(f"swept must be 'sigma_q2' or 'beta', got {swept!r}")
    if model == "dm" and swept != "beta":
        raise ConfigError("the dm model has no sigma_q2 knob; sweep beta instead")

    grid_doc = _require(doc, "grid", dict, "config")
    extra = sorted(set(grid_doc) - {"min", "max", "points", "spacing"})
    if extra:
        raise ConfigError(f"grid has unknown fields {extra}")
    grid = GridSpec(
        lo=_require(grid_doc, "min", float, "grid"),
        hi=_require(grid_doc, "max", float, "grid"),
        points=_require(grid_doc, "points", int, "grid"),
        spacing=grid_doc.get("spacing", "linear"),
    )
    if swept == "beta" and not (0.0 < grid.lo and grid.hi < 1.0):
        raise ConfigError(
            f"beta grid must lie strictly inside (0, 1), got "
            f"[{grid.lo!r}, {grid.hi!r}]"
        )

    schemes = _parse_schemes(doc.get("schemes"))
    channel_doc = _require(doc, "channel", dict, "config")

    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError(f"output must be a path string, got {output!r}")
    topology = doc.get("topology", "marc")
    if topology not in ("marc", "cmacr"):
        raise ConfigError(f"topology must be 'marc' or 'cmacr', got {topology!r}")

    if model == "gaussian":
        if "topology" in doc:
            raise ConfigError("topology applies to the dm model only")
        params = _parse_gaussian_channel(channel_doc, swept)
        no_relay = None
        if "no_relay" in doc:
            nr_doc = _require(doc, "no_relay", dict, "config")
            extra = sorted(set(nr_doc) - {"P1", "P2"})
            if extra:
                raise ConfigError(f"no_relay has unknown fields {extra}")
            no_relay = (
                _require(nr_doc, "P1", float, "no_relay"),
                _require(nr_doc, "P2", float, "no_relay"),
            )
        if SchemeId.NO_RELAY in schemes and no_relay is None:
            raise ConfigError(
                "the NO_RELAY scheme needs a no_relay block with baseline "
                "powers P1 and P2"
            )
        return SweepConfig(
            model=model,
            swept=swept,
            grid=grid,
            schemes=schemes,
            gaussian=params,
            no_relay=no_relay,
            output=output,
        )

    if "no_relay" in doc:
        raise ConfigError(
            "no_relay powers apply to the gaussian model only; the dm "
            "NO_RELAY baseline silences the relay of the same channel"
        )
    try:
        dm_spec = spec_from_dict(channel_doc)
    except HdmarcError as exc:
        raise ConfigError(f"invalid dm channel: {exc}") from exc
    return SweepConfig(
        model=model,
        swept=swept,
        grid=grid,
        schemes=schemes,
        dm_spec=dm_spec,
        topology=topology,
        output=output,
    )


@dataclass(frozen=True)
class RegionRow:
    """One evaluated grid point for one scheme."""

    r1: float
    r2: float
    rsum: float
    feasible: bool
    diag_sigma: Optional[float]


@dataclass(frozen=True)
class SweepResult:
    """All rows of a finished sweep, grouped by scheme."""

    swept: str
    values: tuple[float, ...]
    schemes: tuple[SchemeId, ...]
    rows: dict[SchemeId, tuple[RegionRow, ...]]
    log_axis: bool


def _row(region: RateRegion, diag_sigma: Optional[float]) -> RegionRow:
    return RegionRow(
        r1=region.r1_max,
        r2=region.r2_max,
        rsum=region.sum_max,
        feasible=region.feasible,
        diag_sigma=diag_sigma,
    )


def _gaussian_rows(
    config: SweepConfig, scheme: SchemeId, values: tuple[float, ...]
) -> tuple[RegionRow, ...]:
    params = config.gaussian
    rows = []
    for value in values:
        if config.swept == "sigma_q2":
            point = replace(params, sigma_q2=value)
        else:
            point = replace(params, beta=validate_beta(value), sigma_q2=None)

        if scheme is SchemeId.NO_RELAY:
            p1, p2 = config.no_relay
            rows.append(_row(no_relay_rates(params.h11, params.h21, p1, p2), None))
        elif scheme is SchemeId.GQF:
            if config.swept == "sigma_q2":
                rows.append(_row(gqf_rates(point), point.sigma_q2))
            else:
                optimum = gqf_optimize_sigma(point)
                at_opt = replace(point, sigma_q2=optimum.sigma_q2)
                rows.append(_row(gqf_rates(at_opt), optimum.sigma_q2))
        else:  # CF
            if config.swept == "sigma_q2":
                region = cf_rates(point)
                rows.append(_row(region, point.sigma_q2))
            else:
                at_threshold = cf_operating_point(point)
                region = cf_rates(at_threshold)
                rows.append(_row(region, at_threshold.sigma_q2))
    return tuple(rows)


def _dm_rows(
    config: SweepConfig, scheme: SchemeId, values: tuple[float, ...]
) -> tuple[RegionRow, ...]:
    spec = config.dm_spec
    if config.topology == "marc":
        evaluate = {
            SchemeId.GQF: gqf_region_marc,
            SchemeId.CF: cf_region_marc,
            SchemeId.NO_RELAY: no_relay_region_marc,
        }[scheme]
    else:
        evaluate = {
            SchemeId.GQF: gqf_region_cmacr,
            SchemeId.CF: cf_region_cmacr,
            SchemeId.NO_RELAY: no_relay_region_cmacr,
        }[scheme]
    return tuple(
        _row(evaluate(spec, validate_beta(value)), None) for value in values
    )


def run_sweep(config: SweepConfig) -> SweepResult:
    """Evaluate every scheme at every grid point.

    Backend errors are re-raised with the offending grid point prepended to
    the message so a failing sweep names the value that broke it.
    """
    values = config.grid.values()
    rows: dict[SchemeId, tuple[RegionRow, ...]] = {}
    for scheme in config.schemes:
        try:
            if config.model == "gaussian":
                rows[scheme] = _gaussian_rows(config, scheme, values)
            else:
                rows[scheme] = _dm_rows(config, scheme, values)
        except HdmarcError as exc:
            raise type(exc)(
                f"sweep failed for scheme {scheme.value}: {exc}"
            ) from exc
    return SweepResult(
        swept=config.swept,
        values=values,
        schemes=config.schemes,
        rows=rows,
        log_axis=config.grid.spacing == "log",
    )


def _fmt(value: float) -> str:
    return format(float(value), f".{CSV_DIGITS}g")


def render_csv(result: SweepResult) -> str:
    """The CSV text of a sweep (deterministic; see the module docstring)."""
    lines = [CSV_HEADER]
    for scheme in result.schemes:
        for value, row in zip(result.values, result.rows[scheme]):
            diag = "" if row.diag_sigma is None else _fmt(row.diag_sigma)
            lines.append(
                ",".join(
                    (
                        _fmt(value),
                        scheme.value,
                        _fmt(row.r1),
                        _fmt(row.r2),
                        _fmt(row.rsum),
                        "true" if row.feasible else "false",
                        diag,
                    )
                )
            )
    return "\n".join(lines) + "\n"


def emit_csv(result: SweepResult, path: str) -> None:
    """Write the sweep CSV to ``path`` (UTF-8)."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(render_csv(result))


def render_plot_script(result: SweepResult, script_path: str, csv_path: str) -> str:
    """The gnuplot script text plotting per-scheme sum rates from the CSV.

    The script refers to the CSV by a path relative to its own directory,
    so the pair can be moved together.
    """
    rel_csv = os.path.relpath(
        os.path.abspath(csv_path), os.path.dirname(os.path.abspath(script_path))
    )
    lines = [
        "# Sum-rate curves from the sweep CSV emitted alongside this script.",
        "set datafile separator ','",
        f"set xlabel '{result.swept}'",
        "set ylabel 'sum rate (bits/channel use)'",
        "set key bottom right",
        "set grid",
    ]
    if result.log_axis:
        lines.append("set logscale x")
    lines.append(f"csv = '{rel_csv}'")
    plots = [
        f"    csv skip 1 using 1:(strcol(2) eq '{scheme.value}' ? column(5) : NaN) "
        f"with lines title '{scheme.value}'"
        for scheme in result.schemes
    ]
    lines.append("plot \\")
    lines.append(", \\\n".join(plots))
    return "\n".join(lines) + "\n"


def emit_plot_script(result: SweepResult, script_path: str, csv_path: str) -> None:
    """Write the gnuplot script to ``script_path`` (UTF-8)."""
    with open(script_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(render_plot_script(result, script_path, csv_path))
