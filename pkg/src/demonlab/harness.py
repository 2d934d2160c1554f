"""Config-driven sweeps over tap reflectivity, with report emission.

A sweep config is a JSON object:

    {
      "version": 1,
      "seed": 1,
      "engine": "analytic" | "montecarlo" | "both",
      "slots": 1000000,
      "include_info": false,
      "grid": [0.0, 0.1, ...] or {"start": 0.0, "stop": 0.5, "step": 0.025},
      "sources": [
        {"name": "...", "kind": "uncorrelated", "nbar": 0.05,
         "eps2": 1.0, "normalization": "singles"},
        {"name": "...", "kind": "correlated", "s2": 0.01,
         "normalization": "pairs"}
      ]
    }

Grid values are tap reflectivities r**2.  Every malformed field raises
``ConfigError`` naming the offending path.  Reports carry one row per
source per grid point and can be emitted as CSV, JSON, or a standalone
SVG chart; identical configs produce byte-identical reports.
"""
from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .analytics import Normalization, closed_form_power
from .information import mutual_information
from .montecarlo import measure_power
from .oracle import compare, enumerate_outcomes
from .protocol import canonical_policy, propagate
from .sources import PAIR_KINDS, SourceKind, SourceSpec, make_source

DEFAULT_GRID = {"start": 0.0, "stop": 0.5, "step": 0.025}

ENGINES = ("analytic", "montecarlo", "both")


class ConfigError(ValueError):
    """Invalid sweep config; the message names the field at fault."""


def _fail(path: str, message: str) -> ConfigError:
    return ConfigError(f"{path}: {message}")


def _get_number(data: dict, path: str, key: str, default=None, required=False):
    if key not in data:
        if required:
            raise _fail(f"{path}.{key}", "required field is missing")
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(f"{path}.{key}", f"expected a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class SourceSeries:
    name: str
    spec: SourceSpec
    eps2: float
    normalization: Normalization


@dataclass(frozen=True)
class SweepConfig:
    seed: int
    engine: str
    slots: int
    include_info: bool
    grid: tuple[float, ...]
    sources: tuple[SourceSeries, ...]


_KIND_ALIASES = {
    "uncorrelated": SourceKind.UNCORRELATED,
    "split_thermal": SourceKind.SPLIT_THERMAL,
    "correlated": SourceKind.CORRELATED,
    "anti_correlated": SourceKind.ANTI_CORRELATED,
}


def _parse_source(data, path: str, needs_events: bool) -> SourceSeries:
    if not isinstance(data, dict):
        raise _fail(path, "each source must be an object")
    known = {"name", "kind", "nbar", "s2", "v2", "eps2", "normalization",
             "drop_vacuum"}
    for key in data:
        if key not in known:
            raise _fail(f"{path}.{key}", "unknown field")
    kind_raw = data.get("kind")
    if not isinstance(kind_raw, str):
        raise _fail(f"{path}.kind", "required field is missing or not a string")
    kind = _KIND_ALIASES.get(kind_raw.replace("-", "_").lower())
    if kind is None:
        raise _fail(f"{path}.kind",
                    f"unknown kind {kind_raw!r}; expected one of "
                    f"{sorted(_KIND_ALIASES)}")
    drop_vacuum = data.get("drop_vacuum", False)
    if not isinstance(drop_vacuum, bool):
        raise _fail(f"{path}.drop_vacuum", "expected true or false")
    if drop_vacuum and needs_events:
        raise _fail(f"{path}.drop_vacuum",
                    "incompatible with the montecarlo engine")
    eps2 = _get_number(data, path, "eps2", default=1.0)
    if not 0.0 <= eps2 <= 1.0:
        raise _fail(f"{path}.eps2", "must lie in [0, 1]")
    try:
        if kind in PAIR_KINDS:
            if "nbar" in data:
                raise _fail(f"{path}.nbar", f"not a parameter of {kind_raw!r}")
            s2 = _get_number(data, path, "s2", required=True)
            if kind is SourceKind.ANTI_CORRELATED:
                v2 = _get_number(data, path, "v2", required=True)
                spec = SourceSpec.anti_correlated(s2=s2, v2=v2,
                                                 drop_vacuum=drop_vacuum)
            else:
                if "v2" in data:
                    raise _fail(f"{path}.v2", f"not a parameter of {kind_raw!r}")
                spec = SourceSpec.correlated(s2=s2, drop_vacuum=drop_vacuum)
        else:
            for key in ("s2", "v2"):
                if key in data:
                    raise _fail(f"{path}.{key}", f"not a parameter of {kind_raw!r}")
            nbar = _get_number(data, path, "nbar", required=True)
            if kind is SourceKind.UNCORRELATED:
                spec = SourceSpec.uncorrelated(nbar)
            else:
                spec = SourceSpec.split_thermal(nbar)
    except ConfigError:
        raise
    except ValueError as exc:
        raise _fail(path, str(exc)) from exc
    norm_raw = data.get("normalization", "singles")
    try:
        norm = Normalization(norm_raw)
    except ValueError:
        raise _fail(f"{path}.normalization",
                    f"expected 'singles' or 'pairs', got {norm_raw!r}") from None
    if norm is Normalization.PAIRS and kind not in PAIR_KINDS:
        raise _fail(f"{path}.normalization",
                    f"pair normalization is undefined for {kind_raw!r}")
    name = data.get("name", kind_raw)
    if not isinstance(name, str) or not name:
        raise _fail(f"{path}.name", "must be a non-empty string")
    return SourceSeries(name, spec, eps2, norm)


def _parse_grid(data, path: str) -> tuple[float, ...]:
    if isinstance(data, list):
        values = []
        for i, value in enumerate(data):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise _fail(f"{path}[{i}]", f"expected a number, got {value!r}")
            values.append(float(value))
    elif isinstance(data, dict):
        for key in data:
            if key not in ("start", "stop", "step"):
                raise _fail(f"{path}.{key}", "unknown field")
        start = _get_number(data, path, "start", required=True)
        stop = _get_number(data, path, "stop", required=True)
        step = _get_number(data, path, "step", required=True)
        if step <= 0:
            raise _fail(f"{path}.step", "must be > 0")
        if stop < start:
            raise _fail(f"{path}.stop", "must be >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(count)]
    else:
        raise _fail(path, "expected a list of reflectivities or "
                          "{start, stop, step}")
    if not values:
        raise _fail(path, "grid is empty")
    for i, r2 in enumerate(values):
        if not 0.0 <= r2 < 1.0:
            raise _fail(f"{path}[{i}]", f"reflectivity {r2!r} outside [0, 1)")
    return tuple(values)


def parse_sweep_config(data) -> SweepConfig:
    """Validate a decoded JSON object into a ``SweepConfig``."""
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    known = {"version", "seed", "engine", "slots", "include_info", "grid",
             "sources"}
    for key in data:
        if key not in known:
            raise _fail(f"config.{key}", "unknown field")
    version = data.get("version", 1)
    if version != 1:
        raise _fail("config.version", f"unsupported version {version!r}")
    engine = data.get("engine", "analytic")
    if engine not in ENGINES:
        raise _fail("config.engine", f"expected one of {ENGINES}, got {engine!r}")
    seed = data.get("seed", 1)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise _fail("config.seed", "must be a 64-bit unsigned integer")
    slots = data.get("slots", 1_000_000)
    if isinstance(slots, bool) or not isinstance(slots, int) or slots < 1:
        raise _fail("config.slots", "must be a positive integer")
    include_info = data.get("include_info", False)
    if not isinstance(include_info, bool):
        raise _fail("config.include_info", "expected true or false")
    grid = _parse_grid(data.get("grid", DEFAULT_GRID), "config.grid")
    raw_sources = data.get("sources")
    if not isinstance(raw_sources, list) or not raw_sources:
        raise _fail("config.sources", "expected a non-empty list")
    needs_events = engine in ("montecarlo", "both")
    sources = tuple(_parse_source(entry, f"config.sources[{i}]", needs_events)
                    for i, entry in enumerate(raw_sources))
    names = [s.name for s in sources]
    if len(set(names)) != len(names):
        raise _fail("config.sources", f"duplicate source names in {names}")
    return SweepConfig(seed, engine, slots, include_info, grid, sources)


def load_config(path: str) -> SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON at line {exc.lineno} "
                          f"column {exc.colno}: {exc.msg}") from exc
    return parse_sweep_config(data)


PRESETS: dict[str, dict] = {
    # Singles-normalized power of all four baths at matched brightness.
    "fig4a": {
        "version": 1,
        "engine": "analytic",
        "sources": [
            {"name": "uncorrelated", "kind": "uncorrelated", "nbar": 0.05,
             "eps2": 0.14, "normalization": "singles"},
            {"name": "split-thermal", "kind": "split_thermal", "nbar": 0.05,
             "eps2": 0.14, "normalization": "singles"},
            {"name": "correlated", "kind": "correlated", "s2": 0.01,
             "eps2": 0.14, "normalization": "singles"},
            {"name": "anti-correlated", "kind": "anti_correlated", "s2": 0.01,
             "v2": 0.87, "eps2": 0.14, "normalization": "singles"},
        ],
    },
    # Pair-normalized pair sources against the thermal singles baseline.
    "fig4b": {
        "version": 1,
        "engine": "analytic",
        "sources": [
            {"name": "uncorrelated", "kind": "uncorrelated", "nbar": 0.05,
             "eps2": 1.0, "normalization": "singles"},
            {"name": "correlated-pairs", "kind": "correlated", "s2": 0.01,
             "eps2": 1.0, "normalization": "pairs"},
            {"name": "anti-correlated-pairs", "kind": "anti_correlated",
             "s2": 0.01, "v2": 0.87, "eps2": 1.0, "normalization": "pairs"},
        ],
    },
    # Mutual information sweeps at the fitted and the ideal coupling.
    "fig5a": {
        "version": 1,
        "engine": "analytic",
        "include_info": True,
        "sources": [
            {"name": "uncorrelated", "kind": "uncorrelated", "nbar": 0.05,
             "eps2": 0.14, "normalization": "singles"},
            {"name": "split-thermal", "kind": "split_thermal", "nbar": 0.05,
             "eps2": 0.14, "normalization": "singles"},
            {"name": "correlated", "kind": "correlated", "s2": 0.01,
             "eps2": 0.14, "normalization": "singles"},
            {"name": "anti-correlated", "kind": "anti_correlated", "s2": 0.01,
             "v2": 0.87, "eps2": 0.14, "normalization": "singles"},
        ],
    },
    "fig5b": {
        "version": 1,
        "engine": "analytic",
        "include_info": True,
        "sources": [
            {"name": "uncorrelated", "kind": "uncorrelated", "nbar": 0.05,
             "eps2": 1.0, "normalization": "singles"},
            {"name": "split-thermal", "kind": "split_thermal", "nbar": 0.05,
             "eps2": 1.0, "normalization": "singles"},
            {"name": "correlated", "kind": "correlated", "s2": 0.01,
             "eps2": 1.0, "normalization": "singles"},
            {"name": "anti-correlated", "kind": "anti_correlated", "s2": 0.01,
             "v2": 0.87, "eps2": 1.0, "normalization": "singles"},
        ],
    },
}


def preset_config(name: str) -> SweepConfig:
    if name not in PRESETS:
        raise ConfigError(f"config: unknown preset {name!r}; "
                          f"expected one of {sorted(PRESETS)}")
    return parse_sweep_config(json.loads(json.dumps(PRESETS[name])))


REPORT_FIELDS = ("source", "normalization", "r2", "analytic", "mc",
                 "mc_stderr", "mutual_info_bits")


@dataclass(frozen=True)
class ReportRow:
    source: str
    normalization: str
    r2: float
    analytic: float | None
    mc: float | None
    mc_stderr: float | None
    mutual_info_bits: float | None

    def as_dict(self) -> dict:
        return {field: getattr(self, field) for field in REPORT_FIELDS}


def _cell_seed(seed: int, source_index: int, grid_index: int) -> int:
    ss = np.random.SeedSequence((seed, source_index, grid_index))
    return int(ss.generate_state(1, np.uint64)[0])


def _closed_form(series: SourceSeries, r: float) -> float:
    spec = series.spec
    return closed_form_power(spec.kind, series.normalization, r,
                             nbar=spec.nbar, eps2=series.eps2, v2=spec.v2)


def run_sweep(config: SweepConfig, warn=None) -> list[ReportRow]:
    """Produce one report row per source per grid point.

    When both engines run, a Monte Carlo point further than three standard
    errors from the closed form (plus the documented quadratic allowance
    for the thermal closed form) is reported through ``warn``.
    """
    if warn is None:
        warn = lambda msg: print(msg, file=sys.stderr)
    want_analytic = config.engine in ("analytic", "both")
    want_mc = config.engine in ("montecarlo", "both")
    rows = []
    for si, series in enumerate(config.sources):
        for gi, r2 in enumerate(config.grid):
            r = math.sqrt(r2)
            analytic = _closed_form(series, r) if want_analytic else None
            mc = mc_stderr = None
            pair_norm_defined = 0.0 < r2 < 1.0
            if want_mc and (series.normalization is Normalization.SINGLES
                            or pair_norm_defined):
                measured = measure_power(series.spec, r, series.eps2,
                                         config.slots,
                                         _cell_seed(config.seed, si, gi),
                                         series.normalization)
                mc, mc_stderr = measured.value, measured.stderr
            if analytic is not None and mc is not None:
                allowance = 3.0 * mc_stderr
                if series.spec.kind is SourceKind.UNCORRELATED:
                    allowance += 5.0 * series.spec.nbar ** 2
                if abs(mc - analytic) > allowance:
                    warn(f"warning: {series.name} at r2={r2:.6g}: simulated "
                         f"{mc:.6g} vs closed form {analytic:.6g} exceeds "
                         f"{allowance:.3g}")
            info = None
            if config.include_info:
                info = mutual_information(series.spec, r,
                                          series.eps2).mutual_info_bits
            rows.append(ReportRow(series.name, series.normalization.value, r2,
                                  analytic, mc, mc_stderr, info))
    return rows


def emit_csv(rows, stream) -> None:
    stream.write(",".join(REPORT_FIELDS) + "\n")
    for row in rows:
        cells = []
        for field in REPORT_FIELDS:
            value = getattr(row, field)
            if value is None:
                cells.append("")
            elif isinstance(value, float):
                cells.append(repr(value))
            else:
                cells.append(str(value))
        stream.write(",".join(cells) + "\n")


def emit_json(rows, stream) -> None:
    json.dump([row.as_dict() for row in rows], stream, indent=2)
    stream.write("\n")


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")

_SVG_W, _SVG_H = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 60, 150, 20, 40


def _svg_series(rows):
    order = []
    series = {}
    for row in rows:
        key = (row.source, row.normalization)
        if key not in series:
            series[key] = []
            order.append(key)
        y = row.mc if row.analytic is None else row.analytic
        if y is not None:
            series[key].append((row.r2, y))
    return [(key, series[key]) for key in order]


def emit_svg(rows, stream) -> None:
    """Write a self-contained line chart of the report."""
    series = _svg_series(rows)
    points = [pt for _, pts in series for pt in pts]
    xs = [x for x, _ in points] or [0.0, 1.0]
    ys = [y for _, y in points] or [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    plot_h = _SVG_H - _MARGIN_T - _MARGIN_B

    def sx(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
           f'height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">',
           f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
           f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T + plot_h}" '
           f'x2="{_MARGIN_L + plot_w}" y2="{_MARGIN_T + plot_h}" '
           f'stroke="black"/>',
           f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
           f'y2="{_MARGIN_T + plot_h}" stroke="black"/>']
    for value, anchor in ((x_lo, "start"), (x_hi, "end")):
        out.append(f'<text x="{sx(value):.2f}" y="{_SVG_H - 12}" '
                   f'font-size="12" text-anchor="{anchor}">{value:.3g}</text>')
    for value in (y_lo, y_hi):
        out.append(f'<text x="{_MARGIN_L - 6}" y="{sy(value):.2f}" '
                   f'font-size="12" text-anchor="end">{value:.3g}</text>')
    out.append(f'<text x="{_MARGIN_L + plot_w / 2:.2f}" y="{_SVG_H - 4}" '
               f'font-size="12" text-anchor="middle">tap reflectivity</text>')
    for i, ((source, norm), pts) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        if pts:
            path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" '
                       f'stroke-width="1.5" points="{path}"/>')
        ly = _MARGIN_T + 16 + 18 * i
        lx = _MARGIN_L + plot_w + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{lx + 24}" y="{ly}" font-size="12">'
                   f'{source}/{norm}</text>')
    out.append("</svg>")
    stream.write("\n".join(out) + "\n")


def emit_report(rows, stream, format: str) -> None:
    if format == "csv":
        emit_csv(rows, stream)
    elif format == "json":
        emit_json(rows, stream)
    elif format == "svg":
        emit_svg(rows, stream)
    else:
        raise ConfigError(f"config: unknown report format {format!r}")


def _check_budget(quick: bool) -> tuple[int, float]:
    return (100_000, 4.0) if quick else (10_000_000, 3.0)


def _check_correlated_pair_power(quick: bool):
    slots, k = _check_budget(quick)
    spec = SourceSpec.correlated(s2=0.01)
    m = measure_power(spec, math.sqrt(0.5), 1.0, slots, 11, Normalization.PAIRS)
    ok = abs(m.value - 0.5) <= k * m.stderr
    return ok, f"pair-normalized power {m.value:.4f} vs 0.5 +- {k * m.stderr:.4f}"


def _check_split_null(quick: bool):
    slots, k = _check_budget(quick)
    spec = SourceSpec.split_thermal(0.05)
    worst = max(abs(closed_form_power(spec.kind, Normalization.SINGLES,
                                      math.sqrt(r2), nbar=0.05, eps2=1.0))
                for r2 in (0.1, 0.25, 0.5))
    if worst > 1e-12:
        return False, f"closed form not null: {worst:.3g}"
    m = measure_power(spec, math.sqrt(0.5), 1.0, slots, 12,
                      Normalization.SINGLES)
    ok = abs(m.value) <= k * m.stderr
    return ok, f"balanced-split power {m.value:.2e} vs 0 +- {k * m.stderr:.2e}"


def _check_uncorrelated_thermal_power(quick: bool):
    slots, k = _check_budget(quick)
    nbar = 0.05
    spec = SourceSpec.uncorrelated(nbar)
    closed = closed_form_power(spec.kind, Normalization.SINGLES,
                               math.sqrt(0.5), nbar=nbar, eps2=1.0)
    m = measure_power(spec, math.sqrt(0.5), 1.0, slots, 13,
                      Normalization.SINGLES)
    allowance = k * m.stderr + 5.0 * nbar ** 2
    ok = abs(m.value - closed) <= allowance
    return ok, (f"thermal power {m.value:.5f} vs {closed:.5f} "
                f"+- {allowance:.5f}")


def _check_anti_correlated_ratio(quick: bool):
    slots, k = _check_budget(quick)
    corr = closed_form_power(SourceKind.CORRELATED, Normalization.PAIRS,
                             math.sqrt(0.5))
    anti = closed_form_power(SourceKind.ANTI_CORRELATED, Normalization.PAIRS,
                             math.sqrt(0.5), v2=0.87)
    if abs(anti / corr - 0.74) > 1e-12:
        return False, f"closed-form ratio {anti / corr:.6f} != 0.74"
    null = closed_form_power(SourceKind.ANTI_CORRELATED, Normalization.PAIRS,
                             math.sqrt(0.5), v2=0.5)
    if abs(null) > 1e-12:
        return False, f"closed form at v2=0.5 not null: {null:.3g}"
    spec = SourceSpec.anti_correlated(s2=0.01, v2=0.87)
    m = measure_power(spec, math.sqrt(0.5), 1.0, slots, 14, Normalization.PAIRS)
    ok = abs(m.value - anti) <= k * m.stderr
    return ok, f"anti power {m.value:.4f} vs {anti:.4f} +- {k * m.stderr:.4f}"


def _check_oracle_match(quick: bool):
    worst = 0.0
    cases = [(SourceSpec.uncorrelated(0.05), 1.0),
             (SourceSpec.split_thermal(0.05), 0.8),
             (SourceSpec.correlated(s2=0.01), 1.0),
             (SourceSpec.anti_correlated(s2=0.01, v2=0.87), 0.14)]
    for spec, eps2 in cases:
        for r2 in (0.0, 0.25, 0.5):
            r = math.sqrt(r2)
            policy = canonical_policy(spec.kind)
            report = enumerate_outcomes(spec, r, eps2, policy)
            outcome = propagate(make_source(spec), r, eps2, policy)
            worst = max(worst, compare(report, outcome))
    return worst <= 1e-12, f"worst path-sum vs transfer deviation {worst:.2e}"


def _check_info_ordering(quick: bool):
    eps2 = 0.14
    r = math.sqrt(0.25)
    uncorr = mutual_information(SourceSpec.uncorrelated(0.05), r, eps2)
    corr = mutual_information(SourceSpec.correlated(s2=0.01), r, eps2)
    # The classic comparison puts the split bath's parent at the per-arm
    # brightness of the uncorrelated bath (arms at nbar/2); at equal
    # per-arm brightness the split bath reveals about twice as much.
    split = mutual_information(SourceSpec.split_thermal(0.025), r, eps2)
    zero = mutual_information(SourceSpec.correlated(s2=0.01), 0.0, eps2)
    checks = [zero.mutual_info_bits <= 1e-12,
              corr.mutual_info_bits >= uncorr.mutual_info_bits,
              split.mutual_info_bits <= uncorr.mutual_info_bits + 1e-12,
              all(x.mutual_info_bits <= 2.0 + 1e-9
                  for x in (uncorr, corr, split))]
    return all(checks), (f"I_corr={corr.mutual_info_bits:.2e} "
                         f"I_uncorr={uncorr.mutual_info_bits:.2e} "
                         f"I_split={split.mutual_info_bits:.2e} "
                         f"I(r=0)={zero.mutual_info_bits:.2e}")


def _check_g2(quick: bool):
    import warnings

    from .fock import LowPhotonRegimeWarning
    from .montecarlo import estimate_g2

    slots = 200_000 if quick else 1_000_000
    tol = 0.15 if quick else 0.05
    with warnings.catch_warnings():
        # nbar = 0.5 is deliberate here: bunching is easiest to resolve bright
        warnings.simplefilter("ignore", LowPhotonRegimeWarning)
        spec = SourceSpec.uncorrelated(0.5)
    samples = dict(estimate_g2(spec, slots, 15, [0, 5]))
    ok = abs(samples[0] - 2.0) <= tol and abs(samples[5] - 1.0) <= tol
    return ok, f"g2(0)={samples[0]:.3f} g2(5)={samples[5]:.3f} +- {tol}"


CHECK_NAMES = ("correlated_pair_power", "split_null",
               "uncorrelated_thermal_power", "anti_correlated_ratio",
               "oracle_match", "info_ordering", "g2")


def run_checks(quick: bool = True, stream=None) -> bool:
    """Run the self-test battery; one PASS/FAIL line per check."""
    if stream is None:
        stream = sys.stdout
    module = sys.modules[__name__]
    all_ok = True
    for name in CHECK_NAMES:
        check = getattr(module, f"_check_{name}")
        try:
            ok, detail = check(quick)
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        all_ok &= ok
        stream.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    return all_ok
