"""Closed-form demon power for each bath and normalization.

All curves share the tap factor ``r**2 * (1 - r**2)``: no power without a
monitor tap, no power when everything is tapped.  Writing ``R2 = r**2``:

* uncorrelated thermal, per input single:
  ``2 * nbar / (1 - nbar)**2 * R2 * (1 - R2)`` (valid for ``nbar < 1``)
* split thermal: identically 0 at every reflectivity
* cross-mode pairs, per single: ``2 * eps2 * R2 * (1 - R2)``;
  per pair: ``2 * R2 * (1 - R2)``
* bunched pairs, per single: ``2 * eps2 * (2 * v2 - 1) * R2 * (1 - R2)``;
  per pair: ``2 * (2 * v2 - 1) * R2 * (1 - R2)``

The thermal law is first order in ``nbar``: the event-level pipeline and
Monte Carlo drift below it by an O(nbar**2) amount (about 6 * R2 * (1-R2)
* nbar**2), which callers comparing the two must allow for.  The pair laws
are exact for the two-photon truncated sources.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .fock import as_amplitude, as_efficiency, as_nbar, as_visibility
from .sources import SourceKind, THERMAL_KINDS


class Normalization(str, Enum):
    SINGLES = "singles"
    PAIRS = "pairs"


class DeltaNEstimate(NamedTuple):
    """Feed-forward power with a calibration diagnostic."""

    value: float
    bar_balanced: bool


class PeakPower(NamedTuple):
    """Argmax reflectivity (None when the curve is degenerate) and the value."""

    r2_opt: float | None
    value: float


@dataclass(frozen=True)
class PowerCurve:
    """A sampled closed-form curve: (r2, value) pairs plus its parameters."""

    kind: SourceKind
    normalization: Normalization
    samples: tuple[tuple[float, float], ...]
    params: dict


def closed_form_power(kind: SourceKind, normalization: Normalization, r, *,
                      nbar: float | None = None, eps2: float | None = None,
                      v2: float | None = None) -> float:
    """Evaluate the closed-form normalized power at tap amplitude ``r``."""
    kind = SourceKind(kind)
    normalization = Normalization(normalization)
    r = as_amplitude(r)
    tap = r * r * (1.0 - r * r)

    if kind in THERMAL_KINDS and normalization is Normalization.PAIRS:
        raise ValueError(f"pair normalization is undefined for {kind.value}")

    if kind is SourceKind.SPLIT_THERMAL:
        return 0.0

    if kind is SourceKind.UNCORRELATED:
        if nbar is None:
            raise ValueError("uncorrelated power requires nbar")
        nbar = as_nbar(nbar)
        if nbar >= 1.0:
            raise ValueError(f"closed form diverges at nbar >= 1, got {nbar}")
        return 2.0 * nbar / (1.0 - nbar) ** 2 * tap

    if kind is SourceKind.CORRELATED:
        visibility_factor = 1.0
    else:
        if v2 is None:
            raise ValueError("anti_correlated power requires v2")
        visibility_factor = 2.0 * as_visibility(v2) - 1.0

    if normalization is Normalization.PAIRS:
        return 2.0 * visibility_factor * tap
    if eps2 is None:
        raise ValueError(f"singles-normalized {kind.value} power requires eps2")
    return 2.0 * as_efficiency(eps2) * visibility_factor * tap


def construct_delta_n(bar: float, cross: float, feed_forward: float,
                      bar_stderr: float = 0.0) -> DeltaNEstimate:
    """Combine the three run modes into the demon power.

    The reported power is ``feed_forward - cross``; the bar run is the
    balance check and only feeds the diagnostic, which flags an imbalance
    beyond three standard errors.
    """
    if bar_stderr < 0:
        raise ValueError("bar_stderr must be >= 0")
    balanced = abs(bar) <= 3.0 * bar_stderr if bar_stderr > 0 else bar == 0
    return DeltaNEstimate(feed_forward - cross, balanced)


def peak_power(kind: SourceKind, normalization: Normalization, *,
               nbar: float | None = None, eps2: float | None = None,
               v2: float | None = None) -> PeakPower:
    """Maximize the closed form over ``r2`` in [0, 1].

    Every curve is ``coefficient * r2 * (1 - r2)``, so a positive
    coefficient peaks at ``r2 = 0.5``.  A zero or negative coefficient has
    no interior peak; the maximum value 0 sits on the boundary and the
    argmax is reported as None.
    """
    half = closed_form_power(kind, normalization, math.sqrt(0.5),
                             nbar=nbar, eps2=eps2, v2=v2)
    if half > 0.0:
        return PeakPower(0.5, half)
    return PeakPower(None, 0.0)


def power_curve(kind: SourceKind, normalization: Normalization,
                r2_grid, *, nbar: float | None = None,
                eps2: float | None = None, v2: float | None = None) -> PowerCurve:
    samples = tuple(
        (float(r2), closed_form_power(kind, normalization, math.sqrt(r2),
                                      nbar=nbar, eps2=eps2, v2=v2))
        for r2 in r2_grid
    )
    params = {k: v for k, v in (("nbar", nbar), ("eps2", eps2), ("v2", v2))
              if v is not None}
    return PowerCurve(SourceKind(kind), Normalization(normalization), samples, params)


def peak_enhancement_ratio(nbar: float) -> float:
    """Peak pair-normalized cross-mode power over peak thermal singles power.

    A reported diagnostic: how much stronger the pair-fed demon is at its
    best reflectivity than the thermal-fed demon at the same mean photon
    number.  Both peaks sit at ``r2 = 0.5``.
    """
    pair = peak_power(SourceKind.CORRELATED, Normalization.PAIRS).value
    thermal = peak_power(SourceKind.UNCORRELATED, Normalization.SINGLES,
                         nbar=nbar).value
    if thermal <= 0.0:
        raise ValueError("thermal peak vanishes; need nbar > 0")
    return pair / thermal
