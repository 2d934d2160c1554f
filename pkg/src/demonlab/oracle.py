"""Brute-force reference results by per-photon path enumeration.

The fast pipeline reasons about whole distributions; this module instead
walks every photon through every fate, one branch at a time.  For each
source occupation ``(n_a, n_b)`` each photon independently takes one of
three paths: lost (probability ``1 - eps2``), tapped to its monitor
detector (``eps2 * r**2``), or kept (``eps2 * (1 - r**2)``).  Branch
weights multiply, clicks come from counting tapped photons, and the switch
permutes the kept counts.  No binomial coefficients, no channel algebra,
nothing shared with the distribution pipeline, so agreement is meaningful.

Everything here is deliberately slow and simple.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .fock import DEFAULT_CUTOFF, as_amplitude, as_efficiency, as_nbar, joint_detection_pmf
from .protocol import (
    ClickPattern,
    DemonOutcome,
    OUTCOME_MODES,
    Policy,
    SwitchState,
)
from .sources import IN_A, IN_B, SourceSpec, make_source

MAX_PATHS = 2_000_000

_FATES = ("lost", "tapped", "kept")


@dataclass(frozen=True)
class OracleReport:
    """Exact path-summed outcome table plus the headline numbers."""

    table: dict[tuple[int, ...], float]
    p_a: float
    p_b: float
    truncation_bound: float
    paths: int

    @property
    def delta(self) -> float:
        return self.p_a - self.p_b

    def as_dict(self) -> dict:
        return {
            "modes": list(OUTCOME_MODES),
            "table": {" ".join(map(str, occ)): p for occ, p in sorted(self.table.items())},
            "p_a": self.p_a,
            "p_b": self.p_b,
            "delta": self.delta,
            "truncation_bound": self.truncation_bound,
            "paths": self.paths,
        }


def enumerate_outcomes(spec: SourceSpec, r, eps2, policy: Policy,
                       cutoff: int = DEFAULT_CUTOFF) -> OracleReport:
    """Walk every photon path of a source through the demon."""
    r = as_amplitude(r)
    eps2 = as_efficiency(eps2)
    source = make_source(spec, cutoff)
    ia = source.mode_index(IN_A)
    ib = source.mode_index(IN_B)

    n_paths = sum(3 ** (occ[ia] + occ[ib]) for occ in source.entries)
    if n_paths > MAX_PATHS:
        raise ValueError(f"{n_paths} paths exceeds the {MAX_PATHS} budget; lower the cutoff")

    fate_prob = {"lost": 1.0 - eps2, "tapped": eps2 * r * r, "kept": eps2 * (1.0 - r * r)}
    table: dict[tuple[int, ...], float] = {}
    p_a_terms: list[float] = []
    p_b_terms: list[float] = []

    for occ, w in source.entries.items():
        n_a, n_b = occ[ia], occ[ib]
        for fates_a in itertools.product(_FATES, repeat=n_a):
            w_a = w
            for f in fates_a:
                w_a *= fate_prob[f]
            if w_a == 0.0:
                continue
            kept_a = fates_a.count("kept")
            dem_a = fates_a.count("tapped")
            for fates_b in itertools.product(_FATES, repeat=n_b):
                w_ab = w_a
                for f in fates_b:
                    w_ab *= fate_prob[f]
                if w_ab == 0.0:
                    continue
                kept_b = fates_b.count("kept")
                dem_b = fates_b.count("tapped")
                clicks = ClickPattern(dem_a >= 1, dem_b >= 1)
                out_a, out_b = kept_a, kept_b
                if policy.switch_for(clicks) is SwitchState.CROSS:
                    out_a, out_b = out_b, out_a
                key = (out_a, out_b, dem_a, dem_b,
                       n_a - kept_a - dem_a, n_b - kept_b - dem_b)
                table[key] = table.get(key, 0.0) + w_ab
                if out_a >= 1:
                    p_a_terms.append(w_ab)
                if out_b >= 1:
                    p_b_terms.append(w_ab)

    return OracleReport(table, math.fsum(p_a_terms), math.fsum(p_b_terms),
                        source.lost_mass, n_paths)


def compare(report: OracleReport, outcome: DemonOutcome,
            tol: float = 1e-12) -> float:
    """Entrywise max deviation between oracle table and pipeline outcome.

    Raises if the outcome's mode order differs or the deviation exceeds
    ``tol``; returns the max deviation otherwise.
    """
    if outcome.dist.mode_labels != OUTCOME_MODES:
        raise ValueError(f"outcome modes {outcome.dist.mode_labels} != {OUTCOME_MODES}")
    keys = set(report.table) | set(outcome.dist.entries)
    worst = 0.0
    for key in keys:
        dev = abs(report.table.get(key, 0.0) - outcome.dist.entries.get(key, 0.0))
        if dev > worst:
            worst = dev
    if worst > tol:
        raise AssertionError(f"oracle and pipeline disagree by {worst:.3e} > {tol:.1e}")
    return worst


def clicks_vs_kept_joint(report: OracleReport) -> dict:
    """Collapse the oracle table to (binary clicks, kept photon numbers).

    Meaningful on a pre-switch (all-bar) report, where the output modes
    still hold each arm's own kept photons.
    """
    joint: dict[tuple[tuple[bool, bool], tuple[int, int]], float] = {}
    for (out_a, out_b, dem_a, dem_b, _la, _lb), p in report.table.items():
        key = ((dem_a >= 1, dem_b >= 1), (out_a, out_b))
        joint[key] = joint.get(key, 0.0) + p
    return joint


# Transcriptions of the closed-form imbalance expressions, for cross-checks.

def symbolic_delta_uncorrelated(nbar, r) -> float:
    """Two-photon truncated thermal imbalance:
    ``2 * (P(0,0) * P(1,1) - P(0,1) * P(1,0))`` with the joint tap pmf."""
    p = lambda m, n: joint_detection_pmf(nbar, r, m, n)
    return 2.0 * (p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0))


def truncated_uncorrelated_delta(nbar, r, policy: Policy) -> float:
    """Imbalance of the per-arm table truncated to at most one photon per port.

    Keeps exactly the (kept, tapped) cells (0,0), (0,1), (1,0), (1,1) of
    each arm, the truncation under which the thermal closed form is exact.
    Enumerates the 16 products directly.
    """
    nbar = as_nbar(nbar)
    cells = [(0, 0), (0, 1), (1, 0), (1, 1)]  # (kept, tapped)
    p_a = p_b = 0.0
    for ka, da in cells:
        wa = joint_detection_pmf(nbar, r, ka, da)
        for kb, db in cells:
            w = wa * joint_detection_pmf(nbar, r, kb, db)
            out_a, out_b = ka, kb
            if policy.switch_for(ClickPattern(da >= 1, db >= 1)) is SwitchState.CROSS:
                out_a, out_b = out_b, out_a
            p_a += w * (out_a >= 1)
            p_b += w * (out_b >= 1)
    return p_a - p_b


def symbolic_delta_pairs(pair_weight: float, r, eps2,
                         visibility_factor: float = 1.0) -> float:
    """Pair-source imbalance: ``weight * factor * 2 * eps2**2 * r**2 * (1 - r**2)``.

    ``pair_weight`` is the probability that a slot carries a pair;
    ``visibility_factor`` is ``2 * v2 - 1`` for bunched pairs and 1 for
    cross-mode pairs.
    """
    r = as_amplitude(r)
    eps2 = as_efficiency(eps2)
    return pair_weight * visibility_factor * 2.0 * eps2 * eps2 * r * r * (1.0 - r * r)
