"""Diagonal photon-number distributions and the channels that act on them.

Everything in this package works with classical mixtures over occupation
tuples: a mapping from ``(n_1, ..., n_k)`` to probability, one slot per
labelled optical mode.  Off-diagonal (coherence) terms never enter, so a
plain probability table truncated at a total photon number is an exact
representation of the states we care about, with the truncated tail
tracked explicitly as ``lost_mass``.

Two channels cover all the optics used downstream: a tap beamsplitter that
routes each photon independently into a new mode with probability ``r**2``,
and a loss channel (binomial thinning with survival ``eps2``) that either
discards the lost photons or parks them in an explicit loss mode.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

Occupation = tuple[int, ...]

#: Default truncation: total photons per occupation tuple.
DEFAULT_CUTOFF = 4

#: Allowed slack on total probability mass (entries + lost_mass).
MASS_TOL = 1e-12

#: Above this mean photon number the two-photon power formulas degrade.
LOW_PHOTON_LIMIT = 0.2


class LowPhotonRegimeWarning(UserWarning):
    """Mean photon number left the regime the closed-form power laws assume."""


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class MeanPhotonNumber:
    """Mean occupation of a thermal mode.  Warns outside the low-photon regime."""

    nbar: float

    def __post_init__(self) -> None:
        nbar = float(self.nbar)
        if nbar < 0 or not math.isfinite(nbar):
            raise ValueError(f"mean photon number must be finite and >= 0, got {nbar!r}")
        object.__setattr__(self, "nbar", nbar)
        if nbar > LOW_PHOTON_LIMIT:
            warnings.warn(
                f"mean photon number {nbar:g} exceeds {LOW_PHOTON_LIMIT:g}; "
                "closed-form power laws are first-order in nbar and degrade here",
                LowPhotonRegimeWarning,
                stacklevel=2,
            )

    @property
    def in_low_photon_regime(self) -> bool:
        return self.nbar <= LOW_PHOTON_LIMIT

    def __float__(self) -> float:
        return self.nbar


@dataclass(frozen=True)
class ReflectionAmplitude:
    """Tap beamsplitter amplitude ``r``; the routing probability is ``r**2``."""

    r: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", _check_unit_interval("reflection amplitude", self.r))

    @classmethod
    def from_reflectivity(cls, r2: float) -> "ReflectionAmplitude":
        return cls(math.sqrt(_check_unit_interval("reflectivity", r2)))

    @property
    def r2(self) -> float:
        return self.r * self.r

    def __float__(self) -> float:
        return self.r


@dataclass(frozen=True)
class CouplingEfficiency:
    """Intensity survival probability ``eps2`` of the lossy coupling."""

    eps2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps2", _check_unit_interval("coupling efficiency", self.eps2))

    def __float__(self) -> float:
        return self.eps2


@dataclass(frozen=True)
class Visibility:
    """Two-photon interference visibility ``v2`` of the pair-bunching stage."""

    v2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "v2", _check_unit_interval("visibility", self.v2))

    def __float__(self) -> float:
        return self.v2


@dataclass(frozen=True)
class SqueezingParameter:
    """Down-conversion strength ``s``; the implied thermal mean is ``sinh(s)**2``."""

    s: float

    def __post_init__(self) -> None:
        s = float(self.s)
        if s < 0 or not math.isfinite(s):
            raise ValueError(f"squeezing parameter must be finite and >= 0, got {s!r}")
        object.__setattr__(self, "s", s)

    @property
    def nbar(self) -> float:
        return math.sinh(self.s) ** 2

    def __float__(self) -> float:
        return self.s


def as_nbar(value) -> float:
    """Coerce a number or MeanPhotonNumber to a validated float."""
    return MeanPhotonNumber(float(value)).nbar


def as_amplitude(value) -> float:
    if isinstance(value, ReflectionAmplitude):
        return value.r
    return ReflectionAmplitude(float(value)).r


def as_efficiency(value) -> float:
    return CouplingEfficiency(float(value)).eps2


def as_visibility(value) -> float:
    return Visibility(float(value)).v2


@dataclass(frozen=True)
class JointOccupationDistribution:
    """Probability table over occupation tuples for a set of labelled modes.

    Parameters
    ----------
    mode_labels:
        Ordered mode names; tuple position ``i`` holds the occupation of
        ``mode_labels[i]``.
    entries:
        Mapping from occupation tuple to probability.  Tuples whose total
        exceeds ``cutoff`` are not representable; their mass lives in
        ``lost_mass``.
    cutoff:
        Maximum total photon number across all modes.
    lost_mass:
        Probability truncated away.  ``sum(entries) + lost_mass`` must be 1
        within ``MASS_TOL``.

    Instances are immutable by convention; channels return new objects.
    """

    mode_labels: tuple[str, ...]
    entries: Mapping[Occupation, float]
    cutoff: int
    lost_mass: float = 0.0

    def __post_init__(self) -> None:
        labels = tuple(self.mode_labels)
        object.__setattr__(self, "mode_labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate mode labels: {labels}")
        if self.cutoff < 0:
            raise ValueError("cutoff must be >= 0")
        if self.lost_mass < -MASS_TOL:
            raise ValueError(f"lost_mass must be >= 0, got {self.lost_mass!r}")
        k = len(labels)
        for occ, p in self.entries.items():
            if len(occ) != k:
                raise ValueError(f"occupation {occ} does not match {k} modes")
            if any(n < 0 for n in occ):
                raise ValueError(f"negative occupation in {occ}")
            if sum(occ) > self.cutoff:
                raise ValueError(f"occupation {occ} exceeds cutoff {self.cutoff}")
            if p < -MASS_TOL:
                raise ValueError(f"negative probability {p!r} at {occ}")
        total = math.fsum(self.entries.values()) + self.lost_mass
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probability mass {total!r} is not 1")

    @classmethod
    def vacuum(cls, mode_labels: Iterable[str], cutoff: int = DEFAULT_CUTOFF):
        labels = tuple(mode_labels)
        return cls(labels, {(0,) * len(labels): 1.0}, cutoff)

    @classmethod
    def from_single_mode(cls, label: str, pmf: Mapping[int, float], cutoff: int,
                         lost_mass: float = 0.0):
        entries = {(n,): p for n, p in pmf.items() if n <= cutoff}
        return cls((label,), entries, cutoff, lost_mass)

    def mode_index(self, label: str) -> int:
        try:
            return self.mode_labels.index(label)
        except ValueError:
            raise ValueError(f"unknown mode {label!r}; have {self.mode_labels}") from None

    def probability(self, occ: Occupation) -> float:
        return float(self.entries.get(tuple(occ), 0.0))

    @property
    def total_mass(self) -> float:
        return math.fsum(self.entries.values()) + self.lost_mass

    def mean_photons(self, label: str) -> float:
        i = self.mode_index(label)
        return math.fsum(occ[i] * p for occ, p in self.entries.items())

    def marginal(self, keep: Iterable[str]) -> "JointOccupationDistribution":
        """Trace out every mode not named in ``keep`` (order follows ``keep``)."""
        keep = tuple(keep)
        idx = [self.mode_index(label) for label in keep]
        out: dict[Occupation, float] = {}
        for occ, p in self.entries.items():
            key = tuple(occ[i] for i in idx)
            out[key] = out.get(key, 0.0) + p
        return JointOccupationDistribution(keep, out, self.cutoff, self.lost_mass)

    def renamed(self, mapping: Mapping[str, str]) -> "JointOccupationDistribution":
        labels = tuple(mapping.get(label, label) for label in self.mode_labels)
        return JointOccupationDistribution(labels, dict(self.entries), self.cutoff,
                                           self.lost_mass)

    def product(self, other: "JointOccupationDistribution",
                cutoff: int | None = None) -> "JointOccupationDistribution":
        """Independent join; tuple totals above the cutoff move to lost_mass."""
        if set(self.mode_labels) & set(other.mode_labels):
            raise ValueError("product requires disjoint mode labels")
        if cutoff is None:
            cutoff = min(self.cutoff, other.cutoff)
        labels = self.mode_labels + other.mode_labels
        out: dict[Occupation, float] = {}
        for occ_a, pa in self.entries.items():
            ta = sum(occ_a)
            for occ_b, pb in other.entries.items():
                if ta + sum(occ_b) > cutoff:
                    continue
                out[occ_a + occ_b] = out.get(occ_a + occ_b, 0.0) + pa * pb
        lost = 1.0 - math.fsum(out.values())
        return JointOccupationDistribution(labels, out, cutoff, max(lost, 0.0))


def thermal_pmf(nbar, n: int) -> float:
    """Occupation probability of a thermal mode: ``nbar**n / (1+nbar)**(n+1)``."""
    nbar = as_nbar(nbar)
    if n < 0:
        raise ValueError("photon number must be >= 0")
    return nbar ** n / (1.0 + nbar) ** (n + 1)


def single_mode_thermal(nbar, cutoff: int = DEFAULT_CUTOFF,
                        label: str = "In_A") -> JointOccupationDistribution:
    """Truncated thermal state; the geometric tail is kept as lost_mass."""
    nbar = as_nbar(nbar)
    pmf = {n: thermal_pmf(nbar, n) for n in range(cutoff + 1)}
    tail = (nbar / (1.0 + nbar)) ** (cutoff + 1)
    return JointOccupationDistribution.from_single_mode(label, pmf, cutoff, tail)


def beamsplitter_split(dist: JointOccupationDistribution, mode: str, r,
                       new_mode: str) -> JointOccupationDistribution:
    """Route each photon of ``mode`` into ``new_mode`` with probability ``r**2``.

    n photons split binomially: k stay with weight
    ``C(n, k) * (1 - r**2)**k * (r**2)**(n - k)`` and ``n - k`` land in the
    appended ``new_mode``.  Total photon number is conserved, so the cutoff
    and lost_mass carry over unchanged.  ``r = 0`` is the identity up to the
    extra empty mode.
    """
    r = as_amplitude(r)
    if new_mode in dist.mode_labels:
        raise ValueError(f"mode {new_mode!r} already present")
    i = dist.mode_index(mode)
    r2 = r * r
    out: dict[Occupation, float] = {}
    for occ, p in dist.entries.items():
        n = occ[i]
        for k in range(n + 1):
            w = math.comb(n, k) * (1.0 - r2) ** k * r2 ** (n - k)
            if w == 0.0:
                continue
            key = occ[:i] + (k,) + occ[i + 1:] + (n - k,)
            out[key] = out.get(key, 0.0) + p * w
    return JointOccupationDistribution(dist.mode_labels + (new_mode,), out,
                                       dist.cutoff, dist.lost_mass)


def loss_channel(dist: JointOccupationDistribution, mode: str, eps2,
                 loss_mode: str | None = None) -> JointOccupationDistribution:
    """Binomial thinning of ``mode`` with survival probability ``eps2``.

    With ``loss_mode`` set, the lost photons are retained in that appended
    mode (a split with ``r**2 = 1 - eps2``); otherwise they are traced out.
    """
    eps2 = as_efficiency(eps2)
    if loss_mode is not None:
        return beamsplitter_split(dist, mode, math.sqrt(1.0 - eps2), loss_mode)
    i = dist.mode_index(mode)
    out: dict[Occupation, float] = {}
    for occ, p in dist.entries.items():
        n = occ[i]
        for k in range(n + 1):
            w = math.comb(n, k) * eps2 ** k * (1.0 - eps2) ** (n - k)
            if w == 0.0:
                continue
            key = occ[:i] + (k,) + occ[i + 1:]
            out[key] = out.get(key, 0.0) + p * w
    return JointOccupationDistribution(dist.mode_labels, out, dist.cutoff,
                                       dist.lost_mass)


def joint_detection_pmf(nbar, r, m: int, n: int) -> float:
    """Joint probability of ``m`` kept and ``n`` tapped photons from a thermal mode.

    Closed form for a thermal input of mean ``nbar`` split on a tap of
    amplitude ``r``::

        P(m, n) = (n+m)! / (n! m!) * nbar**(n+m) / (1+nbar)**(n+m+1)
                  * (r**2)**n * (1-r**2)**m

    ``n`` counts photons routed to the monitor port, ``m`` the transmitted
    ones.
    """
    nbar = as_nbar(nbar)
    r = as_amplitude(r)
    if m < 0 or n < 0:
        raise ValueError("photon numbers must be >= 0")
    r2 = r * r
    comb = math.factorial(n + m) // (math.factorial(n) * math.factorial(m))
    return (comb * nbar ** (n + m) / (1.0 + nbar) ** (n + m + 1)
            * r2 ** n * (1.0 - r2) ** m)
