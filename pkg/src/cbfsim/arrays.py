"""Uniform linear array geometry, steering vectors, beam patterns, and the
angular flatness metric for sub-array beamforming.

Conventions: element pitch is given in wavelengths, angles in radians from
broadside, and every beam gain carries a 1/sqrt(N_s) scale so that one
sub-array radiating at full power has unit mean power over a phase period.
All objects are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "UNIT_MODULUS_TOL",
    "ArrayGeometry",
    "AngleGrid",
    "SteeringVector",
    "WeightVector",
    "BeamPattern",
    "CompositePattern",
    "same_grid",
    "gain_power",
    "element_gains",
    "subarray_gains",
    "steering_vector",
    "beam_pattern",
    "composite_pattern",
    "pattern_variance",
]

UNIT_MODULUS_TOL = 1e-12


def _readonly(values, dtype=None) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


def gain_power(gains) -> np.ndarray:
    """Squared magnitude of complex gains, computed without a sqrt round trip."""
    g = np.asarray(gains)
    return g.real ** 2 + g.imag ** 2


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """A ULA of isotropic elements split into equal sub-arrays, one RF chain
    per sub-array.  The default partition assigns contiguous element blocks;
    a custom partition maps each element index to its sub-array."""

    total_elements: int
    num_subarrays: int
    spacing: float = 0.5
    partition: tuple[int, ...] | None = None

    def __post_init__(self):
        n, m = self.total_elements, self.num_subarrays
        if n < 1 or m < 1:
            raise ValueError("total_elements and num_subarrays must be >= 1")
        if n % m != 0:
            raise ValueError(f"{n} elements cannot form {m} equal sub-arrays")
        if not self.spacing > 0:
            raise ValueError("element spacing must be positive")
        if self.partition is not None:
            part = tuple(int(p) for p in self.partition)
            if len(part) != n:
                raise ValueError("partition must assign every element exactly once")
            counts = np.bincount(part, minlength=m)
            if counts.size != m or not np.all(counts == n // m):
                raise ValueError("every sub-array must receive exactly N_s elements")
            object.__setattr__(self, "partition", part)

    @property
    def subarray_size(self) -> int:
        return self.total_elements // self.num_subarrays

    def subarray_offsets(self, subarray: int) -> np.ndarray:
        """Global element indices driven by RF chain ``subarray`` (0-based)."""
        if not 0 <= subarray < self.num_subarrays:
            raise ValueError(
                f"sub-array index {subarray} outside 0..{self.num_subarrays - 1}"
            )
        if self.partition is None:
            start = subarray * self.subarray_size
            return np.arange(start, start + self.subarray_size)
        return np.flatnonzero(np.asarray(self.partition) == subarray)


@dataclass(frozen=True, eq=False)
class AngleGrid:
    """Strictly increasing sample angles plus the measure they are uniform in
    ("theta" or "psi", the per-element phase increment)."""

    points: np.ndarray
    measure: str = "theta"
    name: str | None = None

    def __post_init__(self):
        pts = _readonly(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("an angle grid needs at least two points")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        if self.measure not in ("theta", "psi"):
            raise ValueError(f"unknown grid measure {self.measure!r}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size

    @classmethod
    def uniform_theta(cls, num_points: int = 512) -> "AngleGrid":
        """Angles uniform in theta over the ULA visible region [-pi/2, pi/2)."""
        pts = np.linspace(-np.pi / 2, np.pi / 2, num_points, endpoint=False)
        return cls(pts, "theta", name="uniform-theta")

    @classmethod
    def uniform_psi(cls, num_points: int = 512, spacing: float = 0.5) -> "AngleGrid":
        """Angles whose per-element phase increment sweeps [-pi, pi) uniformly.

        Requires spacing >= half a wavelength; below that the array cannot
        see a full phase period.
        """
        if spacing < 0.5:
            raise ValueError("uniform-psi grids need spacing >= 0.5 wavelengths")
        psi = np.linspace(-np.pi, np.pi, num_points, endpoint=False)
        pts = np.arcsin(psi / (2 * np.pi * spacing))
        return cls(pts, "psi", name="uniform-psi")


def same_grid(a: AngleGrid, b: AngleGrid) -> bool:
    return a is b or (a.measure == b.measure and np.array_equal(a.points, b.points))


@dataclass(frozen=True, eq=False)
class SteeringVector:
    """Plane-wave phase profile of one sub-array at a departure angle."""

    angle: float
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _readonly(self.entries, dtype=complex))


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Analog phase-shifter settings for one sub-array; entries unit modulus."""

    entries: np.ndarray

    def __post_init__(self):
        ent = _readonly(self.entries, dtype=complex)
        if ent.ndim != 1 or ent.size < 1:
            raise ValueError("weights must be a non-empty 1-D sequence")
        if np.max(np.abs(np.abs(ent) - 1.0)) > UNIT_MODULUS_TOL:
            raise ValueError("weight entries must have unit modulus")
        object.__setattr__(self, "entries", ent)

    def __len__(self) -> int:
        return self.entries.size

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.entries)


@dataclass(frozen=True, eq=False)
class BeamPattern:
    """Complex gain of one weight vector sampled on an angle grid."""

    grid: AngleGrid
    gains: np.ndarray
    normalization: float

    def __post_init__(self):
        g = _readonly(self.gains, dtype=complex)
        if g.shape != self.grid.points.shape:
            raise ValueError("gains must have one value per grid point")
        object.__setattr__(self, "gains", g)

    @cached_property
    def power(self) -> np.ndarray:
        return _readonly(gain_power(self.gains))


@dataclass(frozen=True, eq=False)
class CompositePattern:
    """Equal-split combination of member patterns: power is the member mean."""

    members: tuple[BeamPattern, ...]
    power: np.ndarray
    amplitude: np.ndarray
    variance: float

    @property
    def grid(self) -> AngleGrid:
        return self.members[0].grid


def steering_vector(geometry: ArrayGeometry, subarray: int, angle: float) -> SteeringVector:
    """Far-field steering vector of one sub-array, carrying the global element
    offsets so inter-sub-array phase relationships stay physical."""
    if abs(angle) > np.pi / 2:
        raise ValueError("departure angle outside the ULA front half-plane")
    offsets = geometry.subarray_offsets(subarray)
    entries = np.exp(-2j * np.pi * geometry.spacing * offsets * np.sin(angle))
    return SteeringVector(angle=float(angle), entries=entries)


def steering_basis(offsets, spacing: float, angles) -> np.ndarray:
    """Plane-wave phase matrix exp(-j*2*pi*spacing*offsets[n]*sin(angle)),
    one row per angle.  Build it once when many weight vectors share a grid."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    return np.exp(np.outer(np.sin(angles), -2j * np.pi * spacing * np.asarray(offsets)))


def element_gains(entries, offsets, spacing: float, angles, scale: float) -> np.ndarray:
    """Scaled array gain sum_n entries[n] * exp(-j*2*pi*spacing*offsets[n]*sin(angle))."""
    entries = np.asarray(entries, dtype=complex)
    return (steering_basis(offsets, spacing, angles) @ entries) * scale


def subarray_gains(entries, geometry: ArrayGeometry, subarray: int, angles) -> np.ndarray:
    """Gain of raw weight entries on the given sub-array, 1/sqrt(N_s) scaled."""
    ns = geometry.subarray_size
    return element_gains(
        entries, geometry.subarray_offsets(subarray), geometry.spacing, angles,
        1.0 / np.sqrt(ns),
    )


def beam_pattern(
    weights: WeightVector, geometry: ArrayGeometry, subarray: int, grid: AngleGrid
) -> BeamPattern:
    """Complex gain versus angle for a weight vector driving one sub-array."""
    if len(weights) != geometry.subarray_size:
        raise ValueError(
            f"weight length {len(weights)} != sub-array size {geometry.subarray_size}"
        )
    gains = subarray_gains(weights.entries, geometry, subarray, grid.points)
    return BeamPattern(grid=grid, gains=gains,
                       normalization=1.0 / np.sqrt(geometry.subarray_size))


def composite_pattern(patterns) -> CompositePattern:
    """Combine member patterns into the equal-split composite.

    The composite power at each angle is the mean of the member powers; the
    amplitude is its square root.  All members must share one grid.
    """
    members = tuple(patterns)
    if not members:
        raise ValueError("composite needs at least one member pattern")
    grid = members[0].grid
    for p in members[1:]:
        if not same_grid(grid, p.grid):
            raise ValueError("member patterns must share one angle grid")
    total = members[0].power
    for p in members[1:]:
        total = total + p.power
    power = total / len(members)
    return CompositePattern(
        members=members,
        power=_readonly(power),
        amplitude=_readonly(np.sqrt(power)),
        variance=_variance_of_power(power),
    )


def _variance_of_power(power: np.ndarray) -> float:
    mean = power.mean()
    return float(((power - mean) ** 2).mean())


def pattern_variance(pattern, grid: AngleGrid | None = None) -> float:
    """Mean squared deviation of |gain|^2 from its grid mean; zero iff flat.

    Accepts a BeamPattern or CompositePattern.  The optional grid argument
    just asserts the pattern was sampled on that grid.
    """
    if grid is not None and not same_grid(grid, pattern.grid):
        raise ValueError("pattern was not sampled on the given grid")
    return _variance_of_power(pattern.power)
