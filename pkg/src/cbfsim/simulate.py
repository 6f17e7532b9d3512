"""Seeded Monte Carlo BER campaigns for the three broadcast schemes.

"cbf" sends Alamouti-coded pairs over two complementary beams, "rbf" sends a
single stream through a fresh random full-array pattern every block, and
"single" is the one-element benchmark at the same power budget.  Campaigns
are bit-identical for a fixed (config, seed, workers): work is partitioned
into fixed-size batches, each driven by an rng stream keyed on
(seed, angle index, SNR index, batch index), and results reduce by counter
addition, so they do not depend on how batches are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import channel as chan
from .arrays import ArrayGeometry, gain_power, subarray_gains
from .beams import ComplementaryBeamSet
from .stbc import mmse_decode_streams

__all__ = [
    "DEFAULT_ANGLES_DEG",
    "SchemeConfig",
    "SimConfig",
    "BerPoint",
    "BerCurve",
    "LinkChannel",
    "CbfSignal",
    "ScalarSignal",
    "transmit_cbf",
    "transmit_rbf",
    "transmit_single",
    "decode_cbf",
    "decode_scalar",
    "run_ber",
]

# Default observation angles: broadside, a uniform-beam null direction
# (asin(1/4) for an 8-element half-wavelength ULA), and wide offsets.
_NULL_DEG = math.degrees(math.asin(0.25))
DEFAULT_ANGLES_DEG = (-85.0, -60.0, -30.0, -_NULL_DEG, 0.0, _NULL_DEG, 30.0, 60.0, 85.0)

BATCH_BITS = 200_000
POWER_TOL = 1e-6
_CI95 = 1.96
_SQRT2 = math.sqrt(2.0)

_SCHEMES = ("cbf", "rbf", "single")
_CHANNELS = ("awgn", "rayleigh")


@dataclass(frozen=True)
class SchemeConfig:
    """What transmits: scheme kind, the array, and per-kind extras."""

    kind: str
    geometry: ArrayGeometry
    beams: ComplementaryBeamSet | None = None
    rbf_block_symbols: int = 2

    def __post_init__(self):
        if self.kind not in _SCHEMES:
            raise ValueError(f"unknown scheme {self.kind!r}")
        if self.kind == "cbf":
            if self.geometry.num_subarrays != 2:
                raise ValueError("cbf needs a two-sub-array geometry")
            if self.beams is None or len(self.beams.weights) != 2:
                raise ValueError("cbf needs a complementary beam pair")
            b = self.beams.geometry
            g = self.geometry
            if (b.total_elements, b.num_subarrays, b.spacing) != (
                g.total_elements, g.num_subarrays, g.spacing
            ):
                raise ValueError("beam set geometry does not match the scheme geometry")
        if self.kind == "rbf":
            if self.rbf_block_symbols < 2 or self.rbf_block_symbols % 2:
                raise ValueError("rbf block length must be even and >= 2")


@dataclass(frozen=True)
class SimConfig:
    """One BER campaign: scheme, channel kind, angle and SNR lattices,
    stopping rule, and rng seed."""

    scheme: SchemeConfig
    channel: str
    angles: tuple[float, ...]
    snr_db: tuple[float, ...]
    min_bits: int = 1_000_000
    target_errors: int = 200
    max_bits: int | None = None
    seed: int = 0
    workers: int = 1
    equal_subarrays: bool = True

    def __post_init__(self):
        if self.channel not in _CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        angles = tuple(float(a) for a in self.angles)
        snrs = tuple(float(s) for s in self.snr_db)
        if not angles or not snrs:
            raise ValueError("angle and SNR grids must be non-empty")
        if any(abs(a) > math.pi / 2 for a in angles):
            raise ValueError("angles must lie in the ULA visible region")
        if self.min_bits < 10_000:
            raise ValueError("min_bits must be at least 10000")
        if self.max_bits is not None and self.max_bits < self.min_bits:
            raise ValueError("max_bits must be >= min_bits")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.target_errors < 0:
            raise ValueError("target_errors must be >= 0")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "snr_db", snrs)

    @property
    def resolved_max_bits(self) -> int:
        return self.max_bits if self.max_bits is not None else 10 * self.min_bits


@dataclass(frozen=True)
class BerPoint:
    angle: float
    eb_n0_db: float
    bits: int
    errors: int
    ber: float
    ci95: float


@dataclass(frozen=True)
class BerCurve:
    scheme: str
    channel: str
    points: tuple[BerPoint, ...]


@dataclass
class LinkChannel:
    """Channel context for one batch: fading kind, noise level, rng stream."""

    kind: str
    noise_variance: float
    rng: np.random.Generator
    equal_subarrays: bool = True

    def pair_gains(self, num_blocks: int):
        if self.kind == "awgn":
            ones = np.ones(num_blocks, dtype=complex)
            return ones, ones
        return chan.rayleigh_pair_gains(num_blocks, self.equal_subarrays, self.rng)

    def scalar_gains(self, num_blocks: int) -> np.ndarray:
        if self.kind == "awgn":
            return np.ones(num_blocks, dtype=complex)
        h, _ = chan.rayleigh_pair_gains(num_blocks, True, self.rng)
        return h

    def noise(self, num_samples: int) -> np.ndarray:
        return chan.complex_noise(num_samples, self.noise_variance, self.rng)


@dataclass(frozen=True, eq=False)
class CbfSignal:
    """Received codeword samples plus the receiver-known stream gains."""

    y1: np.ndarray
    y2: np.ndarray
    gain1: np.ndarray
    gain2: np.ndarray
    energy_per_period: float


@dataclass(frozen=True, eq=False)
class ScalarSignal:
    """Received single-stream samples plus per-symbol effective gains."""

    y: np.ndarray
    gains: np.ndarray
    block_gains: np.ndarray | None
    energy_per_period: float


def _frame_power(symbols: np.ndarray) -> float:
    return float(np.mean(gain_power(symbols))) if symbols.size else 0.0


def _beam_gain(beams: ComplementaryBeamSet, member: int, angle: float) -> complex:
    entries = beams.weights[member].entries
    return complex(subarray_gains(entries, beams.geometry, member, angle)[0])


def _weight_power_factor(entries: np.ndarray) -> float:
    # ||w||^2 / N: exactly 1 for unit-modulus weights, measured rather than
    # assumed so the energy meter catches any normalization slip.
    return float(gain_power(entries).sum() / entries.size)


def transmit_cbf(frame: chan.SymbolFrame, beams: ComplementaryBeamSet,
                 angle: float, link: LinkChannel) -> CbfSignal:
    """Alamouti-encode symbol pairs and push the two streams through their
    complementary beams with an equal (1/sqrt(2) amplitude) power split."""
    s = frame.symbols
    if s.size % 2:
        raise ValueError("cbf transmits whole symbol pairs")
    s1, s2 = s[0::2], s[1::2]
    n = s1.size
    g1 = _beam_gain(beams, 0, angle)
    g2 = _beam_gain(beams, 1, angle)
    h1, h2 = link.pair_gains(n)
    a = (g1 / _SQRT2) * h1
    b = (g2 / _SQRT2) * h2
    y1 = a * s1 + b * s2 + link.noise(n)
    y2 = -a * np.conj(s2) + b * np.conj(s1) + link.noise(n)
    w1, w2 = beams.weights
    split = (_weight_power_factor(w1.entries) + _weight_power_factor(w2.entries)) / 2
    energy = _frame_power(s) * split
    return CbfSignal(y1=y1, y2=y2, gain1=a, gain2=b, energy_per_period=energy)


def decode_cbf(signal: CbfSignal, noise_variance: float) -> np.ndarray:
    """MMSE soft estimates for a batch of codewords, re-interleaved into the
    original symbol order."""
    s1, s2 = mmse_decode_streams(signal.y1, signal.y2, signal.gain1,
                                 signal.gain2, noise_variance)
    out = np.empty(2 * s1.size, dtype=complex)
    out[0::2] = s1
    out[1::2] = s2
    return out


def transmit_rbf(frame: chan.SymbolFrame, geometry: ArrayGeometry, angle: float,
                 link: LinkChannel, rng: np.random.Generator,
                 block_symbols: int = 2) -> ScalarSignal:
    """Single full-array stream, re-weighted with fresh random unit-modulus
    phases every block so the long-run average gain is flat over angle."""
    s = frame.symbols
    if block_symbols < 1 or s.size % block_symbols:
        raise ValueError("frame must hold a whole number of blocks")
    blocks = s.size // block_symbols
    n_el = geometry.total_elements
    weights = np.exp(1j * rng.uniform(0.0, 2 * np.pi, (blocks, n_el)))
    steer = np.exp(-2j * np.pi * geometry.spacing * np.arange(n_el) * np.sin(angle))
    g = (weights @ steer) / math.sqrt(n_el)
    h = link.scalar_gains(blocks)
    eff = np.repeat(g * h, block_symbols)
    y = eff * s + link.noise(s.size)
    factors = gain_power(weights).sum(axis=1) / n_el
    per_symbol = gain_power(s) * np.repeat(factors, block_symbols)
    energy = float(np.mean(per_symbol)) if s.size else 0.0
    return ScalarSignal(y=y, gains=eff, block_gains=g, energy_per_period=energy)


def transmit_single(frame: chan.SymbolFrame, link: LinkChannel,
                    block_symbols: int = 2) -> ScalarSignal:
    """One isotropic element at the full power budget."""
    s = frame.symbols
    if block_symbols < 1 or s.size % block_symbols:
        raise ValueError("frame must hold a whole number of blocks")
    blocks = s.size // block_symbols
    h = link.scalar_gains(blocks)
    eff = np.repeat(h, block_symbols)
    y = eff * s + link.noise(s.size)
    energy = _frame_power(s)
    return ScalarSignal(y=y, gains=eff, block_gains=None, energy_per_period=energy)


def decode_scalar(signal: ScalarSignal) -> np.ndarray:
    """Coherent de-rotation by the known effective gain; the positive scale
    left over is irrelevant to QPSK decisions."""
    return signal.y * np.conj(signal.gains)


def _check_power(energy: float, frame: chan.SymbolFrame):
    budget = _frame_power(frame.symbols)
    if abs(energy - budget) > POWER_TOL:
        raise RuntimeError(
            f"transmit power budget violated: radiated {energy!r} per period "
            f"vs budget {budget!r}"
        )


def _run_batch(config: SimConfig, angle: float, noise_variance: float,
               rng: np.random.Generator):
    scheme = config.scheme
    if scheme.kind == "cbf":
        n_bits = (BATCH_BITS // 4) * 4
    else:
        block_bits = scheme.rbf_block_symbols * chan.BITS_PER_SYMBOL \
            if scheme.kind == "rbf" else 2 * chan.BITS_PER_SYMBOL
        n_bits = (BATCH_BITS // block_bits) * block_bits
    bits = rng.integers(0, 2, n_bits)
    frame = chan.qpsk_modulate(bits)
    link = LinkChannel(config.channel, noise_variance, rng, config.equal_subarrays)

    if scheme.kind == "cbf":
        sig = transmit_cbf(frame, scheme.beams, angle, link)
        _check_power(sig.energy_per_period, frame)
        estimates = decode_cbf(sig, noise_variance)
    elif scheme.kind == "rbf":
        sig = transmit_rbf(frame, scheme.geometry, angle, link, rng,
                           scheme.rbf_block_symbols)
        _check_power(sig.energy_per_period, frame)
        estimates = decode_scalar(sig)
    else:
        sig = transmit_single(frame, link)
        _check_power(sig.energy_per_period, frame)
        estimates = decode_scalar(sig)

    decided = chan.qpsk_demodulate(estimates)
    return n_bits, int(np.count_nonzero(decided != frame.bits))


def run_ber(config: SimConfig) -> BerCurve:
    """Run the campaign over the (angle, SNR) lattice.

    Each point simulates at least min_bits and keeps going (up to max_bits)
    until target_errors bit errors are seen, then reports the error count,
    the BER estimate, and its 95% normal-approximation half-width.
    """
    points = []
    for ai, angle in enumerate(config.angles):
        for si, snr_db in enumerate(config.snr_db):
            noise_variance = chan.SnrPoint(snr_db).noise_variance
            bits = 0
            errors = 0
            batch = 0
            while True:
                rng = np.random.default_rng([config.seed, ai, si, batch])
                n_bits, n_err = _run_batch(config, angle, noise_variance, rng)
                bits += n_bits
                errors += n_err
                batch += 1
                if bits >= config.min_bits and (
                    errors >= config.target_errors
                    or bits >= config.resolved_max_bits
                ):
                    break
            ber = errors / bits
            ci95 = _CI95 * math.sqrt(ber * (1.0 - ber) / bits)
            points.append(BerPoint(angle=angle, eb_n0_db=snr_db, bits=bits,
                                   errors=errors, ber=ber, ci95=ci95))
    return BerCurve(scheme=config.scheme.kind, channel=config.channel,
                    points=tuple(points))
