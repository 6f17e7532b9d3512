"""QPSK mapping, AWGN, block Rayleigh fading, and Eb/N0 bookkeeping.

Symbols have unit average energy by construction; noise levels are sized for
that budget.  Closed-form reference BER curves live here too so simulations
can be checked against them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BITS_PER_SYMBOL",
    "SymbolFrame",
    "ChannelRealization",
    "SnrPoint",
    "qpsk_symbols",
    "qpsk_modulate",
    "qpsk_demodulate",
    "complex_noise",
    "awgn",
    "rayleigh_pair_gains",
    "rayleigh_block",
    "q_function",
    "awgn_qpsk_ber",
    "rayleigh_qpsk_ber",
]

BITS_PER_SYMBOL = 2

_SCALE = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class SymbolFrame:
    """Gray-mapped QPSK symbols together with their source bits."""

    symbols: np.ndarray
    bits: np.ndarray


@dataclass(frozen=True)
class ChannelRealization:
    """One fading block: the two sub-array coefficients and its span in
    symbol periods (h1 == h2 when the links are tied)."""

    h1: complex
    h2: complex
    block_length: int = 2


@dataclass(frozen=True)
class SnrPoint:
    """Per-bit SNR operating point for unit-energy QPSK at full power.

    Es/N0 = Eb/N0 + 10*log10(2); the complex noise variance equals N0 for a
    unit-energy constellation.
    """

    eb_n0_db: float

    @property
    def eb_n0(self) -> float:
        return 10.0 ** (self.eb_n0_db / 10.0)

    @property
    def es_n0_db(self) -> float:
        return self.eb_n0_db + 10.0 * math.log10(BITS_PER_SYMBOL)

    @property
    def noise_variance(self) -> float:
        return 1.0 / (BITS_PER_SYMBOL * self.eb_n0)


def qpsk_symbols(bits) -> np.ndarray:
    """Map bit pairs to (+/-1 +/- j)/sqrt(2); first bit sets the real sign,
    second the imaginary sign, so 00 -> (+1+j)/sqrt(2) and 11 -> (-1-j)/sqrt(2)."""
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size % 2:
        raise ValueError("QPSK needs a flat, even-length bit sequence")
    if bits.size and not np.all((bits == 0) | (bits == 1)):
        raise ValueError("bits must be 0 or 1")
    pairs = bits.reshape(-1, 2)
    re = 1.0 - 2.0 * pairs[:, 0]
    im = 1.0 - 2.0 * pairs[:, 1]
    return (re + 1j * im) * _SCALE


def qpsk_modulate(bits) -> SymbolFrame:
    bits = np.array(bits, dtype=np.int64)
    frame = SymbolFrame(symbols=qpsk_symbols(bits), bits=bits)
    frame.bits.setflags(write=False)
    frame.symbols.setflags(write=False)
    return frame


def qpsk_demodulate(soft) -> np.ndarray:
    """Minimum-distance (quadrant sign) bit decisions; inverts the mapper on
    clean symbols and is invariant to positive scaling."""
    s = np.atleast_1d(np.asarray(soft))
    bits = np.empty(2 * s.size, dtype=np.int64)
    bits[0::2] = s.real < 0
    bits[1::2] = s.imag < 0
    return bits


def complex_noise(shape, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian samples with the given total variance
    (variance/2 per real dimension)."""
    if variance < 0:
        raise ValueError("noise variance must be >= 0")
    if variance == 0:
        return np.zeros(shape, dtype=complex)
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def awgn(samples, noise_variance: float, rng: np.random.Generator) -> np.ndarray:
    """Add white circular complex Gaussian noise to the samples."""
    samples = np.asarray(samples, dtype=complex)
    return samples + complex_noise(samples.shape, noise_variance, rng)


def rayleigh_pair_gains(num_blocks: int, equal_subarrays: bool,
                        rng: np.random.Generator):
    """Per-block complex gains of the two sub-array links, E[|h|^2] = 1."""
    if num_blocks < 1:
        raise ValueError("need at least one fading block")
    h1 = math.sqrt(0.5) * (rng.standard_normal(num_blocks)
                           + 1j * rng.standard_normal(num_blocks))
    if equal_subarrays:
        return h1, h1
    h2 = math.sqrt(0.5) * (rng.standard_normal(num_blocks)
                           + 1j * rng.standard_normal(num_blocks))
    return h1, h2


def rayleigh_block(num_blocks: int, equal_subarrays: bool,
                   rng: np.random.Generator, block_length: int = 2):
    """Draw block-fading realizations, one fresh pair per block."""
    h1, h2 = rayleigh_pair_gains(num_blocks, equal_subarrays, rng)
    return [ChannelRealization(complex(a), complex(b), block_length)
            for a, b in zip(h1, h2)]


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def awgn_qpsk_ber(eb_n0_db: float) -> float:
    """Uncoded Gray-QPSK bit error probability in AWGN: Q(sqrt(2*Eb/N0))."""
    return q_function(math.sqrt(2.0 * 10.0 ** (eb_n0_db / 10.0)))


def rayleigh_qpsk_ber(eb_n0_db: float) -> float:
    """Uncoded Gray-QPSK bit error probability in flat Rayleigh fading with
    coherent detection: (1 - sqrt(g/(1+g)))/2 at average per-bit SNR g."""
    g = 10.0 ** (eb_n0_db / 10.0)
    return 0.5 * (1.0 - math.sqrt(g / (1.0 + g)))
