"""Unit tests for QPSK mapping, noise injection, and block fading."""

import math

import numpy as np
import pytest

from cbfsim.channel import (
    SnrPoint,
    awgn,
    awgn_qpsk_ber,
    complex_noise,
    q_function,
    qpsk_demodulate,
    qpsk_modulate,
    qpsk_symbols,
    rayleigh_block,
    rayleigh_pair_gains,
    rayleigh_qpsk_ber,
)

ROOT_HALF = 1 / math.sqrt(2)


class TestQpskMapping:
    def test_anchor_dibits(self):
        assert qpsk_symbols([0, 0])[0] == pytest.approx((1 + 1j) * ROOT_HALF)
        assert qpsk_symbols([1, 1])[0] == pytest.approx((-1 - 1j) * ROOT_HALF)

    def test_full_table(self):
        # frozen mapping: first bit -> real sign, second bit -> imag sign
        table = {
            (0, 0): (1 + 1j), (0, 1): (1 - 1j),
            (1, 0): (-1 + 1j), (1, 1): (-1 - 1j),
        }
        for (b0, b1), point in table.items():
            assert qpsk_symbols([b0, b1])[0] == pytest.approx(point * ROOT_HALF)

    def test_unit_average_energy(self):
        bits = np.array([0, 0, 0, 1, 1, 0, 1, 1])
        s = qpsk_symbols(bits)
        assert np.allclose(np.abs(s) ** 2, 1.0, atol=1e-12)

    def test_odd_bit_count_rejected(self):
        with pytest.raises(ValueError):
            qpsk_symbols([0, 1, 0])

    def test_non_binary_rejected(self):
        with pytest.raises(ValueError):
            qpsk_symbols([0, 2])

    def test_round_trip_identity(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, 1000)
        frame = qpsk_modulate(bits)
        assert np.array_equal(qpsk_demodulate(frame.symbols), bits)

    def test_demodulate_scale_invariant(self):
        rng = np.random.default_rng(1)
        bits = rng.integers(0, 2, 200)
        s = qpsk_symbols(bits)
        for c in (0.01, 1.0, 250.0):
            assert np.array_equal(qpsk_demodulate(c * s), bits)

    def test_quadrant_decision(self):
        assert np.array_equal(qpsk_demodulate(0.9 + 1.1j), [0, 0])
        assert np.array_equal(qpsk_demodulate(-0.2 + 5j), [1, 0])


class TestAwgn:
    def test_zero_variance_is_identity(self):
        rng = np.random.default_rng(0)
        s = qpsk_symbols(rng.integers(0, 2, 100))
        assert np.array_equal(awgn(s, 0.0, rng), s)

    def test_sample_variance_calibrated(self):
        rng = np.random.default_rng(5)
        noise = complex_noise(1_000_000, 1.0, rng)
        assert np.mean(np.abs(noise) ** 2) == pytest.approx(1.0, abs=0.01)
        # circular: equal power per real dimension
        assert np.mean(noise.real ** 2) == pytest.approx(0.5, abs=0.01)

    def test_deterministic_under_seed(self):
        s = np.zeros(64, dtype=complex)
        a = awgn(s, 0.7, np.random.default_rng(9))
        b = awgn(s, 0.7, np.random.default_rng(9))
        assert np.array_equal(a, b)

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            complex_noise(4, -0.1, np.random.default_rng(0))


class TestRayleighBlock:
    def test_equal_subarrays_ties_links(self):
        blocks = rayleigh_block(100, True, np.random.default_rng(3))
        assert all(b.h1 == b.h2 for b in blocks)

    def test_independent_links_differ(self):
        blocks = rayleigh_block(100, False, np.random.default_rng(3))
        assert any(b.h1 != b.h2 for b in blocks)

    def test_unit_mean_power(self):
        h1, h2 = rayleigh_pair_gains(100_000, False, np.random.default_rng(8))
        assert np.mean(np.abs(h1) ** 2) == pytest.approx(1.0, abs=0.02)
        assert np.mean(np.abs(h2) ** 2) == pytest.approx(1.0, abs=0.02)

    def test_reproducible_sequence(self):
        a = rayleigh_block(50, False, np.random.default_rng(17))
        b = rayleigh_block(50, False, np.random.default_rng(17))
        assert a == b

    def test_envelope_is_rayleigh(self):
        # one-sample Kolmogorov-Smirnov test against F(x) = 1 - exp(-x^2)
        n = 100_000
        h1, _ = rayleigh_pair_gains(n, True, np.random.default_rng(99))
        x = np.sort(np.abs(h1))
        cdf = 1.0 - np.exp(-(x ** 2))
        empirical_hi = np.arange(1, n + 1) / n
        empirical_lo = np.arange(0, n) / n
        ks = max(np.max(np.abs(empirical_hi - cdf)),
                 np.max(np.abs(cdf - empirical_lo)))
        critical_1pct = 1.628 / math.sqrt(n)
        assert ks < critical_1pct

    def test_needs_blocks(self):
        with pytest.raises(ValueError):
            rayleigh_block(0, True, np.random.default_rng(0))


class TestSnrPoint:
    def test_es_n0_conversion(self):
        p = SnrPoint(6.0)
        assert p.es_n0_db == pytest.approx(6.0 + 10 * math.log10(2))

    def test_noise_variance_positive_and_decreasing(self):
        variances = [SnrPoint(db).noise_variance for db in (-10, 0, 10, 30)]
        assert all(v > 0 for v in variances)
        assert variances == sorted(variances, reverse=True)

    def test_noise_calibration_within_005_db(self):
        # measured SNR of a calibrated frame matches the request
        rng = np.random.default_rng(12)
        point = SnrPoint(7.0)
        s = qpsk_symbols(rng.integers(0, 2, 2_000_000))
        noisy = awgn(s, point.noise_variance, rng)
        measured = np.mean(np.abs(s) ** 2) / np.mean(np.abs(noisy - s) ** 2)
        measured_db = 10 * math.log10(measured)
        assert abs(measured_db - point.es_n0_db) < 0.05


class TestReferenceCurves:
    def test_q_function_anchor(self):
        assert q_function(0.0) == pytest.approx(0.5)
        assert q_function(3.0903) == pytest.approx(1e-3, rel=2e-3)

    def test_awgn_curve_at_ten_to_minus_three(self):
        # Eb/N0 = 6.79 dB gives BER very close to 1e-3
        assert awgn_qpsk_ber(6.79) == pytest.approx(1e-3, rel=5e-3)

    def test_rayleigh_curve_at_ten_db(self):
        assert rayleigh_qpsk_ber(10.0) == pytest.approx(0.02327, abs=5e-6)
