import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bwetools.errors import InvalidArgumentError
from bwetools.nld import (
    EmbeddingParams,
    delay_embed,
    dfa_exponent,
    dfa_fluctuation,
    dfa_profile,
    local_lyapunov,
    poincare_sd,
    recurrence_plot,
)
from conftest import logistic_orbit

SCALES = (100, 200, 300, 500, 600)


class TestDelayEmbed:
    def test_basic(self):
        out = delay_embed([1, 2, 3, 4], d=2, tau=1)
        np.testing.assert_array_equal(out, [[1, 2], [2, 3], [3, 4]])

    def test_d1_identity(self):
        x = np.arange(5.0)
        np.testing.assert_array_equal(delay_embed(x, 1, 1)[:, 0], x)

    def test_sparse_delay(self):
        out = delay_embed([1, 2, 3, 4, 5], d=3, tau=2)
        np.testing.assert_array_equal(out, [[1, 3, 5]])

    def test_too_short(self):
        with pytest.raises(InvalidArgumentError):
            delay_embed([1, 2], d=3, tau=1)

    @given(
        d=st.integers(1, 4),
        tau=st.integers(1, 4),
        extra=st.integers(0, 20),
    )
    @settings(max_examples=50, deadline=None)
    def test_count_formula(self, d, tau, extra):
        n = (d - 1) * tau + 1 + extra
        x = np.random.default_rng(n).standard_normal(n)
        assert delay_embed(x, d, tau).shape == (n - (d - 1) * tau, d)


class TestLocalLyapunov:
    def test_constant_segment_is_zero(self):
        est = local_lyapunov(np.ones(128), EmbeddingParams(d=2, tau=1, delta=1))
        assert est.value == 0.0

    def test_logistic_map_ln2(self):
        x = logistic_orbit(4096)
        p = EmbeddingParams(d=1, tau=1, delta=1, eps=1e-8, theiler=1)
        est = local_lyapunov(x, p)
        assert abs(est.value - np.log(2)) < 0.1 * np.log(2)

    def test_sine_is_near_zero(self):
        x = np.sin(2 * np.pi * np.arange(2048) / 64)
        est = local_lyapunov(x, EmbeddingParams(d=3, tau=1))
        assert abs(est.value) < 0.05

    def test_scale_invariance(self):
        x = logistic_orbit(1024)
        p = EmbeddingParams(d=2, tau=1, delta=4, eps=1e-12)
        base = local_lyapunov(x, p).value
        for c in (0.5, 2.0):
            assert abs(local_lyapunov(c * x, p).value - base) < 1e-3

    def test_degenerate_flag(self):
        # theiler window excludes every candidate neighbor
        est = local_lyapunov(np.sin(np.arange(12.0)), EmbeddingParams(d=1, tau=1, delta=1, theiler=50))
        assert est.degenerate and est.value == 0.0

    def test_too_short(self):
        with pytest.raises(InvalidArgumentError):
            local_lyapunov(np.ones(4), EmbeddingParams(d=3, tau=2, delta=2))


class TestDfa:
    def test_constant_input_zero(self):
        assert dfa_fluctuation(np.full(1000, 3.7), 100) == 0.0

    def test_blockwise_linear_profile_zero(self):
        # +-1 blocks aligned to the box size leave a linear profile per box
        n = 100
        x = np.tile(np.concatenate([np.ones(n), -np.ones(n)]), 5)
        assert dfa_fluctuation(x, n) == pytest.approx(0.0, abs=1e-9)

    def test_offset_invariance(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(4000)
        assert dfa_fluctuation(x + 5.0, 100) == pytest.approx(dfa_fluctuation(x, 100), rel=1e-9)

    def test_scaling_homogeneity(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal(4000)
        f = dfa_fluctuation(x, 200)
        assert dfa_fluctuation(-3.0 * x, 200) == pytest.approx(3.0 * f, rel=1e-9)

    def test_white_noise_alpha_half(self):
        alphas = [
            dfa_exponent(np.random.default_rng(seed).standard_normal(16384), SCALES)
            for seed in range(20)
        ]
        assert abs(np.mean(alphas) - 0.5) < 0.05

    def test_brownian_alpha_three_halves(self):
        alphas = [
            dfa_exponent(np.cumsum(np.random.default_rng(seed).standard_normal(16384)), SCALES)
            for seed in range(20)
        ]
        assert abs(np.mean(alphas) - 1.5) < 0.1

    def test_exponent_scale_invariant(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(8192)
        assert dfa_exponent(7.0 * x, SCALES) == pytest.approx(dfa_exponent(x, SCALES), abs=1e-9)

    def test_too_short(self):
        with pytest.raises(InvalidArgumentError):
            dfa_fluctuation(np.ones(150), 100)

    def test_exponent_needs_two_scales(self):
        with pytest.raises(InvalidArgumentError):
            dfa_exponent(np.full(1000, 1.0), (100, 200))  # both F(n) == 0

    def test_profile_ordering(self):
        x = np.random.default_rng(3).standard_normal(8192)
        prof = dfa_profile(x, (300, 100, 200))
        np.testing.assert_array_equal(prof.scales, [100, 200, 300])


class TestRecurrencePlot:
    def test_constant_sequence_identity(self):
        rp = recurrence_plot(np.full(8, 2.0))
        np.testing.assert_array_equal(rp.matrix, np.eye(8, dtype=np.uint8))

    def test_two_points(self):
        # single off-diagonal distance 1.0 becomes the threshold; the strict
        # comparison leaves only the forced diagonal
        rp = recurrence_plot(np.array([0.0, 1.0]))
        assert rp.threshold == 1.0
        np.testing.assert_array_equal(rp.matrix, np.eye(2, dtype=np.uint8))

    def test_period4_sine_band(self):
        x = np.sin(2 * np.pi * np.arange(64) / 4)
        rp = recurrence_plot(x, 64)
        assert np.all(np.diagonal(rp.matrix, 4) == 1)

    def test_symmetry_and_diagonal(self):
        for seed in range(10):
            x = np.random.default_rng(seed).standard_normal(50)
            rp = recurrence_plot(x)
            np.testing.assert_array_equal(rp.matrix, rp.matrix.T)
            assert np.all(np.diagonal(rp.matrix) == 1)

    def test_decimation(self):
        rp = recurrence_plot(np.random.default_rng(0).standard_normal(2000), max_size=256)
        assert rp.matrix.shape[0] <= 256

    def test_too_short(self):
        with pytest.raises(InvalidArgumentError):
            recurrence_plot(np.array([1.0]))


class TestPoincare:
    def test_constant(self):
        d = poincare_sd(np.full(16, 0.3))
        assert d.sd1 == 0.0 and d.sd2 == 0.0

    def test_alternating_closed_form(self):
        x = np.tile([1.0, -1.0], 50)
        d = poincare_sd(x)
        assert d.sd1 == pytest.approx(np.sqrt(2.0))
        assert d.sd2 == pytest.approx(0.0, abs=1e-9)

    def test_white_noise_symmetric(self):
        x = np.random.default_rng(3).standard_normal(65536)
        d = poincare_sd(x)
        assert abs(d.sd1 - d.sd2) / d.sd2 < 0.05

    def test_variance_identity(self):
        for seed in range(50):
            x = np.random.default_rng(seed).standard_normal(200)
            d = poincare_sd(x)
            if not d.clamped:
                assert d.sd1**2 + d.sd2**2 == pytest.approx(2 * np.var(x), rel=1e-9)

    def test_too_short(self):
        with pytest.raises(InvalidArgumentError):
            poincare_sd(np.array([1.0, 2.0]))
