"""Tests for the quasi-block-fading channel against explicit matrix forms."""
import numpy as np
import pytest

from ofdmblind.channel import (
    ChannelConfig,
    ChannelRealization,
    apply_block_channel,
    calibrate_noise,
    draw_realization,
)
from ofdmblind.errors import ConfigError
from ofdmblind.transmitter import IqSequence, OfdmConfig, generate_stream


def toeplitz_pair(taps, t):
    """Build the T x T in-block matrix H and inter-block matrix B.

    H[i, j] = h[i-j] for 0 <= i-j <= L-1; B[i, j] = h[T+i-j] for
    T+i-j <= L-1, so B only touches the first L-1 rows via the last
    L-1 columns. These are the direct dense forms the streaming
    convolution must reproduce sample for sample.
    """
    l = len(taps)
    h_mat = np.zeros((t, t), dtype=complex)
    b_mat = np.zeros((t, t), dtype=complex)
    for i in range(t):
        for j in range(t):
            if 0 <= i - j < l:
                h_mat[i, j] = taps[i - j]
            if t + i - j < l:
                b_mat[i, j] = taps[t + i - j]
    return h_mat, b_mat


class TestChannelConfig:
    def test_default_tap_variance_is_one_over_taps(self):
        cfg = ChannelConfig(num_taps=4, snr_db=10.0, block_len=100)
        assert cfg.effective_tap_variance == pytest.approx(0.25)

    def test_explicit_tap_variance_wins(self):
        cfg = ChannelConfig(num_taps=4, snr_db=10.0, block_len=100, tap_variance=0.5)
        assert cfg.effective_tap_variance == pytest.approx(0.5)

    @pytest.mark.parametrize("kwargs", [
        dict(num_taps=0, snr_db=0.0, block_len=10),
        dict(num_taps=11, snr_db=0.0, block_len=10),
        dict(num_taps=2, snr_db=0.0, block_len=10, tap_variance=0.0),
        dict(num_taps=2, snr_db=0.0, block_len=10, tap_variance=-1.0),
    ])
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            ChannelConfig(**kwargs)


class TestCalibrateNoise:
    @pytest.mark.parametrize("snr_db,expected", [
        (0.0, 1.0),
        (10.0, 0.1),
        (20.0, 0.01),
        (-10.0, 10.0),
    ])
    def test_decades(self, snr_db, expected):
        assert calibrate_noise(snr_db, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_infinite_snr_is_noise_free(self):
        assert calibrate_noise(float("inf"), 1.0) == 0.0

    def test_scales_with_signal_power(self):
        assert calibrate_noise(10.0, 2.0) == pytest.approx(0.2)

    def test_nonpositive_signal_power_rejected(self):
        with pytest.raises(ConfigError):
            calibrate_noise(10.0, 0.0)


class TestDrawRealization:
    def test_shape_and_noise_var(self):
        cfg = ChannelConfig(num_taps=3, snr_db=20.0, block_len=50)
        real = draw_realization(cfg, num_blocks=4, seed=0)
        assert real.taps.shape == (4, 3)
        assert real.num_blocks == 4
        assert real.noise_var == pytest.approx(0.01)

    def test_deterministic(self):
        cfg = ChannelConfig(num_taps=2, snr_db=0.0, block_len=50)
        a = draw_realization(cfg, 3, seed=42)
        b = draw_realization(cfg, 3, seed=42)
        assert np.array_equal(a.taps, b.taps)

    def test_blocks_differ(self):
        cfg = ChannelConfig(num_taps=2, snr_db=0.0, block_len=50)
        real = draw_realization(cfg, 2, seed=1)
        assert not np.array_equal(real.taps[0], real.taps[1])

    @pytest.mark.parametrize("seed", range(3))
    def test_unit_mean_channel_energy(self, seed):
        # E||h_k||^2 = L * (1/L) = 1 under the default tap variance
        cfg = ChannelConfig(num_taps=4, snr_db=0.0, block_len=50)
        real = draw_realization(cfg, 2000, seed=seed)
        energies = np.sum(np.abs(real.taps) ** 2, axis=1)
        assert np.mean(energies) == pytest.approx(1.0, abs=0.05)

    def test_zero_blocks_rejected(self):
        cfg = ChannelConfig(num_taps=2, snr_db=0.0, block_len=50)
        with pytest.raises(ConfigError):
            draw_realization(cfg, 0, seed=0)

    def test_negative_noise_var_rejected(self):
        with pytest.raises(ConfigError):
            ChannelRealization(taps=np.zeros((1, 2)), noise_var=-0.1)


class TestApplyBlockChannel:
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_dense_matrix_form(self, seed):
        # r_k = H_k s_k + B_k s_{k-1}, s_0 = 0, against the dense matrices
        k, t, l = 3, 8, 3
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(k * t) + 1j * rng.standard_normal(k * t)
        taps = rng.standard_normal((k, l)) + 1j * rng.standard_normal((k, l))
        real = ChannelRealization(taps=taps, noise_var=0.0)
        got = apply_block_channel(x, real).samples

        prev = np.zeros(t, dtype=complex)
        for blk in range(k):
            seg = x[blk * t:(blk + 1) * t]
            h_mat, b_mat = toeplitz_pair(taps[blk], t)
            want = h_mat @ seg + b_mat @ prev
            assert got[blk * t:(blk + 1) * t] == pytest.approx(want, abs=1e-12)
            prev = seg

    def test_first_block_has_no_predecessor(self):
        # block 1 must match a plain zero-state convolution
        rng = np.random.default_rng(7)
        x = rng.standard_normal(20) + 1j * rng.standard_normal(20)
        taps = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        real = ChannelRealization(taps=taps, noise_var=0.0)
        got = apply_block_channel(x, real).samples
        assert got[:10] == pytest.approx(np.convolve(x[:10], taps[0])[:10])

    def test_identity_channel(self):
        x = np.arange(12, dtype=complex)
        real = ChannelRealization(taps=np.ones((3, 1)), noise_var=0.0)
        assert np.array_equal(apply_block_channel(x, real).samples, x)

    def test_pure_delay_spills_across_blocks(self):
        # taps [0, 1] delay by one; block 2 starts with block 1's last sample
        x = np.arange(1, 9, dtype=complex)
        real = ChannelRealization(taps=np.array([[0, 1], [0, 1]]), noise_var=0.0)
        got = apply_block_channel(x, real).samples
        assert got == pytest.approx([0, 1, 2, 3, 4, 5, 6, 7])

    def test_noise_variance_calibration(self):
        cfg = OfdmConfig(n_subcarriers=32, cp_len=7, symbols_per_block=100, num_blocks=4)
        s = generate_stream(cfg, 0)
        taps = np.ones((4, 1))
        clean = apply_block_channel(s, ChannelRealization(taps=taps, noise_var=0.0))
        noisy = apply_block_channel(s, ChannelRealization(taps=taps, noise_var=1.0),
                                    noise_seed=1)
        w = noisy.samples - clean.samples
        assert np.mean(np.abs(w) ** 2) == pytest.approx(1.0, abs=0.05)

    def test_noise_deterministic_per_seed(self):
        x = np.ones(10, dtype=complex)
        real = ChannelRealization(taps=np.ones((1, 1)), noise_var=0.5)
        a = apply_block_channel(x, real, noise_seed=3).samples
        b = apply_block_channel(x, real, noise_seed=3).samples
        c = apply_block_channel(x, real, noise_seed=4).samples
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_noise_seed_required_when_noisy(self):
        x = np.ones(10, dtype=complex)
        real = ChannelRealization(taps=np.ones((1, 1)), noise_var=0.5)
        with pytest.raises(ConfigError):
            apply_block_channel(x, real)

    def test_meta_preserved(self):
        cfg = OfdmConfig(n_subcarriers=2, cp_len=2, symbols_per_block=2, num_blocks=2)
        s = generate_stream(cfg, 0)
        real = ChannelRealization(taps=np.ones((2, 1)), noise_var=0.0)
        out = apply_block_channel(s, real)
        assert isinstance(out, IqSequence)
        assert out.meta is cfg

    def test_indivisible_stream_rejected(self):
        real = ChannelRealization(taps=np.ones((3, 1)), noise_var=0.0)
        with pytest.raises(ConfigError):
            apply_block_channel(np.ones(10, dtype=complex), real)

    def test_channel_longer_than_block_rejected(self):
        real = ChannelRealization(taps=np.ones((2, 6)), noise_var=0.0)
        with pytest.raises(ConfigError):
            apply_block_channel(np.ones(10, dtype=complex), real)
