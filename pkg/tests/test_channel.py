import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bdris import ChannelSet, ScenarioConfig, effective_channel, path_loss, sample_channels
from bdris.projections import symuni

from conftest import crandn


def test_path_loss_reference_distance():
    assert path_loss(1.0, 3.5, -30.0) == pytest.approx(1e-3, rel=1e-15)


def test_path_loss_zero_exponent():
    assert path_loss(150.0, 0.0, -30.0) == pytest.approx(1e-3, rel=1e-15)


def test_path_loss_hand_arithmetic():
    # 150^3.5 = 150^3 * sqrt(150)
    expected = 1e-3 / (150.0 ** 3 * math.sqrt(150.0))
    assert path_loss(150.0, 3.5, -30.0) == pytest.approx(expected, rel=1e-12)
    assert path_loss(150.0, 3.5, -30.0) == pytest.approx(2.42e-11, rel=2e-3)


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_path_loss_rejects_non_positive_distance(d):
    with pytest.raises(ValueError):
        path_loss(d, 2.0, -30.0)


@given(st.floats(0.1, 1e3), st.floats(0.1, 1e3), st.floats(0.01, 5.0))
def test_path_loss_monotone_decreasing(d1, d2, gamma):
    lo, hi = sorted((d1, d2))
    assert path_loss(lo, gamma, -30.0) >= path_loss(hi, gamma, -30.0)


def test_sample_channels_is_deterministic():
    cfg = ScenarioConfig(N=8, seed=123)
    a, b = sample_channels(cfg, 7), sample_channels(cfg, 7)
    for m in ("G_mat", "H_mat", "E_mat"):
        assert np.array_equal(getattr(a, m), getattr(b, m))


def test_sample_channels_shapes():
    ch = sample_channels(ScenarioConfig(L=4, K=4, N=8), 0)
    assert ch.G_mat.shape == (4, 4)
    assert ch.H_mat.shape == (8, 4)
    assert ch.E_mat.shape == (8, 4)


def test_sample_channels_distinct_trials_differ():
    cfg = ScenarioConfig(N=8)
    a, b = sample_channels(cfg, 0), sample_channels(cfg, 1)
    assert not np.allclose(a.G_mat, b.G_mat)
    assert not np.allclose(a.H_mat, b.H_mat)


def test_sample_channels_seed_and_trial_do_not_alias():
    a = sample_channels(ScenarioConfig(N=4, seed=1), 0)
    b = sample_channels(ScenarioConfig(N=4, seed=0), 1)
    assert not np.allclose(a.G_mat, b.G_mat)


def test_sample_channels_variance_matches_path_loss():
    cfg = ScenarioConfig(L=10, K=10, N=2, group_size=1, trials=100)
    draws = np.concatenate([sample_channels(cfg, t).G_mat.ravel() for t in range(100)])
    assert draws.size == 10_000
    target = path_loss(cfg.d_bu, cfg.gamma_bu, cfg.zeta0_db)
    assert np.mean(np.abs(draws) ** 2) == pytest.approx(target, rel=0.05)
    # real and imaginary parts carry half the variance each
    assert np.var(draws.real) == pytest.approx(target / 2, rel=0.07)
    assert np.var(draws.imag) == pytest.approx(target / 2, rel=0.07)


def test_noise_and_transmit_power():
    cfg = ScenarioConfig()
    assert cfg.noise_power == pytest.approx(1e-11, rel=1e-12)
    assert cfg.transmit_power == pytest.approx(1e-9, rel=1e-12)


@pytest.mark.parametrize("kwargs", [dict(L=0), dict(K=-1), dict(d_bu=0.0), dict(trials=0),
                                    dict(gamma_ru=-0.5), dict(N=7, group_size=2)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ScenarioConfig(**kwargs)


def test_effective_channel_zero_theta(rng):
    ch = ChannelSet(crandn(rng, 3, 2), crandn(rng, 4, 2), crandn(rng, 4, 3))
    assert np.array_equal(effective_channel(ch, np.zeros((4, 4))), ch.G_mat)


def test_effective_channel_scalar():
    ch = ChannelSet([[1.0]], [[2.0]], [[3.0]])
    F = effective_channel(ch, np.array([[np.exp(1j * np.pi)]]))
    assert F[0, 0] == pytest.approx(-5.0, abs=1e-12)


def test_effective_channel_matches_triple_loop(rng):
    L, K, N = 3, 2, 4
    ch = ChannelSet(crandn(rng, L, K), crandn(rng, N, K), crandn(rng, N, L))
    theta = crandn(rng, N, N)
    F = effective_channel(ch, theta)
    expected = np.zeros((L, K), complex)
    for k in range(K):
        for l in range(L):
            # conj of (f_k^H)_l = conj(g_k)_l + sum_{m,n} conj(h_k)_m theta_mn E_nl
            acc = np.conj(ch.G_mat[l, k])
            for m in range(N):
                for n in range(N):
                    acc += np.conj(ch.H_mat[m, k]) * theta[m, n] * ch.E_mat[n, l]
            expected[l, k] = np.conj(acc)
    np.testing.assert_allclose(F, expected, atol=1e-12)


def test_effective_channel_accepts_scattering_matrix(rng):
    ch = ChannelSet(crandn(rng, 2, 2), crandn(rng, 3, 2), crandn(rng, 3, 2))
    S = symuni(crandn(rng, 3, 3))
    np.testing.assert_allclose(effective_channel(ch, S), effective_channel(ch, S.theta))


def test_effective_channel_dimension_mismatch(rng):
    ch = ChannelSet(crandn(rng, 2, 2), crandn(rng, 3, 2), crandn(rng, 3, 2))
    with pytest.raises(ValueError):
        effective_channel(ch, np.eye(4))


def test_channel_set_dimension_checks(rng):
    with pytest.raises(ValueError):
        ChannelSet(crandn(rng, 2, 2), crandn(rng, 3, 3), crandn(rng, 3, 2))
    with pytest.raises(ValueError):
        ChannelSet(crandn(rng, 2, 2), crandn(rng, 3, 2), crandn(rng, 3, 3))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_effective_channel_is_affine_in_theta(seed):
    rng = np.random.default_rng(seed)
    ch = ChannelSet(crandn(rng, 3, 2), crandn(rng, 4, 2), crandn(rng, 4, 3))
    t1, t2 = crandn(rng, 4, 4), crandn(rng, 4, 4)
    F0 = effective_channel(ch, np.zeros((4, 4)))
    lhs = effective_channel(ch, t1 + t2) - F0
    rhs = (effective_channel(ch, t1) - F0) + (effective_channel(ch, t2) - F0)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
