import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bdris import (ScenarioConfig, effective_channel, fp_beamforming, passive_design,
                   rzf_beamforming, sample_channels, sinr, sum_rate)
from bdris.active import sinr_all
from bdris.projections import Architecture

from conftest import crandn


def test_sinr_zero_precoder(rng):
    F = crandn(rng, 3, 2)
    assert sinr(F, np.zeros((3, 2)), 0, 1.0) == 0.0
    assert sum_rate(F, np.zeros((3, 2)), 1.0) == 0.0


def test_sinr_single_user(rng):
    f, w = crandn(rng, 4, 1), crandn(rng, 4, 1)
    expected = abs(np.vdot(f, w)) ** 2 / 0.3
    assert sinr(f, w, 0, 0.3) == pytest.approx(expected, rel=1e-12)


def test_sinr_hand_example():
    F = np.eye(2)
    W = np.array([[2.0, 1.0], [0.0, 5.0]])  # f1^H w1 = 2, f1^H w2 = 1
    assert sinr(F, W, 0, 1.0) == pytest.approx(2.0)


def test_sum_rate_power_of_two():
    f = np.array([[1.0], [0.0]])
    w = np.array([[np.sqrt(3.0)], [0.0]])
    assert sum_rate(f, w, 1.0) == pytest.approx(2.0)


def test_sum_rate_orthogonal_users():
    sigma2 = 0.25
    W = np.sqrt(sigma2) * np.eye(2)
    assert np.allclose(sinr_all(np.eye(2), W, sigma2), 1.0)
    assert sum_rate(np.eye(2), W, sigma2) == pytest.approx(2.0)


def test_sinr_shape_mismatch(rng):
    with pytest.raises(ValueError):
        sinr_all(crandn(rng, 3, 2), crandn(rng, 2, 3), 1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-np.pi, np.pi), st.integers(0, 3))
def test_sum_rate_column_phase_invariance(seed, phi, k):
    rng = np.random.default_rng(seed)
    F, W = crandn(rng, 4, 4), crandn(rng, 4, 4)
    W2 = W.copy()
    W2[:, k] *= np.exp(1j * phi)
    assert sum_rate(F, W2, 0.5) == pytest.approx(sum_rate(F, W, 0.5), rel=1e-12)


# RZF

@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_rzf_full_power(seed, P):
    F = crandn(np.random.default_rng(seed), 4, 3)
    W = rzf_beamforming(F, P, 0.1)
    assert W.power == pytest.approx(P, rel=1e-10)


def test_rzf_single_user_is_matched_filter(rng):
    f = crandn(rng, 4, 1)
    W = rzf_beamforming(f, 2.0, 0.5).W
    np.testing.assert_allclose(W, np.sqrt(2.0) * f / np.linalg.norm(f), atol=1e-12)


def test_rzf_identity_channel():
    W = rzf_beamforming(np.eye(3), 3.0, 0.7).W
    np.testing.assert_allclose(W, np.eye(3), atol=1e-12)


def test_rzf_errors():
    with pytest.raises(ValueError):
        rzf_beamforming(np.zeros((2, 2)), 1.0, 1.0)
    with pytest.raises(ValueError):
        rzf_beamforming(np.eye(2), 0.0, 1.0)


# FP

def test_fp_single_user_matched_filter(rng):
    f = crandn(rng, 4, 1)
    P, s2 = 5.0, 0.2
    W, state = fp_beamforming(f, P, s2)
    np.testing.assert_allclose(np.abs(W.W), np.abs(np.sqrt(P) * f / np.linalg.norm(f)), atol=1e-10)
    expected = np.log2(1 + P * np.linalg.norm(f) ** 2 / s2)
    assert sum_rate(f, W.W, s2) == pytest.approx(expected, rel=1e-8)
    assert state.converged


def test_fp_single_user_from_poor_start(rng):
    f = crandn(rng, 4, 1)
    W, _ = fp_beamforming(f, 1.0, 1.0, tol=1e-12, W0=0.01 * crandn(rng, 4, 1))
    assert sum_rate(f, W.W, 1.0) == pytest.approx(np.log2(1 + np.linalg.norm(f) ** 2), rel=1e-8)


def pathloss_instance(seed):
    ch = sample_channels(ScenarioConfig(N=8), seed)
    theta = passive_design(ch, Architecture.fully_connected()).theta
    return effective_channel(ch, theta), ch.noise_power, ScenarioConfig().transmit_power


@pytest.mark.parametrize("unit", [True, False])
def test_fp_power_feasible_and_beats_rzf(unit):
    for seed in range(10):
        if unit:
            F, s2, P = crandn(np.random.default_rng(seed), 4, 4), 1.0, 10.0
        else:
            F, s2, P = pathloss_instance(seed)
        W, state = fp_beamforming(F, P, s2)
        assert W.is_feasible(1e-6)
        assert all(p <= P * (1 + 1e-6) for p in state.power_trace)
        assert sum_rate(F, W.W, s2) >= sum_rate(F, rzf_beamforming(F, P, s2).W, s2) - 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5), st.floats(-10, 30))
def test_fp_monotone(seed, L, K, snr_db):
    F = crandn(np.random.default_rng(seed), L, K)
    P = 10 ** (snr_db / 10)
    _, state = fp_beamforming(F, P, 1.0, tol=1e-9, max_iter=100)
    assert np.all(np.diff(state.objective_trace) >= -1e-9)


def test_fp_complementary_slackness():
    for seed in range(20):
        F = crandn(np.random.default_rng(seed), 4, 4)
        W, state = fp_beamforming(F, 10.0, 1.0)
        if state.dual_mu > 0:
            # the returned best iterate is the last one whenever the trace is monotone
            assert state.power_trace[-1] == pytest.approx(10.0, rel=1e-6)


def test_fp_rank_deficient_channel(rng):
    # K < L leaves B singular; mu must be positive
    F = crandn(rng, 6, 2)
    W, state = fp_beamforming(F, 2.0, 0.1)
    assert state.dual_mu > 0
    assert W.power == pytest.approx(2.0, rel=1e-6)


def test_fp_nonconvergence_flag(rng, caplog):
    F = crandn(rng, 4, 4)
    W, state = fp_beamforming(F, 100.0, 1.0, tol=0.0, max_iter=2)
    assert not state.converged and state.iterations == 2
    assert "did not converge" in caplog.text
    assert sum_rate(F, W.W, 1.0) == pytest.approx(max(state.objective_trace))


def test_fp_rejects_bad_power(rng):
    with pytest.raises(ValueError):
        fp_beamforming(crandn(rng, 2, 2), -1.0, 1.0)
