import math
from types import SimpleNamespace

import numpy as np
import pytest

from starsim.channel import ChannelSet
from starsim.numerics import rng_stream, sample_standard_complex_gaussian
from starsim.phy import (
    LinkBudget,
    cascade,
    evaluate_rates,
    mrt_beamformer,
    noise_power,
    rate,
    reward_avg_rate,
    reward_penalized,
    sinr_reflection,
    sinr_transmission,
)
from starsim.starris import effective_matrix
from transcription import mrt_oracle, sinr_oracle


def test_noise_power_unit_bandwidth():
    assert noise_power(-174.0, 1.0) == pytest.approx(10 ** (-20.4), rel=1e-12)


def test_noise_power_paper_budget():
    watts = noise_power(-174.0, 100e6)
    assert 10 * math.log10(watts) + 30 == pytest.approx(-94.0, abs=1e-9)


def test_noise_power_doubling_bandwidth():
    a = noise_power(-174.0, 1e6)
    b = noise_power(-174.0, 2e6)
    assert 10 * math.log10(b / a) == pytest.approx(10 * math.log10(2), abs=1e-12)


def random_setup(rng, n, m, k, l):
    gs = [sample_standard_complex_gaussian(rng, 1, n) for _ in range(k + l)]
    hs = [sample_standard_complex_gaussian(rng, 1, m) for _ in range(k + l)]
    big_g = sample_standard_complex_gaussian(rng, n, m)
    channels = ChannelSet(big_g=big_g, g_r=gs[:k], g_t=gs[k:], h_r=hs[:k], h_t=hs[k:])
    thetas = [effective_matrix(np.exp(1j * rng.uniform(0, 2 * np.pi, n))) for _ in range(k + l)]
    return channels, thetas


def test_mrt_normalizes_cascade_without_direct_link():
    rng = rng_stream(1)
    for _ in range(20):
        g = sample_standard_complex_gaussian(rng, 1, 4)
        big_g = sample_standard_complex_gaussian(rng, 4, 3)
        theta = effective_matrix(np.exp(1j * rng.uniform(0, 2 * np.pi, 4)))
        w = mrt_beamformer(g, theta, big_g, np.zeros((1, 3)))
        assert (cascade(g, theta, big_g) @ w)[0, 0] == pytest.approx(1.0 + 0j, abs=1e-12)


def test_mrt_scalar_case():
    one = np.ones((1, 1))
    w = mrt_beamformer(one, np.eye(1), one, np.zeros((1, 1)))
    assert w[0, 0] == pytest.approx(1.0 + 0j)


def test_mrt_inverse_scaling():
    rng = rng_stream(2)
    g = sample_standard_complex_gaussian(rng, 1, 3)
    big_g = sample_standard_complex_gaussian(rng, 3, 2)
    theta = np.eye(3, dtype=complex)
    h = np.zeros((1, 2))
    assert np.allclose(
        mrt_beamformer(2 * g, theta, big_g, h), mrt_beamformer(g, theta, big_g, h) / 2
    )


def test_mrt_degenerate_rejected():
    with pytest.raises(ValueError):
        mrt_beamformer(np.zeros((1, 2)), np.eye(2), np.ones((2, 2)), np.ones((1, 2)))


def test_mrt_matches_transcription():
    rng = rng_stream(3)
    g = sample_standard_complex_gaussian(rng, 1, 4)
    big_g = sample_standard_complex_gaussian(rng, 4, 2)
    h = sample_standard_complex_gaussian(rng, 1, 2)
    theta = effective_matrix(np.exp(1j * rng.uniform(0, 2 * np.pi, 4)))
    assert np.allclose(mrt_beamformer(g, theta, big_g, h), mrt_oracle(g, theta, big_g, h))


def test_sinr_single_user_unit_case():
    one = np.ones((1, 1))
    channels = ChannelSet(
        big_g=one, g_r=[one.copy()], g_t=[], h_r=[np.zeros((1, 1))], h_t=[]
    )
    theta = [np.eye(1, dtype=complex)]
    w = [mrt_beamformer(channels.g_r[0], theta[0], channels.big_g, channels.h_r[0])]
    budget = SimpleNamespace(power_w=1.0, sigma_sq=1.0)
    assert sinr_reflection(0, channels, theta, w, budget) == pytest.approx(1.0)


def test_sinr_zero_power():
    one = np.ones((1, 1))
    channels = ChannelSet(
        big_g=one, g_r=[one.copy()], g_t=[], h_r=[np.zeros((1, 1))], h_t=[]
    )
    theta = [np.eye(1, dtype=complex)]
    w = [np.ones((1, 1))]
    budget = SimpleNamespace(power_w=0.0, sigma_sq=1.0)
    assert sinr_reflection(0, channels, theta, w, budget) == 0.0


def test_sinr_with_interference_matches_transcription():
    rng = rng_stream(4)
    budget = LinkBudget(power_w=1.0, noise_density_dbm_hz=-174.0, bandwidth_hz=100e6)
    channels, thetas = random_setup(rng, n=2, m=1, k=2, l=0)
    ws = [
        mrt_beamformer(channels.g_r[u], thetas[u], channels.big_g, channels.h_r[u])
        for u in range(2)
    ]
    for u in range(2):
        mine = sinr_reflection(u, channels, thetas, ws, budget)
        ref = sinr_oracle(
            u, channels.g_r, channels.h_r, thetas, ws, channels.big_g,
            budget.power_w, budget.sigma_sq,
        )
        assert mine == pytest.approx(ref, rel=1e-10)


def test_sinr_transmission_mirrors_reflection():
    rng = rng_stream(5)
    budget = LinkBudget()
    channels, thetas = random_setup(rng, n=3, m=2, k=0, l=2)
    ws = [
        mrt_beamformer(channels.g_t[u], thetas[u], channels.big_g, channels.h_t[u])
        for u in range(2)
    ]
    for u in range(2):
        mine = sinr_transmission(u, channels, thetas, ws, budget)
        ref = sinr_oracle(
            u, channels.g_t, channels.h_t, thetas, ws, channels.big_g,
            budget.power_w, budget.sigma_sq,
        )
        assert mine == pytest.approx(ref, rel=1e-10)


def test_sinr_sweep_against_transcription():
    rng = rng_stream(6)
    budget = LinkBudget()
    for _ in range(50):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 3))
        k = int(rng.integers(1, 3))
        l = int(rng.integers(1, 3))
        channels, thetas = random_setup(rng, n, m, k, l)
        theta_r, theta_t = thetas[:k], thetas[k:]
        ws_r = [
            mrt_beamformer(channels.g_r[u], theta_r[u], channels.big_g, channels.h_r[u])
            for u in range(k)
        ]
        ws_t = [
            mrt_beamformer(channels.g_t[u], theta_t[u], channels.big_g, channels.h_t[u])
            for u in range(l)
        ]
        for u in range(k):
            assert sinr_reflection(u, channels, theta_r, ws_r, budget) == pytest.approx(
                sinr_oracle(u, channels.g_r, channels.h_r, theta_r, ws_r,
                            channels.big_g, budget.power_w, budget.sigma_sq),
                rel=1e-10,
            )
        for u in range(l):
            assert sinr_transmission(u, channels, theta_t, ws_t, budget) == pytest.approx(
                sinr_oracle(u, channels.g_t, channels.h_t, theta_t, ws_t,
                            channels.big_g, budget.power_w, budget.sigma_sq),
                rel=1e-10,
            )


def test_sinr_numerator_is_power_when_direct_link_zero():
    rng = rng_stream(7)
    budget = SimpleNamespace(power_w=2.5, sigma_sq=1.0)
    channels, thetas = random_setup(rng, n=3, m=2, k=1, l=0)
    channels.h_r[0] = np.zeros((1, 2))
    w = [mrt_beamformer(channels.g_r[0], thetas[0], channels.big_g, channels.h_r[0])]
    gamma = sinr_reflection(0, channels, thetas, w, budget)
    assert gamma == pytest.approx(budget.power_w / budget.sigma_sq, rel=1e-12)


def test_sinr_invariant_under_common_phase_rotation():
    rng = rng_stream(8)
    budget = LinkBudget()
    channels, thetas = random_setup(rng, n=3, m=2, k=2, l=0)
    ws = [
        mrt_beamformer(channels.g_r[u], thetas[u], channels.big_g, channels.h_r[u])
        for u in range(2)
    ]
    base = sinr_reflection(0, channels, thetas, ws, budget)
    phi = np.exp(1j * 1.234)
    rotated = ChannelSet(
        big_g=channels.big_g,
        g_r=[channels.g_r[0], channels.g_r[1]],
        g_t=[],
        h_r=[phi * channels.h_r[0], channels.h_r[1]],
        h_t=[],
    )
    thetas_rot = [phi * thetas[0], thetas[1]]
    ws_rot = [
        mrt_beamformer(rotated.g_r[u], thetas_rot[u], rotated.big_g, rotated.h_r[u])
        for u in range(2)
    ]
    assert sinr_reflection(0, rotated, thetas_rot, ws_rot, budget) == pytest.approx(
        base, rel=1e-10
    )


def test_rate_values():
    assert rate(0.0) == 0.0
    assert rate(1.0) == pytest.approx(1.0)
    assert rate(3.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        rate(-0.1)


def test_rate_increasing_and_concave():
    gammas = np.linspace(0.0, 50.0, 200)
    rates = np.array([rate(g) for g in gammas])
    diffs = np.diff(rates)
    assert (diffs > 0).all()
    assert (np.diff(diffs) < 1e-12).all()


def test_reward_avg_rate():
    assert reward_avg_rate(np.full(3, 2.0), np.full(3, 2.0)) == pytest.approx(2.0)
    assert reward_avg_rate(np.array([1.0, 2, 3]), np.array([4.0, 5, 6])) == pytest.approx(3.5)
    assert reward_avg_rate(np.array([1.7]), np.array([])) == pytest.approx(1.7)
    # permutation invariant
    assert reward_avg_rate(np.array([3.0, 1, 2]), np.array([6.0, 4, 5])) == pytest.approx(3.5)


def test_reward_penalized():
    r = np.array([5.0, 5.0, 5.0])
    assert reward_penalized(r, r, 0.0, 144) == reward_avg_rate(r, r)
    assert reward_penalized(r, r, 115.0, 144) == pytest.approx(5.0 + 115.0 / 144.0)
    fewer = reward_penalized(r, r, 115.0, 100)
    assert fewer > reward_penalized(r, r, 115.0, 144)
    with pytest.raises(ValueError):
        reward_penalized(r, r, 115.0, 0)


def test_evaluate_rates_shapes():
    rng = rng_stream(9)
    channels, thetas = random_setup(rng, n=4, m=2, k=2, l=2)
    report = evaluate_rates(channels, thetas[:2], thetas[2:], LinkBudget())
    assert report.sinr_r.shape == (2,)
    assert report.sinr_t.shape == (2,)
    assert np.allclose(report.all_rates, np.log2(1 + np.concatenate([report.sinr_r, report.sinr_t])))
    assert (report.sinr_r >= 0).all() and (report.sinr_t >= 0).all()
