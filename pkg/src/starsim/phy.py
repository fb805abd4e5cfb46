"""Beamforming, SINR, rates and the per-step reward.

The receive chain is evaluated exactly as the transmit model defines it: the
maximum-ratio beamformer of user k is (g_k Teff_k G + h_k)^H normalized by the
squared norm of the cascaded part only, the desired-signal term combines the
cascaded and direct links, and same-space interference routes user k's beam
through every other same-space user's own surface coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet
from .numerics import euclid_norm_sq


@dataclass(frozen=True)
class LinkBudget:
    power_w: float = 1.0
    noise_density_dbm_hz: float = -174.0
    bandwidth_hz: float = 100e6

    def __post_init__(self):
        if self.power_w <= 0:
            raise ValueError("transmit power must be positive")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth must be positive")

    @property
    def sigma_sq(self) -> float:
        return noise_power(self.noise_density_dbm_hz, self.bandwidth_hz)


@dataclass
class RateReport:
    """Per-user SINRs (linear), rates (bps/Hz) and beamformers for one step."""

    sinr_r: np.ndarray
    sinr_t: np.ndarray
    rate_r: np.ndarray
    rate_t: np.ndarray
    w_r: list = field(default_factory=list)
    w_t: list = field(default_factory=list)

    @property
    def all_rates(self) -> np.ndarray:
        return np.concatenate([self.rate_r, self.rate_t])


def noise_power(density_dbm_hz: float, bandwidth_hz: float) -> float:
    """Thermal noise power in watts from a dBm/Hz density and a bandwidth."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    dbm = density_dbm_hz + 10.0 * np.log10(bandwidth_hz)
    return float(10.0 ** ((dbm - 30.0) / 10.0))


def cascade(g: np.ndarray, theta_eff: np.ndarray, big_g: np.ndarray) -> np.ndarray:
    """Surface-cascaded channel g Teff G, shape (1, M)."""
    return g @ theta_eff @ big_g


def mrt_beamformer(
    g: np.ndarray, theta_eff: np.ndarray, big_g: np.ndarray, h: np.ndarray
) -> np.ndarray:
    """Maximum-ratio beamformer (g Teff G + h)^H / ||g Teff G||^2, shape (M, 1).

    The normalization uses the cascaded part only, so at least one element
    must be assigned to the user or the beamformer is degenerate.
    """
    u = cascade(g, theta_eff, big_g)
    denom = euclid_norm_sq(u)
    if denom == 0.0:
        raise ValueError("degenerate beamformer: cascaded channel has zero norm")
    return (u + h).conj().T / denom


def _sinr(
    idx: int,
    gs: list,
    hs: list,
    theta_effs: list,
    ws: list,
    big_g: np.ndarray,
    budget: LinkBudget,
) -> float:
    p = budget.power_w
    w = ws[idx]
    signal = cascade(gs[idx], theta_effs[idx], big_g) @ w + hs[idx] @ w
    num = p * euclid_norm_sq(signal)
    interference = 0.0
    for j in range(len(gs)):
        if j == idx:
            continue
        leak = cascade(gs[j], theta_effs[j], big_g) @ w
        interference += p * euclid_norm_sq(leak)
    return float(num / (interference + budget.sigma_sq))


def sinr_reflection(
    k: int, channels: ChannelSet, theta_effs: list, ws: list, budget: LinkBudget
) -> float:
    """Linear SINR of reflection-space user k.

    `theta_effs` and `ws` hold the effective coefficient matrices and
    beamformers of all K reflection users, in user order.
    """
    return _sinr(k, channels.g_r, channels.h_r, theta_effs, ws, channels.big_g, budget)


def sinr_transmission(
    l: int, channels: ChannelSet, theta_effs: list, ws: list, budget: LinkBudget
) -> float:
    """Linear SINR of transmission-space user l."""
    return _sinr(l, channels.g_t, channels.h_t, theta_effs, ws, channels.big_g, budget)


def rate(gamma: float) -> float:
    """Shannon rate log2(1 + SINR) in bps/Hz."""
    if gamma < 0:
        raise ValueError("SINR must be nonnegative")
    return float(np.log2(1.0 + gamma))


def reward_avg_rate(rates_r: np.ndarray, rates_t: np.ndarray) -> float:
    """Mean data rate over all users of both spaces."""
    rates_r = np.asarray(rates_r, float)
    rates_t = np.asarray(rates_t, float)
    total_users = rates_r.size + rates_t.size
    if total_users == 0:
        raise ValueError("need at least one user")
    return float((rates_r.sum() + rates_t.sum()) / total_users)


def reward_penalized(
    rates_r: np.ndarray, rates_t: np.ndarray, mu: float, active_count: int
) -> float:
    """Average rate plus the element-deactivation bonus mu / active_count."""
    base = reward_avg_rate(rates_r, rates_t)
    if mu == 0:
        return base
    if active_count <= 0:
        raise ValueError("penalized reward requires at least one active element")
    return base + mu / active_count


def evaluate_rates(
    channels: ChannelSet,
    theta_effs_r: list,
    theta_effs_t: list,
    budget: LinkBudget,
) -> RateReport:
    """Full per-step pipeline: MRT beamformers, then SINRs and rates."""
    ws_r = [
        mrt_beamformer(channels.g_r[k], theta_effs_r[k], channels.big_g, channels.h_r[k])
        for k in range(len(channels.g_r))
    ]
    ws_t = [
        mrt_beamformer(channels.g_t[l], theta_effs_t[l], channels.big_g, channels.h_t[l])
        for l in range(len(channels.g_t))
    ]
    sinr_r = np.array([
        sinr_reflection(k, channels, theta_effs_r, ws_r, budget)
        for k in range(len(channels.g_r))
    ])
    sinr_t = np.array([
        sinr_transmission(l, channels, theta_effs_t, ws_t, budget)
        for l in range(len(channels.g_t))
    ])
    return RateReport(
        sinr_r=sinr_r,
        sinr_t=sinr_t,
        rate_r=np.array([rate(g) for g in sinr_r]),
        rate_t=np.array([rate(g) for g in sinr_t]),
        w_r=ws_r,
        w_t=ws_t,
    )
