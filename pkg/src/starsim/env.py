"""The decision process: state encoding, action decoding and the step loop.

Actions are raw vectors in [-1, 1]^(2N): the first N entries code element
phases, the last N code the element-to-user assignment. Assignment codes are
bucketed into K+L+1 equal bins (lowest bin shuts the element down, then
reflection users in row order, then transmission users); a repair pass then
guarantees every user keeps at least one element, which both the beamformer
and the problem constraints require.

States are [per-user SINR terms, phase codes, assignment codes], length
(K+L) + 2N. SINRs enter as log2(1+SINR)/10 to keep entries near [-1, 1];
transmission-space users come first in that block, matching the user
numbering used in reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channel as ch
from .channel import ChannelSet, PathLossParams, RicianParams
from .geometry import SquareBounds, WaypointState, make_waypoint_state, position, rwp_step
from .numerics import derive_stream
from .phy import LinkBudget, RateReport, evaluate_rates, reward_avg_rate, reward_penalized
from .starris import (
    active_element_count,
    effective_coefficients,
    effective_matrix,
    equal_partition_assignment,
    modes_from_assignment,
    wrap_phase,
)

DEFAULT_USERS_REFLECTION = [(40.0, 15.0, 1.5), (45.0, 18.0, 1.5), (25.0, 5.0, 1.5)]
DEFAULT_USERS_TRANSMISSION = [(55.0, 25.0, 1.5), (50.0, 22.0, 1.5), (70.0, 35.0, 1.5)]

SINR_STATE_SCALE = 0.1  # state carries log2(1+SINR) times this


@dataclass
class EnvConfig:
    n_h: int = 12
    n_v: int = 12
    m: int = 4  # BS antennas
    k: int = 3  # reflection-space users
    l: int = 3  # transmission-space users
    mu: float = 0.0  # element-deactivation reward weight
    mobility: str = "static"  # "static" | "rwp"
    assignment_mode: str = "learned"  # "learned" | "equal"
    bs_pos: tuple = (0.0, 0.0, 0.0)
    ris_pos: tuple = (48.0, 20.0, 3.0)
    users_reflection: tuple = tuple(DEFAULT_USERS_REFLECTION)
    users_transmission: tuple = tuple(DEFAULT_USERS_TRANSMISSION)
    budget: LinkBudget = field(default_factory=LinkBudget)
    pathloss: PathLossParams = field(default_factory=PathLossParams)
    rician: RicianParams = field(default_factory=RicianParams)
    episode_length: int = 1000
    seed: int = 0
    rwp_area_m2: float = 100.0  # square roaming area per user
    rwp_speed: float = 1.0  # meters per time step

    def __post_init__(self):
        if self.n <= 0 or self.m <= 0:
            raise ValueError("array sizes must be positive")
        if self.k + self.l >= self.n:
            raise ValueError("need K+L < N")
        if len(self.users_reflection) != self.k or len(self.users_transmission) != self.l:
            raise ValueError("user position lists must match K and L")
        if self.mobility not in ("static", "rwp"):
            raise ValueError(f"unknown mobility mode {self.mobility!r}")
        if self.assignment_mode not in ("learned", "equal"):
            raise ValueError(f"unknown assignment mode {self.assignment_mode!r}")

    @property
    def n(self) -> int:
        return self.n_h * self.n_v

    @property
    def users(self) -> int:
        return self.k + self.l

    @property
    def state_dim(self) -> int:
        return self.users + 2 * self.n

    @property
    def action_dim(self) -> int:
        return 2 * self.n


@dataclass
class StepResult:
    next_state: np.ndarray
    reward: float
    report: RateReport
    active_count: int
    assignment: np.ndarray
    theta: np.ndarray


def bin_center(bin_idx: int, users: int) -> float:
    """Center of an assignment-code bin on the [-1, 1] axis."""
    return -1.0 + (2.0 * bin_idx + 1.0) / (users + 1)


def decode_action(raw: np.ndarray, cfg: EnvConfig) -> tuple[np.ndarray, np.ndarray]:
    """Split a raw action into surface phases and a repaired assignment."""
    raw = np.asarray(raw, float).ravel()
    if raw.size != cfg.action_dim:
        raise ValueError(f"action length {raw.size} != {cfg.action_dim}")
    n, users = cfg.n, cfg.users
    theta = wrap_phase(np.pi * (raw[:n] + 1.0))

    codes = raw[n:]
    nb = users + 1
    bins = np.floor((codes + 1.0) / 2.0 * nb).astype(int)
    np.clip(bins, 0, nb - 1, out=bins)

    a = np.zeros((users, n), dtype=int)
    for elem, b in enumerate(bins):
        if b > 0:
            a[b - 1, elem] = 1

    # repair: every user must keep at least one element
    for u in range(users):
        if a[u].sum() > 0:
            continue
        owners = a.sum(axis=0)  # 0 = shut down, else owned
        row_sums = a.sum(axis=1)
        stealable = np.array([
            owners[e] == 0 or row_sums[np.argmax(a[:, e])] >= 2
            for e in range(n)
        ])
        center = bin_center(u + 1, users)
        dist = np.abs(codes - center)
        dist[~stealable] = np.inf
        chosen = int(np.argmin(dist))  # argmin takes the lowest index on ties
        a[:, chosen] = 0
        a[u, chosen] = 1
    return theta, a


def encode_state(
    report: RateReport | None,
    theta: np.ndarray,
    a: np.ndarray,
    cfg: EnvConfig,
) -> np.ndarray:
    """Pack SINRs, phases and assignment into the flat state vector."""
    users, n = cfg.users, cfg.n
    if report is None:
        sinr_block = np.zeros(users)
    else:
        sinrs = np.concatenate([report.sinr_t, report.sinr_r])
        sinr_block = np.log2(1.0 + sinrs) * SINR_STATE_SCALE
    phase_block = np.asarray(theta, float) / np.pi - 1.0
    owners = np.where(a.sum(axis=0) > 0, np.argmax(a, axis=0) + 1, 0)
    assign_block = np.array([bin_center(o, users) for o in owners])
    state = np.concatenate([sinr_block, phase_block, assign_block])
    assert state.size == cfg.state_dim
    return state


class StarRisEnv:
    """Single-owner environment; independent instances may run in parallel."""

    def __init__(self, cfg: EnvConfig):
        self.cfg = cfg
        self._equal_assignment = (
            equal_partition_assignment(cfg.n, cfg.k, cfg.l)
            if cfg.n % cfg.users == 0
            else None
        )
        if cfg.assignment_mode == "equal" and self._equal_assignment is None:
            raise ValueError("equal assignment mode needs N divisible by K+L")
        self._static_channels = (
            self._draw_static_channels() if cfg.mobility == "static" else None
        )
        self._waypoints: list[WaypointState] = []
        self._rng_motion = None
        self._rng_fading = None
        self._steps_done = 0

    # -- construction helpers ------------------------------------------------

    def _user_positions(self) -> list[np.ndarray]:
        cfg = self.cfg
        return [position(*p) for p in cfg.users_reflection] + [
            position(*p) for p in cfg.users_transmission
        ]

    def _draw_static_channels(self) -> ChannelSet:
        cfg = self.cfg
        rng = derive_stream(cfg.seed, 0)
        pl, ric = cfg.pathloss, cfg.rician
        bs = position(*cfg.bs_pos)
        ris = position(*cfg.ris_pos)
        lam = pl.wavelength

        d_br = np.linalg.norm(ris - bs)
        big_g = ch.static_rician_channel(
            rng, cfg.n, cfg.m, ric.bs_ris_los,
            ch.amplitude_gain(lam, d_br, pl.zeta_ris),
            ch.los_bs_ris(bs, ris, cfg.n_h, cfg.n_v, cfg.m),
        )

        def ris_user(pos):
            d = np.linalg.norm(pos - ris)
            return ch.static_rician_channel(
                rng, 1, cfg.n, ric.ris_user_los,
                ch.amplitude_gain(lam, d, pl.zeta_ris),
                ch.los_ris_user(ris, pos, cfg.n_h, cfg.n_v),
            )

        def direct(pos):
            d = np.linalg.norm(pos - bs)
            return ch.static_rician_channel(
                rng, 1, cfg.m, ric.direct_los,
                ch.amplitude_gain(lam, d, pl.zeta_direct),
                ch.los_direct(bs, pos, cfg.m),
            )

        refl = [position(*p) for p in cfg.users_reflection]
        trans = [position(*p) for p in cfg.users_transmission]
        return ChannelSet(
            big_g=big_g,
            g_r=[ris_user(p) for p in refl],
            g_t=[ris_user(p) for p in trans],
            h_r=[direct(p) for p in refl],
            h_t=[direct(p) for p in trans],
        )

    def _mobile_channels(self, prev_positions: list[np.ndarray]) -> ChannelSet:
        cfg = self.cfg
        rng = self._rng_fading
        pl, ric = cfg.pathloss, cfg.rician
        bs = position(*cfg.bs_pos)
        ris = position(*cfg.ris_pos)
        curr = [wp.current for wp in self._waypoints]

        big_g = ch.time_varying_bs_ris(
            rng, bs, ris, pl, ric.bs_ris_los, ric.bs_ris_nlos, cfg.n, cfg.m
        )
        g_all = [
            ch.time_varying_ris_user(
                rng, prev_positions[i], curr[i], ris, pl,
                ric.ris_user_los, ric.ris_user_nlos, cfg.n,
            )
            for i in range(cfg.users)
        ]
        h_all = [
            ch.time_varying_direct(
                rng, prev_positions[i], curr[i], bs, pl,
                ric.direct_los, ric.direct_nlos, cfg.m,
            )
            for i in range(cfg.users)
        ]
        return ChannelSet(
            big_g=big_g,
            g_r=g_all[: cfg.k],
            g_t=g_all[cfg.k:],
            h_r=h_all[: cfg.k],
            h_t=h_all[cfg.k:],
        )

    # -- MDP interface -------------------------------------------------------

    def reset(self, episode_seed: int = 0) -> np.ndarray:
        cfg = self.cfg
        self._steps_done = 0
        if cfg.mobility == "rwp":
            self._rng_motion = derive_stream(cfg.seed, 1, episode_seed)
            self._rng_fading = derive_stream(cfg.seed, 2, episode_seed)
            side = float(np.sqrt(cfg.rwp_area_m2))
            self._waypoints = []
            for home in self._user_positions():
                bounds = SquareBounds.centered(home, side)
                start = bounds.sample(self._rng_motion, z=home[2])
                self._waypoints.append(
                    make_waypoint_state(start, bounds, cfg.rwp_speed, self._rng_motion)
                )
        init_a = (
            self._equal_assignment
            if self._equal_assignment is not None
            else decode_action(np.zeros(cfg.action_dim), cfg)[1]
        )
        theta0 = wrap_phase(np.pi * np.ones(cfg.n))  # phase-code zeros
        return encode_state(None, theta0, init_a, cfg)

    def step(self, action: np.ndarray) -> StepResult:
        cfg = self.cfg
        theta, a = decode_action(action, cfg)
        if cfg.assignment_mode == "equal":
            a = self._equal_assignment

        if cfg.mobility == "rwp":
            prev = [wp.current.copy() for wp in self._waypoints]
            self._waypoints = [rwp_step(wp, self._rng_motion) for wp in self._waypoints]
            channels = self._mobile_channels(prev)
        else:
            channels = self._static_channels

        modes = modes_from_assignment(a, cfg.k)
        beta = modes.beta_r + modes.beta_t  # disjoint supports
        theta_effs_r = [
            effective_matrix(effective_coefficients(a[u], beta, theta))
            for u in range(cfg.k)
        ]
        theta_effs_t = [
            effective_matrix(effective_coefficients(a[cfg.k + u], beta, theta))
            for u in range(cfg.l)
        ]
        report = evaluate_rates(channels, theta_effs_r, theta_effs_t, cfg.budget)
        active = active_element_count(a)
        if cfg.mu == 0:
            reward = reward_avg_rate(report.rate_r, report.rate_t)
        else:
            reward = reward_penalized(report.rate_r, report.rate_t, cfg.mu, active)
        self._steps_done += 1
        return StepResult(
            next_state=encode_state(report, theta, a, cfg),
            reward=reward,
            report=report,
            active_count=active,
            assignment=a,
            theta=theta,
        )

    @property
    def user_positions_now(self) -> list[np.ndarray]:
        if self.cfg.mobility == "rwp" and self._waypoints:
            return [wp.current.copy() for wp in self._waypoints]
        return self._user_positions()
