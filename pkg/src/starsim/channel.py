"""Large-scale path loss and Rician fading for every link of the system.

Three link classes exist: base station to surface (N x M), surface to user
(1 x N) and base station to user (1 x M). Each has a static form, drawn once
and frozen, and a time-varying form for mobile users where the line-of-sight
phasor tracks delay plus Doppler and the scattered part is redrawn per step.

Conventions:
  * amplitude gains are linear field amplitudes, lambda / (4 pi d^(zeta/2));
  * Rician weights are sqrt(k_los/(k_los+1)) on the LoS part and
    sqrt(1/(k_nlos+1)) on the scattered part, with per-link-class factors;
  * static LoS matrices are built from half-wavelength array steering toward
    the geometric link direction, so they are unit-modulus and rank one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import SPEED_OF_LIGHT, distance, doppler_shift, radial_speed
from .numerics import sample_standard_complex_gaussian


@dataclass(frozen=True)
class PathLossParams:
    f_c: float = 3.5e9  # carrier frequency, Hz
    zeta_ris: float = 2.2  # exponent for BS<->RIS and RIS<->user links
    zeta_direct: float = 3.45  # exponent for BS<->user links
    d0: float = 1.0  # reference distance, m

    def __post_init__(self):
        if self.f_c <= 0 or self.zeta_ris <= 0 or self.zeta_direct <= 0 or self.d0 <= 0:
            raise ValueError("path-loss parameters must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c


@dataclass(frozen=True)
class RicianParams:
    """LoS/NLoS Rician factors per link class (linear, all 10 by default)."""

    direct_los: float = 10.0
    direct_nlos: float = 10.0
    ris_user_los: float = 10.0
    ris_user_nlos: float = 10.0
    bs_ris_los: float = 10.0
    bs_ris_nlos: float = 10.0

    def __post_init__(self):
        for v in (self.direct_los, self.direct_nlos, self.ris_user_los,
                  self.ris_user_nlos, self.bs_ris_los, self.bs_ris_nlos):
            if v < 0:
                raise ValueError("Rician factors must be nonnegative")


@dataclass
class ChannelSet:
    """Snapshot of every channel at one time step.

    G is N x M; each g_* entry is 1 x N, each h_* entry is 1 x M.
    """

    big_g: np.ndarray
    g_r: list = field(default_factory=list)
    g_t: list = field(default_factory=list)
    h_r: list = field(default_factory=list)
    h_t: list = field(default_factory=list)


def path_loss_db(params: PathLossParams, d: float, zeta: float) -> float:
    """Free-space-anchored power path loss in dB (negative)."""
    if d <= 0:
        raise ValueError("distance must be positive")
    anchor = -20.0 * np.log10(4.0 * np.pi * params.f_c / SPEED_OF_LIGHT)
    return float(anchor - 10.0 * zeta * np.log10(d / params.d0))


def amplitude_gain(lambda_c: float, d: float, zeta: float) -> float:
    """Linear field amplitude of a link: lambda / (4 pi d^(zeta/2))."""
    if d <= 0:
        raise ValueError("distance must be positive")
    return float(lambda_c / (4.0 * np.pi * d ** (zeta / 2.0)))


def los_phasor(f_c: float, f_d: float, tau: float) -> complex:
    """Unit-modulus line-of-sight phasor exp(-j 2 pi (f_c + f_d) tau)."""
    if tau < 0:
        raise ValueError("delay must be nonnegative")
    return complex(np.exp(-2j * np.pi * (f_c + f_d) * tau))


def rician_weights(kappa_los: float, kappa_nlos: float) -> tuple[float, float]:
    """(LoS weight, NLoS weight) for possibly different L/NL factors."""
    w_los = np.sqrt(kappa_los / (kappa_los + 1.0)) if np.isfinite(kappa_los) else 1.0
    w_nlos = np.sqrt(1.0 / (kappa_nlos + 1.0)) if np.isfinite(kappa_nlos) else 0.0
    return float(w_los), float(w_nlos)


def static_rician_channel(
    rng: np.random.Generator,
    rows: int,
    cols: int,
    kappa: float,
    gain: float,
    los: np.ndarray,
) -> np.ndarray:
    """One frozen Rician draw: gain * (sqrt(k/(k+1)) los + sqrt(1/(k+1)) CN)."""
    los = np.asarray(los, dtype=np.complex128)
    if los.shape != (rows, cols):
        raise ValueError(f"LoS shape {los.shape} does not match ({rows}, {cols})")
    w_los, w_nlos = rician_weights(kappa, kappa)
    scattered = sample_standard_complex_gaussian(rng, rows, cols)
    return gain * (w_los * los + w_nlos * scattered)


# ---------------------------------------------------------------------------
# steering-vector LoS construction (static channels)
# ---------------------------------------------------------------------------

def bs_steering(m: int, direction: np.ndarray) -> np.ndarray:
    """Half-wavelength ULA response along the x-axis, shape (m,)."""
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    return np.exp(-1j * np.pi * np.arange(m) * d[0])


def ris_steering(n_h: int, n_v: int, direction: np.ndarray) -> np.ndarray:
    """Half-wavelength UPA response, horizontal along x, vertical along z.

    Flattened row-major over (horizontal, vertical), shape (n_h * n_v,).
    """
    d = np.asarray(direction, float)
    d = d / np.linalg.norm(d)
    ah = np.exp(-1j * np.pi * np.arange(n_h) * d[0])
    av = np.exp(-1j * np.pi * np.arange(n_v) * d[2])
    return np.kron(ah, av)


def los_direct(bs_pos: np.ndarray, user_pos: np.ndarray, m: int) -> np.ndarray:
    """Unit-modulus LoS for a BS-to-user link, shape (1, m)."""
    return bs_steering(m, np.asarray(user_pos) - np.asarray(bs_pos)).reshape(1, m)


def los_ris_user(ris_pos: np.ndarray, user_pos: np.ndarray, n_h: int, n_v: int) -> np.ndarray:
    """Unit-modulus LoS for a surface-to-user link, shape (1, n_h*n_v)."""
    a = ris_steering(n_h, n_v, np.asarray(user_pos) - np.asarray(ris_pos))
    return a.reshape(1, -1)


def los_bs_ris(bs_pos: np.ndarray, ris_pos: np.ndarray, n_h: int, n_v: int, m: int) -> np.ndarray:
    """Rank-one unit-modulus LoS for the BS-to-surface link, shape (N, m)."""
    direction = np.asarray(ris_pos) - np.asarray(bs_pos)
    a_r = ris_steering(n_h, n_v, direction)
    a_b = bs_steering(m, direction)
    return np.outer(a_r, a_b)


# ---------------------------------------------------------------------------
# time-varying channels (mobile users)
# ---------------------------------------------------------------------------

def time_varying_direct(
    rng: np.random.Generator,
    prev_pos: np.ndarray,
    curr_pos: np.ndarray,
    bs_pos: np.ndarray,
    pl: PathLossParams,
    kappa_los: float,
    kappa_nlos: float,
    m: int,
) -> np.ndarray:
    """BS-to-user channel at one step of a moving user, shape (1, m).

    LoS is a common phasor at delay d/c shifted by the user's Doppler toward
    the BS; the scattered part is a fresh CN(0,1) draw.
    """
    d = distance(curr_pos, bs_pos)
    tau = d / SPEED_OF_LIGHT
    f_d = doppler_shift(radial_speed(prev_pos, curr_pos, bs_pos), pl.f_c)
    gain = amplitude_gain(pl.wavelength, d, pl.zeta_direct)
    w_los, w_nlos = rician_weights(kappa_los, kappa_nlos)
    los = los_phasor(pl.f_c, f_d, tau) * np.ones((1, m), dtype=np.complex128)
    scattered = sample_standard_complex_gaussian(rng, 1, m)
    return gain * (w_los * los + w_nlos * scattered)


def time_varying_ris_user(
    rng: np.random.Generator,
    prev_pos: np.ndarray,
    curr_pos: np.ndarray,
    ris_pos: np.ndarray,
    pl: PathLossParams,
    kappa_los: float,
    kappa_nlos: float,
    n: int,
) -> np.ndarray:
    """Surface-to-user channel at one step of a moving user, shape (1, n)."""
    d = distance(curr_pos, ris_pos)
    tau = d / SPEED_OF_LIGHT
    f_d = doppler_shift(radial_speed(prev_pos, curr_pos, ris_pos), pl.f_c)
    gain = amplitude_gain(pl.wavelength, d, pl.zeta_ris)
    w_los, w_nlos = rician_weights(kappa_los, kappa_nlos)
    los = los_phasor(pl.f_c, f_d, tau) * np.ones((1, n), dtype=np.complex128)
    scattered = sample_standard_complex_gaussian(rng, 1, n)
    return gain * (w_los * los + w_nlos * scattered)


def time_varying_bs_ris(
    rng: np.random.Generator,
    bs_pos: np.ndarray,
    ris_pos: np.ndarray,
    pl: PathLossParams,
    kappa_los: float,
    kappa_nlos: float,
    n: int,
    m: int,
) -> np.ndarray:
    """BS-to-surface channel, shape (n, m): unit LoS, per-step scattered part.

    Both endpoints are fixed, so the gain and the (all-ones) LoS matrix are
    constant; only the scattered matrix changes over time.
    """
    d = distance(bs_pos, ris_pos)
    gain = amplitude_gain(pl.wavelength, d, pl.zeta_ris)
    w_los, w_nlos = rician_weights(kappa_los, kappa_nlos)
    los = np.ones((n, m), dtype=np.complex128)
    scattered = sample_standard_complex_gaussian(rng, n, m)
    return gain * (w_los * los + w_nlos * scattered)
