"""Line-by-line transcription of the SINR definitions, kept independent of
the package's linear algebra (explicit index loops only). Used as the oracle
for the physical-layer implementation."""

import numpy as np


def cascade_scalar(g, theta_mat, big_g, w):
    """g (1xN) times diag coefficients times G (NxM) times w (Mx1), by loops."""
    n_elems, m_ant = big_g.shape
    acc = 0.0 + 0.0j
    for n in range(n_elems):
        for m in range(m_ant):
            acc += g[0, n] * theta_mat[n, n] * big_g[n, m] * w[m, 0]
    return acc


def direct_scalar(h, w):
    acc = 0.0 + 0.0j
    for m in range(h.shape[1]):
        acc += h[0, m] * w[m, 0]
    return acc


def sinr_oracle(idx, gs, hs, theta_mats, ws, big_g, p, sigma_sq):
    """SINR of user `idx` within one space, transcribed term by term."""
    signal = cascade_scalar(gs[idx], theta_mats[idx], big_g, ws[idx]) + direct_scalar(
        hs[idx], ws[idx]
    )
    num = p * abs(signal) ** 2
    den = sigma_sq
    for j in range(len(gs)):
        if j == idx:
            continue
        leak = cascade_scalar(gs[j], theta_mats[j], big_g, ws[idx])
        den += p * abs(leak) ** 2
    return num / den


def mrt_oracle(g, theta_mat, big_g, h):
    """Beamformer transcription: conjugate transpose over cascaded norm^2."""
    n_elems, m_ant = big_g.shape
    row = np.zeros((1, m_ant), dtype=complex)
    for m in range(m_ant):
        for n in range(n_elems):
            row[0, m] += g[0, n] * theta_mat[n, n] * big_g[n, m]
    norm_sq = sum(abs(row[0, m]) ** 2 for m in range(m_ant))
    return (row + h).conj().T / norm_sq
