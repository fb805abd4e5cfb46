"""Exhaustive search over assignments and gridded phases for tiny instances.

Enumerates every assignment of elements to users (or shutdown) that keeps at
least one element per user, and for each assignment every combination of
per-element phases on a uniform grid. The objective is the total SINR over
all users with maximum-ratio beamformers, evaluated vectorized across the
whole phase grid. Feasible only at toy sizes; larger requests are refused.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .channel import ChannelSet
from .phy import LinkBudget

MAX_ELEMENTS = 6
MAX_USERS = 3
MAX_PHASE_LEVELS = 8


class OracleSizeError(ValueError):
    """Raised when an instance is too large to enumerate."""


def check_instance_size(n: int, users: int, phase_levels: int) -> None:
    if n > MAX_ELEMENTS or users > MAX_USERS or phase_levels > MAX_PHASE_LEVELS:
        raise OracleSizeError(
            f"instance (N={n}, users={users}, levels={phase_levels}) exceeds "
            f"(N<={MAX_ELEMENTS}, users<={MAX_USERS}, levels<={MAX_PHASE_LEVELS})"
        )
    if phase_levels < 1:
        raise ValueError("need at least one phase level")


def evaluate_configurations(
    channels: ChannelSet,
    a: np.ndarray,
    phases: np.ndarray,
    k: int,
    budget: LinkBudget,
) -> np.ndarray:
    """Total SINR of one assignment under a batch of phase vectors.

    `phases` is (C, N); returns (C,). Configurations whose cascaded channel
    vanishes for some user score -inf (their beamformer is undefined).
    """
    a = np.asarray(a, int)
    phases = np.atleast_2d(np.asarray(phases, float))
    users, n = a.shape
    l = users - k
    gs = list(channels.g_r) + list(channels.g_t)
    hs = list(channels.h_r) + list(channels.h_t)
    p = budget.power_w
    sigma_sq = budget.sigma_sq

    phasors = np.exp(1j * phases)  # (C, N)
    u_list, v_list, norm_list = [], [], []
    for u in range(users):
        s_u = a[u] * phasors  # (C, N)
        u_u = (s_u * gs[u].ravel()) @ channels.big_g  # (C, M)
        v_u = u_u + hs[u].ravel()
        u_list.append(u_u)
        v_list.append(v_u)
        norm_list.append(np.sum(np.abs(u_u) ** 2, axis=1))

    total = np.zeros(phases.shape[0])
    valid = np.ones(phases.shape[0], dtype=bool)
    for u in range(users):
        norm_u = norm_list[u]
        valid &= norm_u > 0
        safe = np.where(norm_u > 0, norm_u, 1.0)
        v_sq = np.sum(np.abs(v_list[u]) ** 2, axis=1)
        num = p * (v_sq / safe) ** 2
        same_space = range(k) if u < k else range(k, users)
        interference = np.zeros(phases.shape[0])
        for j in same_space:
            if j == u:
                continue
            inner = np.sum(u_list[j] * v_list[u].conj(), axis=1)
            interference += p * np.abs(inner) ** 2 / safe**2
        total += num / (interference + sigma_sq)
    total[~valid] = -np.inf
    return total


def _phase_grid(n_active: int, levels: np.ndarray) -> np.ndarray:
    grids = np.meshgrid(*([levels] * n_active), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def best_phases_for_assignment(
    channels: ChannelSet,
    a: np.ndarray,
    k: int,
    budget: LinkBudget,
    phase_levels: int = 8,
) -> tuple[np.ndarray, float]:
    """Best gridded phase vector (inactive elements pinned to zero) and value."""
    a = np.asarray(a, int)
    users, n = a.shape
    check_instance_size(n, users, phase_levels)
    levels = 2.0 * np.pi * np.arange(phase_levels) / phase_levels
    active = np.flatnonzero(a.sum(axis=0) > 0)
    phases = np.zeros((phase_levels ** len(active), n))
    if len(active):
        phases[:, active] = _phase_grid(len(active), levels)
    values = evaluate_configurations(channels, a, phases, k, budget)
    best = int(np.argmax(values))
    return phases[best], float(values[best])


def valid_assignments(n: int, users: int):
    """Yield every (users x n) binary matrix with column sums <= 1, row sums >= 1."""
    for labels in product(range(users + 1), repeat=n):
        counts = np.bincount(labels, minlength=users + 1)
        if (counts[1:] == 0).any():
            continue
        a = np.zeros((users, n), dtype=int)
        for elem, lab in enumerate(labels):
            if lab > 0:
                a[lab - 1, elem] = 1
        yield a


def brute_force_best_assignment(
    channels: ChannelSet,
    k: int,
    l: int,
    budget: LinkBudget,
    phase_levels: int = 8,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Exhaustive argmax of total SINR over assignments and gridded phases.

    Returns (assignment, phases, value).
    """
    n = channels.big_g.shape[0]
    users = k + l
    check_instance_size(n, users, phase_levels)
    best_value = -np.inf
    best_a = None
    best_theta = None
    for a in valid_assignments(n, users):
        theta, value = best_phases_for_assignment(channels, a, k, budget, phase_levels)
        if value > best_value:
            best_value = value
            best_a = a
            best_theta = theta
    return best_a, best_theta, float(best_value)


def random_configuration(
    rng: np.random.Generator, n: int, k: int, l: int, phase_levels: int = 8
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform random point of the oracle's search space (valid assignment,
    gridded phases on active elements)."""
    users = k + l
    while True:
        labels = rng.integers(0, users + 1, size=n)
        if len(np.unique(labels[labels > 0])) == users:
            break
    a = np.zeros((users, n), dtype=int)
    for elem, lab in enumerate(labels):
        if lab > 0:
            a[lab - 1, elem] = 1
    theta = 2.0 * np.pi * rng.integers(0, phase_levels, size=n) / phase_levels
    theta[a.sum(axis=0) == 0] = 0.0
    return a, theta
