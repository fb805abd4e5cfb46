"""Surface configuration state under the mode-switching protocol.

The assignment matrix A is (K+L) x N binary, reflection-user rows first.
A column with a single one ties that element to one user; an all-zero column
is a shut-down element. Element amplitudes are exactly one when active, and
one learned phase per element applies in whichever mode the element runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import diag_from_vector

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ModeVector:
    """Per-element mode flags: at most one of (transmission, reflection) set."""

    beta_t: np.ndarray
    beta_r: np.ndarray


def validate_assignment(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"assignment matrix must be 2-D, got shape {a.shape}")
    if not np.isin(a, (0, 1)).all():
        raise ValueError("assignment matrix entries must be 0 or 1")
    col_sums = a.sum(axis=0)
    if (col_sums > 1).any():
        bad = int(np.argmax(col_sums > 1))
        raise ValueError(f"element {bad} assigned to more than one user")
    return a.astype(int)


def modes_from_assignment(a: np.ndarray, k: int) -> ModeVector:
    """Derive mode flags from an assignment matrix with K reflection rows."""
    a = validate_assignment(a)
    beta_r = (a[:k].sum(axis=0) > 0).astype(int)
    beta_t = (a[k:].sum(axis=0) > 0).astype(int)
    return ModeVector(beta_t=beta_t, beta_r=beta_r)


def effective_coefficients(a_row: np.ndarray, beta: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Per-user coefficient vector: a_n * sqrt(beta_n) * exp(j theta_n)."""
    a_row = np.asarray(a_row, float).ravel()
    beta = np.asarray(beta, float).ravel()
    theta = np.asarray(theta, float).ravel()
    if not (a_row.size == beta.size == theta.size):
        raise ValueError("assignment row, mode vector and phases must share length")
    return a_row * np.sqrt(beta) * np.exp(1j * theta)


def effective_matrix(s: np.ndarray) -> np.ndarray:
    """Diagonal surface-coefficient matrix diag(s)."""
    return diag_from_vector(s)


def active_element_count(a: np.ndarray) -> int:
    """Total number of elements currently assigned to any user."""
    return int(np.asarray(a).sum())


def equal_partition_assignment(n: int, k: int, l: int) -> np.ndarray:
    """Contiguous equal split of N elements over K+L users, all active."""
    users = k + l
    if users <= 0:
        raise ValueError("need at least one user")
    if n % users != 0:
        raise ValueError(f"{n} elements do not split evenly over {users} users")
    block = n // users
    a = np.zeros((users, n), dtype=int)
    for u in range(users):
        a[u, u * block:(u + 1) * block] = 1
    return a


def wrap_phase(theta: np.ndarray) -> np.ndarray:
    """Reduce phases into [0, 2*pi)."""
    wrapped = np.mod(np.asarray(theta, float), TWO_PI)
    # mod can return 2*pi for inputs just below a multiple of it
    wrapped[wrapped >= TWO_PI] = 0.0
    return wrapped
