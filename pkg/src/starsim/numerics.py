"""Dense complex linear algebra helpers and the seeded RNG contract.

Everything downstream (channels, surface coefficients, beamformers) lives in
complex128 arrays. The helpers here add the shape checking the physical-layer
code relies on; plain numpy operators are used wherever no checking is needed.

Random streams are PCG64 generators. Identical seeds give identical sequences
across platforms, which is what makes run/episode reproducibility possible.
"""

from __future__ import annotations

import numpy as np


def rng_stream(seed: int) -> np.random.Generator:
    """Create an independent random stream from a 64-bit seed."""
    return np.random.default_rng(seed)


def derive_stream(seed: int, *keys: int) -> np.random.Generator:
    """Derive a stream from a base seed plus context keys (run, episode, ...).

    Distinct key tuples give statistically independent streams; the same
    tuple always gives the same stream.
    """
    return np.random.default_rng([int(seed), *[int(k) for k in keys]])


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={m.ndim}")
    return m


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Complex matrix product with an explicit conformability check."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch for matmul: {a.shape} x {b.shape}")
    return a @ b


def hermitian(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return as_complex_matrix(a).conj().T


def is_vector(v: np.ndarray) -> bool:
    v = np.asarray(v)
    return v.ndim == 1 or (v.ndim == 2 and 1 in v.shape)


def euclid_norm_sq(v: np.ndarray) -> float:
    """Squared Euclidean norm of a vector: sum of |entry|^2."""
    v = np.asarray(v, dtype=np.complex128)
    if not is_vector(v):
        raise ValueError(f"expected a vector, got shape {v.shape}")
    flat = v.ravel()
    return float(np.vdot(flat, flat).real)


def diag_from_vector(v: np.ndarray) -> np.ndarray:
    """N x N diagonal matrix from a length-N vector."""
    v = np.asarray(v, dtype=np.complex128)
    if not is_vector(v):
        raise ValueError(f"expected a vector, got shape {v.shape}")
    return np.diag(v.ravel())


def sample_standard_complex_gaussian(
    rng: np.random.Generator, rows: int, cols: int
) -> np.ndarray:
    """i.i.d. CN(0,1) entries: real and imaginary parts each N(0, 1/2)."""
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / np.sqrt(2.0)
