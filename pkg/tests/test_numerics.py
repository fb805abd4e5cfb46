import numpy as np
import pytest

from starsim.numerics import (
    derive_stream,
    diag_from_vector,
    euclid_norm_sq,
    hermitian,
    matmul,
    rng_stream,
    sample_standard_complex_gaussian,
)


def test_matmul_identity():
    rng = rng_stream(1)
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert np.allclose(matmul(np.eye(2), x), x)


def test_matmul_imaginary_unit_squares_to_minus_one():
    j = np.array([[1j, 0], [0, 1j]])
    assert np.allclose(matmul(j, j), -np.eye(2))


def test_matmul_matches_triple_loop():
    rng = rng_stream(2)
    a = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    b = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    expected = np.zeros((3, 2), dtype=complex)
    for i in range(3):
        for j in range(2):
            for k in range(4):
                expected[i, j] += a[i, k] * b[k, j]
    assert np.allclose(matmul(a, b), expected, rtol=1e-12)


def test_matmul_shape_error():
    with pytest.raises(ValueError):
        matmul(np.eye(2), np.eye(3))


def test_hermitian_cases():
    assert np.allclose(hermitian(np.array([[1 + 1j]])), np.array([[1 - 1j]]))
    sym = np.array([[1.0, 2.0], [2.0, 3.0]])
    assert np.allclose(hermitian(sym), sym)
    rng = rng_stream(3)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(hermitian(hermitian(a)), a)


def test_euclid_norm_sq():
    assert euclid_norm_sq(np.array([1.0, 1j])) == pytest.approx(2.0)
    assert euclid_norm_sq(np.zeros(5)) == 0.0
    assert euclid_norm_sq(np.array([3 + 4j])) == pytest.approx(25.0)
    with pytest.raises(ValueError):
        euclid_norm_sq(np.ones((2, 2)))


def test_norm_scaling_property():
    rng = rng_stream(4)
    for _ in range(50):
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        alpha = rng.standard_normal() + 1j * rng.standard_normal()
        lhs = euclid_norm_sq(alpha * v)
        rhs = abs(alpha) ** 2 * euclid_norm_sq(v)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_diag_from_vector():
    assert np.allclose(diag_from_vector(np.array([1.0, 1.0])), np.eye(2))
    assert np.allclose(diag_from_vector(np.array([np.exp(1j * np.pi)])), [[-1.0]])
    with pytest.raises(ValueError):
        diag_from_vector(np.ones((2, 2)))


def test_diag_acts_elementwise():
    rng = rng_stream(5)
    for _ in range(20):
        s = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert np.allclose(diag_from_vector(s) @ x, s * x, rtol=1e-12)


def test_matmul_associativity():
    rng = rng_stream(6)
    for _ in range(20):
        a = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
        b = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
        c = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
        left = matmul(matmul(a, b), c)
        right = matmul(a, matmul(b, c))
        assert np.allclose(left, right, rtol=1e-10)


def test_complex_gaussian_moments():
    rng = rng_stream(7)
    samples = sample_standard_complex_gaussian(rng, 1000, 100)
    assert abs(samples.mean()) < 0.02
    assert np.var(samples.real) + np.var(samples.imag) == pytest.approx(1.0, abs=0.02)


def test_complex_gaussian_seed_determinism():
    a = sample_standard_complex_gaussian(rng_stream(42), 4, 4)
    b = sample_standard_complex_gaussian(rng_stream(42), 4, 4)
    assert np.array_equal(a, b)


def test_stream_reproducibility():
    a = rng_stream(123).standard_normal(10_000)
    b = rng_stream(123).standard_normal(10_000)
    assert np.array_equal(a, b)


def test_derived_streams_differ_by_key():
    a = derive_stream(9, 1).standard_normal(8)
    b = derive_stream(9, 2).standard_normal(8)
    c = derive_stream(9, 1).standard_normal(8)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, c)
