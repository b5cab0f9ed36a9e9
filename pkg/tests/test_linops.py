import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dichotomy.errors import NegativeEigenvalue, NotHermitian, ZeroMatrix
from dichotomy.linops import hermitian_eig, jacobi_eigh, spectral_exp, spectral_log, spectral_power

from conftest import SX, SZ


def random_hermitian(seed, n, rank=None, psd=False):
    rng = np.random.default_rng(seed)
    k = n if rank is None else rank
    G = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    if psd:
        return G @ G.conj().T
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return A + A.conj().T


def test_identity_single_cluster():
    e = hermitian_eig(np.eye(3))
    assert e.clusters == ((0, 1, 2),)
    np.testing.assert_allclose(e.projectors[0], np.eye(3), atol=1e-14)
    np.testing.assert_allclose(e.values, [1.0])


def test_degenerate_diagonal():
    e = hermitian_eig(np.diag([0.5, 0.5]))
    assert len(e.clusters) == 1
    assert e.values[0] == pytest.approx(0.5)


def test_pauli_x():
    e = hermitian_eig(SX)
    np.testing.assert_allclose(e.eigenvalues, [1, -1], atol=1e-15)
    plus = np.full((2, 2), 0.5)
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]])
    np.testing.assert_allclose(e.projectors[0], plus, atol=1e-14)
    np.testing.assert_allclose(e.projectors[1], minus, atol=1e-14)


def test_not_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[1, 1], [0, 1]]))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16])
@pytest.mark.parametrize("seed", range(5))
def test_against_numpy_eigh(n, seed):
    A = random_hermitian(seed, n)
    e = hermitian_eig(A)
    np.testing.assert_allclose(e.eigenvalues, np.linalg.eigvalsh(A)[::-1], atol=1e-12 * np.abs(A).max())
    assert np.linalg.norm(e.reconstruct() - A) <= 1e-10 * np.linalg.norm(A)
    assert all(np.diff(e.eigenvalues) <= 0)


@given(st.integers(0, 10**6), st.integers(1, 8))
def test_projector_invariants(seed, n):
    A = random_hermitian(seed, n, rank=max(1, n - 2), psd=True)
    e = hermitian_eig(A)
    for i, P in enumerate(e.projectors):
        assert np.linalg.norm(P @ P - P, 2) < 1e-10
        for Q in e.projectors[i + 1:]:
            assert np.linalg.norm(P @ Q, 2) < 1e-10
    nonzero = sum(P for v, P in zip(e.values, e.projectors) if v > e.cutoff())
    assert np.linalg.norm(nonzero - e.support_projector(), 2) < 1e-10


def test_graded_relative_accuracy():
    w = np.array([1.0, 1e-8, 1e-16])
    U = np.linalg.qr(np.random.default_rng(0).normal(size=(3, 3)))[0]
    e = hermitian_eig(np.diag(w))
    np.testing.assert_allclose(e.eigenvalues, w, rtol=1e-14)
    e2 = hermitian_eig(U @ np.diag(w) @ U.T)
    assert e2.eigenvalues[1] == pytest.approx(1e-8, rel=1e-6)


def test_jacobi_raw_output_diagonalizes():
    A = random_hermitian(3, 6)
    w, V = jacobi_eigh(A)
    np.testing.assert_allclose(V.conj().T @ A @ V, np.diag(w), atol=1e-12)


def test_cluster_tolerance_parameter():
    A = np.diag([1.0, 1.0 + 1e-7, 0.2])
    assert len(hermitian_eig(A).clusters) == 3
    assert len(hermitian_eig(A, cluster_tol=1e-6).clusters) == 2


@pytest.mark.parametrize(
    "M, t, expected",
    [
        (np.eye(2) / 2, -1, 2 * np.eye(2)),
        (np.diag([4.0, 0.0]), 0.5, np.diag([2.0, 0.0])),
        (np.diag([math.e, 1 / math.e]), 0.5, np.diag([math.exp(0.5), math.exp(-0.5)])),
        (np.diag([4.0, 0.0]), 0, np.diag([1.0, 0.0])),
    ],
)
def test_spectral_power_examples(M, t, expected):
    np.testing.assert_allclose(spectral_power(M, t), expected, atol=1e-14)


def test_spectral_power_negative():
    with pytest.raises(NegativeEigenvalue):
        spectral_power(np.diag([1.0, -0.1]), 0.5)


@given(st.integers(0, 10**6), st.integers(1, 8))
def test_power_one_is_support_restriction(seed, n):
    A = random_hermitian(seed, n, rank=max(1, n // 2), psd=True)
    e = hermitian_eig(A)
    assert np.linalg.norm(spectral_power(A, 1) - A @ e.support_projector()) < 1e-9 * max(1, np.linalg.norm(A))


@pytest.mark.parametrize("s", [-1, -0.5, 0.5, 1, 2])
@pytest.mark.parametrize("t", [-1, -0.5, 0.5, 1, 2])
def test_power_semigroup(s, t):
    A = random_hermitian(7, 4, rank=3, psd=True)
    A = A / np.trace(A).real
    lhs = spectral_power(A, s) @ spectral_power(A, t)
    assert np.linalg.norm(lhs - spectral_power(A, s + t)) < 1e-9 * max(1, np.linalg.norm(spectral_power(A, s + t)))


def test_spectral_log_examples():
    np.testing.assert_allclose(spectral_log(np.eye(3)), np.zeros((3, 3)), atol=1e-15)
    np.testing.assert_allclose(spectral_log(np.diag([math.e, math.e ** 2])), np.diag([1.0, 2.0]), atol=1e-14)
    sigma = np.diag([math.e, 1 / math.e]) / (2 * math.cosh(1))
    np.testing.assert_allclose(spectral_log(sigma), SZ.real - math.log(2 * math.cosh(1)) * np.eye(2), atol=1e-14)
    with pytest.raises(ZeroMatrix):
        spectral_log(np.zeros((2, 2)))


@given(st.integers(0, 10**6), st.integers(1, 6))
def test_exp_log_roundtrip(seed, n):
    A = random_hermitian(seed, n, psd=True) + 0.1 * np.eye(n)
    assert np.linalg.norm(spectral_exp(spectral_log(A)) - A) < 1e-9 * np.linalg.norm(A)
