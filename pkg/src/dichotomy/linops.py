"""Dense Hermitian linear algebra: Jacobi eigensolver and spectral matrix functions.

All matrices are small (a few dozen rows at most), so the eigensolver is a plain
cyclic Jacobi iteration.  Rotations are applied whenever an off-diagonal entry is
large *relative to the geometric mean of the two diagonal entries*, which keeps
tiny eigenvalues accurate to high relative precision (important for pseudo-inverse
powers of nearly singular states).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeEigenvalue, NoConvergence, NotHermitian, ZeroMatrix

HERMITIAN_TOL = 1e-12
CLUSTER_TOL = 1e-9
SUPPORT_CUTOFF = 1e-12
NEGATIVE_TOL = 1e-10

_EPS = np.finfo(float).eps


def hermitize(M: np.ndarray) -> np.ndarray:
    """Return the Hermitian part ``(M + M^*) / 2``."""
    M = np.asarray(M, dtype=complex)
    return (M + M.conj().T) / 2


def _check_square(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def jacobi_eigh(M: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, V)`` with ``M = V diag(w) V^*``; ordering of ``w`` is unspecified.
    Raises :class:`NoConvergence` after ``max_sweeps`` sweeps.
    """
    A = np.array(M, dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = np.linalg.norm(A)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(A)).copy(), V
    tiny = 1e-30 * scale
    for sweep in range(1, max_sweeps + 1):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = A[p, q]
                r = abs(z)
                if r <= tiny:
                    continue
                a = A[p, p].real
                b = A[q, q].real
                if r <= _EPS * np.sqrt(abs(a) * abs(b)):
                    continue
                rotated = True
                theta = (b - a) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                w = np.conj(z) / r
                G = np.array([[c, s], [-s * w, c * w]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = G.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = a - t * r
                A[q, q] = b + t * r
                V[:, idx] = V[:, idx] @ G
        if not rotated:
            return np.real(np.diag(A)).copy(), V
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps", max_sweeps)


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigenvalues in descending order with their eigenvectors and eigen-clusters.

    ``clusters`` groups indices of numerically equal eigenvalues; ``projectors``
    holds one orthogonal projector per cluster and ``values`` the cluster means.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clusters: tuple[tuple[int, ...], ...]
    projectors: tuple[np.ndarray, ...] = field(repr=False)
    values: np.ndarray = field(repr=False)
    support_rank: int = 0

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    @property
    def vmax(self) -> float:
        return float(self.eigenvalues[0])

    def cutoff(self) -> float:
        return SUPPORT_CUTOFF * max(self.vmax, 0.0)

    def support_mask(self) -> np.ndarray:
        return self.eigenvalues > self.cutoff()

    def support_projector(self) -> np.ndarray:
        mask = self.support_mask()
        Vs = self.eigenvectors[:, mask]
        return Vs @ Vs.conj().T

    def reconstruct(self) -> np.ndarray:
        return sum(v * P for v, P in zip(self.values, self.projectors))

    def function(self, f, support_only: bool = False) -> np.ndarray:
        """``sum_i f(w_i) |v_i><v_i|``, optionally restricted to the support."""
        w, V = self.eigenvalues, self.eigenvectors
        if support_only:
            mask = self.support_mask()
            w, V = w[mask], V[:, mask]
        return (V * f(w)) @ V.conj().T

    def _check_psd(self) -> None:
        vmax = max(self.vmax, 0.0)
        if self.eigenvalues[-1] < -NEGATIVE_TOL * vmax or (vmax == 0.0 and self.eigenvalues[-1] < 0):
            raise NegativeEigenvalue(f"matrix has eigenvalue {self.eigenvalues[-1]:.3e} < 0")

    def power(self, t: float) -> np.ndarray:
        self._check_psd()
        if t == 0:
            return self.support_projector()
        return self.function(lambda w: w ** t, support_only=True)

    def log(self) -> np.ndarray:
        self._check_psd()
        if self.vmax <= 0.0:
            raise ZeroMatrix("logarithm of the zero matrix")
        return self.function(np.log, support_only=True)


def _cluster(w: np.ndarray, tol: float) -> tuple[tuple[int, ...], ...]:
    scale = max(1.0, float(np.max(np.abs(w))))
    clusters = [[0]]
    for i in range(1, len(w)):
        if abs(w[clusters[-1][-1]] - w[i]) <= tol * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return tuple(tuple(c) for c in clusters)


def hermitian_eig(M: np.ndarray, cluster_tol: float = CLUSTER_TOL) -> SpectralDecomp:
    """Spectral decomposition of a Hermitian matrix with eigenvalue clustering.

    Two neighbouring eigenvalues share a cluster when they differ by at most
    ``cluster_tol * max(1, |v_max|)``.
    """
    M = _check_square(M)
    dev = np.max(np.abs(M - M.conj().T))
    if dev > HERMITIAN_TOL:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e}")
    w, V = jacobi_eigh(hermitize(M))
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    clusters = _cluster(w, cluster_tol)
    projectors = tuple(V[:, list(c)] @ V[:, list(c)].conj().T for c in clusters)
    values = np.array([np.mean(w[list(c)]) for c in clusters])
    vmax = max(float(w[0]), 0.0)
    support_rank = int(np.sum(w > SUPPORT_CUTOFF * vmax)) if vmax > 0 else 0
    return SpectralDecomp(w, V, clusters, projectors, values, support_rank)


def spectral_power(M: np.ndarray, t: float) -> np.ndarray:
    """Pseudo-inverse power ``M^t`` of a positive semidefinite matrix.

    Eigenvalues below ``1e-12 * v_max`` are treated as zero and left untouched,
    so ``t = 0`` yields the support projector.
    """
    return hermitian_eig(M).power(t)


def spectral_log(M: np.ndarray) -> np.ndarray:
    """Matrix logarithm on the support of a positive semidefinite matrix."""
    return hermitian_eig(M).log()


def spectral_exp(M: np.ndarray) -> np.ndarray:
    """Matrix exponential of a Hermitian matrix."""
    return hermitian_eig(M).function(np.exp)


def trace_norm(A: np.ndarray) -> float:
    """Schatten 1-norm of a Hermitian matrix."""
    return float(np.sum(np.abs(jacobi_eigh(hermitize(A))[0])))
