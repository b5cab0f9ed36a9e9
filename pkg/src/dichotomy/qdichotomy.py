"""Quantum dichotomies ``(rho, sigma)``: validation, structure and classical simulations."""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .classical import ClassicalDichotomy
from .errors import (
    AmbiguousBasisWarning,
    CertificationError,
    DegenerateSigma,
    InvalidState,
    NotCommuting,
    NotPure,
)
from .linops import SpectralDecomp, hermitian_eig, hermitize, trace_norm

STATE_HERMITIAN_TOL = 1e-12
STATE_PSD_TOL = 1e-10
STATE_TRACE_TOL = 1e-10
SUPPORT_TOL = 1e-9
OVERLAP_CUTOFF = 1e-12
CERTIFY_TOL = 1e-8


def density_matrix(M, name: str = "state") -> np.ndarray:
    """Validate a density matrix and return it as a Hermitian complex array.

    Raises :class:`InvalidState` unless ``M`` is Hermitian within 1e-12, has
    eigenvalues >= -1e-10 and unit trace within 1e-10.
    """
    M = np.array(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InvalidState(f"{name}: expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidState(f"{name}: non-finite entries")
    if np.max(np.abs(M - M.conj().T)) > STATE_HERMITIAN_TOL:
        raise InvalidState(f"{name}: not Hermitian")
    M = hermitize(M)
    tr = np.trace(M).real
    if abs(tr - 1) > STATE_TRACE_TOL:
        raise InvalidState(f"{name}: trace {tr!r} differs from 1")
    w = hermitian_eig(M).eigenvalues
    if w[-1] < -STATE_PSD_TOL:
        raise InvalidState(f"{name}: negative eigenvalue {w[-1]:.3e}")
    return M


class QuantumDichotomy:
    """Pair of density matrices of equal dimension.

    ``support_ok`` records whether ``supp rho`` lies in ``supp sigma``.  Spectral
    decompositions of both states are computed once and cached.

    Examples
    --------
    >>> d = QuantumDichotomy(np.diag([0.5, 0.5]), np.diag([0.75, 0.25]))
    >>> d.dim, d.support_ok
    (2, True)
    """

    def __init__(self, rho, sigma):
        self.rho = density_matrix(rho, "rho")
        self.sigma = density_matrix(sigma, "sigma")
        if self.rho.shape != self.sigma.shape:
            raise InvalidState(f"dimension mismatch: {self.rho.shape} vs {self.sigma.shape}")
        Pk = np.eye(self.dim) - self.sigma_eig.support_projector()
        self.support_ok = bool(np.linalg.norm(Pk @ self.rho @ Pk, 2) <= SUPPORT_TOL)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @cached_property
    def rho_eig(self) -> SpectralDecomp:
        return hermitian_eig(self.rho)

    @cached_property
    def sigma_eig(self) -> SpectralDecomp:
        return hermitian_eig(self.sigma)

    @classmethod
    def from_classical(cls, d: ClassicalDichotomy) -> "QuantumDichotomy":
        p, q = d.as_arrays()
        return cls(np.diag(p / p.sum()), np.diag(q / q.sum()))

    def swapped(self) -> "QuantumDichotomy":
        return QuantumDichotomy(self.sigma, self.rho)

    def tensor(self, other: "QuantumDichotomy") -> "QuantumDichotomy":
        return QuantumDichotomy(np.kron(self.rho, other.rho), np.kron(self.sigma, other.sigma))

    def conjugated(self, U: np.ndarray) -> "QuantumDichotomy":
        return QuantumDichotomy(U @ self.rho @ U.conj().T, U @ self.sigma @ U.conj().T)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return self.rho_eig.vmax >= 1 - tol

    def __repr__(self) -> str:
        return f"QuantumDichotomy(dim={self.dim}, support_ok={self.support_ok})"


def _spectral_data(e: SpectralDecomp) -> tuple[list[float], list[np.ndarray]]:
    """Cluster values (zero below the support cutoff) and projectors."""
    cut = e.cutoff()
    vals = [float(v) if v > cut else 0.0 for v in e.values]
    return vals, list(e.projectors)


# ---------------------------------------------------------------------------
# Commutativity and structure


def commutes(d: QuantumDichotomy, tol: float = 1e-10) -> bool:
    """``||[rho, sigma]||_F <= tol ||rho||_F ||sigma||_F``."""
    C = d.rho @ d.sigma - d.sigma @ d.rho
    return bool(np.linalg.norm(C) <= tol * np.linalg.norm(d.rho) * np.linalg.norm(d.sigma))


def commutant_dimension(d: QuantumDichotomy, tol: float = 1e-9) -> int:
    """Dimension of ``{A : [rho, A] = [sigma, A] = 0}``; 1 means the pair is irreducible."""
    n = d.dim
    eye = np.eye(n)
    maps = [np.kron(X, eye) - np.kron(eye, X.T) for X in (d.rho, d.sigma)]
    s = np.linalg.svd(np.vstack(maps), compute_uv=False)
    scale = max(np.linalg.norm(d.rho, 2), np.linalg.norm(d.sigma, 2))
    return int(np.sum(s <= tol * scale)) + (n * n - len(s))


def _joint_basis(d: QuantumDichotomy) -> np.ndarray:
    cols = []
    for P in d.sigma_eig.projectors:
        e = hermitian_eig(P)
        B = e.eigenvectors[:, e.eigenvalues > 0.5]
        sub = hermitian_eig(hermitize(B.conj().T @ d.rho @ B))
        cols.append(B @ sub.eigenvectors)
    return np.hstack(cols)


def commuting_reduction(d: QuantumDichotomy, tol: float = 1e-10) -> ClassicalDichotomy:
    """Diagonals ``(p, q)`` of a commuting pair in a joint eigenbasis.

    The basis diagonalises ``sigma`` and, inside each eigenspace of ``sigma``, ``rho``.
    """
    if not commutes(d, tol):
        raise NotCommuting("rho and sigma do not commute")
    V = _joint_basis(d)
    p = np.clip(np.real(np.einsum("ij,ik,kj->j", V.conj(), d.rho, V)), 0, None)
    q = np.clip(np.real(np.einsum("ij,ik,kj->j", V.conj(), d.sigma, V)), 0, None)
    return ClassicalDichotomy.normalized(p, q, zero_tol=1e-12)


def nussbaum_szkola_vectors(d: QuantumDichotomy) -> tuple[np.ndarray, np.ndarray]:
    """Float Nussbaum-Szkola pair ``P_ij = p_i tr[R_i S_j]``, ``Q_ij = q_j tr[R_i S_j]``.

    Indices run over the eigen-clusters of ``rho`` (``i``) and ``sigma`` (``j``);
    overlaps below 1e-12 are set to zero.
    """
    pv, R = _spectral_data(d.rho_eig)
    qv, S = _spectral_data(d.sigma_eig)
    P, Q = [], []
    for pi, Ri in zip(pv, R):
        for qj, Sj in zip(qv, S):
            ov = float(np.real(np.vdot(Ri, Sj)))
            ov = ov if ov > OVERLAP_CUTOFF else 0.0
            P.append(pi * ov)
            Q.append(qj * ov)
    return np.array(P), np.array(Q)


def nussbaum_szkola(d: QuantumDichotomy) -> ClassicalDichotomy:
    """Classical pair whose Renyi divergences equal the Petz divergences of ``d``."""
    P, Q = nussbaum_szkola_vectors(d)
    return ClassicalDichotomy.normalized(P, Q)


def maximal_simulation_vectors(d: QuantumDichotomy) -> tuple[np.ndarray, np.ndarray]:
    """Float pair ``p_k = t_k mu_k``, ``q_k = (1 - t_k) mu_k`` from ``T = w^{-1/2} rho w^{-1/2}``.

    Here ``w = rho + sigma``, ``t_k`` are the eigen-clusters of ``T`` and
    ``mu_k = tr[w P_k]``.
    """
    omega = d.rho + d.sigma
    om = hermitian_eig(omega)
    Wm = om.power(-0.5)
    T = hermitian_eig(hermitize(Wm @ d.rho @ Wm))
    p, q = [], []
    for t, P in zip(T.values, T.projectors):
        mu = float(np.real(np.vdot(P, omega)))
        if mu <= OVERLAP_CUTOFF:
            continue
        t = min(max(float(t), 0.0), 1.0)
        t = 0.0 if t < 1e-12 else (1.0 if t > 1 - 1e-12 else t)
        p.append(t * mu)
        q.append((1 - t) * mu)
    return np.array(p), np.array(q)


def maximal_simulation(d: QuantumDichotomy) -> ClassicalDichotomy:
    """Classical pair whose Renyi divergences equal the maximal divergences of ``d``."""
    p, q = maximal_simulation_vectors(d)
    return ClassicalDichotomy.normalized(p, q)


def d_infinity(d: QuantumDichotomy) -> float:
    """Max-divergence ``log lambda_max(sigma^{-1/2} rho sigma^{-1/2})``; ``inf`` without support inclusion."""
    if not d.support_ok:
        return math.inf
    Sm = d.sigma_eig.power(-0.5)
    return float(math.log(hermitian_eig(hermitize(Sm @ d.rho @ Sm)).vmax))


def gibbs_state(H, beta: float) -> np.ndarray:
    """Thermal state ``exp(-beta H) / Z`` (computed with the ground energy shifted out)."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    e = hermitian_eig(np.asarray(H, dtype=complex))
    w = np.exp(-beta * (e.eigenvalues - e.eigenvalues[-1]))
    G = (e.eigenvectors * (w / w.sum())) @ e.eigenvectors.conj().T
    return hermitize(G)


def log_partition(H, beta: float) -> float:
    """``log tr exp(-beta H)``."""
    w = hermitian_eig(np.asarray(H, dtype=complex)).eigenvalues
    e0 = w[-1]
    return float(-beta * e0 + np.log(np.sum(np.exp(-beta * (w - e0)))))


# ---------------------------------------------------------------------------
# Complex conjugation in the eigenbasis of sigma


def _fixed_phase_basis(e: SpectralDecomp) -> np.ndarray:
    V = e.eigenvectors.copy()
    for k in range(V.shape[1]):
        i = int(np.argmax(np.abs(V[:, k]) > np.max(np.abs(V[:, k])) - 1e-12))
        V[:, k] *= np.conj(V[i, k]) / abs(V[i, k])
    return V


def conjugate_in_sigma_basis(d: QuantumDichotomy) -> QuantumDichotomy:
    """Replace ``rho`` by its entrywise complex conjugate in an eigenbasis of ``sigma``.

    The eigenvectors are phase-fixed (first dominant entry real positive).  When
    ``sigma`` is degenerate the basis is not unique and an
    :class:`AmbiguousBasisWarning` is emitted.
    """
    e = d.sigma_eig
    if any(len(c) > 1 for c in e.clusters):
        warnings.warn("sigma is degenerate; conjugation basis is a deterministic choice",
                      AmbiguousBasisWarning, stacklevel=2)
    V = _fixed_phase_basis(e)
    rho_bar = V @ np.conj(V.conj().T @ d.rho @ V) @ V.conj().T
    return QuantumDichotomy(hermitize(rho_bar), d.sigma)


def phase_intertwiner(rho_a, rho_b, sigma, tol: float = 1e-9) -> np.ndarray | None:
    """Phases ``phi`` with ``U rho_a U^* = rho_b`` for ``U = diag(e^{i phi})`` in sigma's eigenbasis.

    Phases are propagated along a spanning forest of the graph of non-zero
    off-diagonal entries of ``rho_a`` and then checked on every entry; ``None``
    means no diagonal unitary exists.
    """
    e = hermitian_eig(np.asarray(sigma, dtype=complex))
    if any(len(c) > 1 for c in e.clusters):
        raise DegenerateSigma("sigma must have non-degenerate spectrum")
    V = _fixed_phase_basis(e)
    A = V.conj().T @ np.asarray(rho_a, dtype=complex) @ V
    B = V.conj().T @ np.asarray(rho_b, dtype=complex) @ V
    n = A.shape[0]
    phi = np.full(n, np.nan)
    for root in range(n):
        if not np.isnan(phi[root]):
            continue
        phi[root] = 0.0
        queue = deque([root])
        while queue:
            k = queue.popleft()
            for l in range(n):
                if l == k or not np.isnan(phi[l]) or abs(A[k, l]) <= tol:
                    continue
                if abs(B[k, l]) <= tol:
                    return None
                phi[l] = phi[k] - np.angle(B[k, l] / A[k, l])
                queue.append(l)
    U = np.exp(1j * phi)
    if np.max(np.abs(U[:, None] * A * U.conj()[None, :] - B)) > tol:
        return None
    return np.mod(phi, 2 * np.pi)


# ---------------------------------------------------------------------------
# Pure states


@dataclass
class ChannelPair:
    """Kraus representations of maps ``forward: d1 -> d2`` and ``backward: d2 -> d1``.

    ``residuals`` are the trace distances ``||T rho1 - rho2||_1``,
    ``||T sigma1 - sigma2||_1``, ``||R rho2 - rho1||_1``, ``||R sigma2 - sigma1||_1``.
    """

    forward: list
    backward: list
    residuals: tuple = ()

    @staticmethod
    def apply(kraus, X: np.ndarray) -> np.ndarray:
        return hermitize(sum(K @ X @ K.conj().T for K in kraus))

    @staticmethod
    def tp_defect(kraus) -> float:
        n = kraus[0].shape[1]
        return float(np.max(np.abs(sum(K.conj().T @ K for K in kraus) - np.eye(n))))


def _pure_vector(d: QuantumDichotomy) -> np.ndarray:
    e = d.rho_eig
    if e.vmax < 1 - 1e-9:
        raise NotPure(f"rho has largest eigenvalue {e.vmax:.12f} < 1")
    return e.eigenvectors[:, 0]


def pure_overlap_data(d: QuantumDichotomy, cutoff: float = 1e-10) -> list[tuple[float, float, np.ndarray]]:
    """``(u_i, v_i, e_i)`` over sigma's clusters: ``u_i = <psi|P_i|psi>``, ``e_i = P_i psi / sqrt(u_i)``."""
    psi = _pure_vector(d)
    vals, projs = _spectral_data(d.sigma_eig)
    out = []
    for v, P in zip(vals, projs):
        w = P @ psi
        u = float(np.real(np.vdot(w, w)))
        if u > cutoff:
            out.append((u, v, w / math.sqrt(u)))
    return out


def _block_channel(src, dst, n_in: int, n_out: int, fallback: np.ndarray, sigma_out: np.ndarray) -> list:
    """Kraus operators: isometry ``e_i -> e'_pi(i)`` plus measure-and-prepare on the complement."""
    K0 = sum(np.outer(f, e.conj()) for e, f in zip(src, dst))
    E = np.array(src).T
    F = np.array(dst).T
    Pi_in = E @ E.conj().T
    Pi_out = F @ F.conj().T
    comp_in = hermitian_eig(hermitize(np.eye(n_in) - Pi_in))
    G = comp_in.eigenvectors[:, comp_in.eigenvalues > 0.5]
    kraus = [K0]
    if G.shape[1] == 0:
        return kraus
    Cout = np.eye(n_out) - Pi_out
    tau = hermitize(Cout @ sigma_out @ Cout)
    mass = np.trace(tau).real
    tau = tau / mass if mass > 1e-12 else fallback
    te = hermitian_eig(tau)
    for t, f in zip(te.eigenvalues, te.eigenvectors.T):
        if t <= 1e-15:
            continue
        for g in G.T:
            kraus.append(math.sqrt(t) * np.outer(f, g.conj()))
    return kraus


def pure_state_channels(d1: QuantumDichotomy, d2: QuantumDichotomy, tol: float = 1e-8) -> ChannelPair | None:
    """Channels interconverting two dichotomies with pure ``rho``, or ``None`` if impossible.

    The pairs are interconvertible iff the multisets ``{(u_i, v_i)}`` of overlap
    weights and sigma-eigenvalues agree.  The forward map sends the normalised
    projections ``e_i`` of ``psi_1`` onto the matching ``e'_i`` of ``psi_2`` and
    prepares the normalised complement part of ``sigma_2`` on the rest.

    ``tol`` is the matching tolerance for the ``(u, v)`` data; the constructed
    channels must reproduce both targets to ``1e-8`` in trace norm or
    :class:`CertificationError` is raised.
    """
    a = pure_overlap_data(d1)
    b = pure_overlap_data(d2)
    if len(a) != len(b):
        return None
    used, pairs = set(), []
    for ua, va, ea in a:
        match = [j for j, (ub, vb, _) in enumerate(b)
                 if j not in used and abs(ua - ub) <= tol and abs(va - vb) <= tol]
        if not match:
            return None
        used.add(match[0])
        pairs.append((ea, b[match[0]][2]))
    src = [p[0] for p in pairs]
    dst = [p[1] for p in pairs]
    fwd = _block_channel(src, dst, d1.dim, d2.dim, d2.rho, d2.sigma)
    bwd = _block_channel(dst, src, d2.dim, d1.dim, d1.rho, d1.sigma)
    res = (
        trace_norm(ChannelPair.apply(fwd, d1.rho) - d2.rho),
        trace_norm(ChannelPair.apply(fwd, d1.sigma) - d2.sigma),
        trace_norm(ChannelPair.apply(bwd, d2.rho) - d1.rho),
        trace_norm(ChannelPair.apply(bwd, d2.sigma) - d1.sigma),
    )
    pair = ChannelPair(fwd, bwd, res)
    if max(res) > CERTIFY_TOL or max(ChannelPair.tp_defect(fwd), ChannelPair.tp_defect(bwd)) > 1e-9:
        raise CertificationError(f"constructed channels miss their targets (residuals {max(res):.3e})")
    return pair
