"""Quantum Renyi divergence families.

Each family is evaluated through ``log Q_alpha`` with
``D_alpha = log Q_alpha / (alpha - 1)``; ``alpha = 1`` always uses the analytic
limit (Umegaki relative entropy, or Belavkin-Staszewski for the maximal family).
Pseudo-inverse conventions apply on the support of ``sigma``; a family whose
formula requires ``supp rho <= supp sigma`` returns ``+inf`` when it fails.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .classical import ClassicalDichotomy, renyi_vectors
from .errors import AlphaOutOfRange, DimTooLarge, InvalidAlpha, InvalidZ, SupportMismatchWarning
from .linops import hermitian_eig, hermitize
from .qdichotomy import QuantumDichotomy, commuting_reduction, d_infinity

FAMILY_TAGS = ("classical", "petz", "sandwiched", "maximal", "alpha-z", "log-euclidean", "measured")


@dataclass(frozen=True)
class Family:
    """A Renyi divergence family; ``z`` parametrises alpha-z, ``restarts``/``seed`` the measured search."""

    tag: str
    z: float | None = None
    restarts: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.tag not in FAMILY_TAGS:
            raise ValueError(f"unknown family {self.tag!r}")
        if self.tag == "alpha-z" and (self.z is None or not self.z > 0):
            raise InvalidZ(f"alpha-z needs z > 0, got {self.z}")
        if self.tag == "measured" and self.restarts < 1:
            raise ValueError("measured family needs restarts >= 1")

    @classmethod
    def parse(cls, text: str) -> "Family":
        """Parse ``"petz"``, ``"alpha-z:<z>"``, ``"measured:<restarts>:<seed>"`` and friends."""
        parts = text.strip().split(":")
        tag = parts[0]
        try:
            if tag == "alpha-z":
                if len(parts) != 2:
                    raise ValueError
                return cls(tag, z=float(parts[1]))
            if tag == "measured":
                if len(parts) == 1:
                    return cls(tag)
                if len(parts) != 3:
                    raise ValueError
                return cls(tag, restarts=int(parts[1]), seed=int(parts[2]))
        except ValueError:
            raise ValueError(f"malformed family selector {text!r}") from None
        if len(parts) != 1:
            raise ValueError(f"malformed family selector {text!r}")
        return cls(tag)

    def __str__(self) -> str:
        if self.tag == "alpha-z":
            return f"alpha-z:{self.z:g}"
        if self.tag == "measured":
            return f"measured:{self.restarts}:{self.seed}"
        return self.tag


CLASSICAL = Family("classical")
PETZ = Family("petz")
SANDWICHED = Family("sandwiched")
MAXIMAL = Family("maximal")
LOG_EUCLIDEAN = Family("log-euclidean")


@dataclass(frozen=True)
class DivergenceValue:
    """A divergence together with its provenance.

    ``dpi_valid`` tells whether ``alpha`` lies in the family's data-processing
    range; ``limit_used`` names the analytic limit used at ``alpha = 1`` or ``inf``;
    ``lower_bound`` marks values from a numerical optimisation.
    """

    value: float
    alpha: float
    family: Family
    dpi_valid: bool
    limit_used: str | None = None
    lower_bound: bool = False
    flags: tuple = field(default=())

    def __float__(self) -> float:
        return float(self.value)


def alpha_z_dpi_region(alpha: float, z: float) -> bool:
    """Whether the alpha-z divergence satisfies data processing under channels."""
    if alpha == 1:
        return True
    if 0 < alpha < 1:
        return z >= max(alpha, 1 - alpha)
    if 1 < alpha <= 2:
        return alpha / 2 <= z <= alpha
    if alpha > 2:
        return alpha - 1 <= z <= alpha
    return False


def dpi_range(family: Family, alpha: float) -> bool:
    tag = family.tag
    if tag in ("classical", "measured"):
        return alpha >= 0
    if tag in ("petz", "maximal"):
        return 0 <= alpha <= 2
    if tag == "sandwiched":
        return alpha >= 0.5
    if tag == "log-euclidean":
        return 0 <= alpha <= 1
    return alpha_z_dpi_region(alpha, family.z)


def _from_log_q(log_q: float, alpha: float) -> float:
    if math.isinf(log_q):
        if log_q > 0:
            return math.inf if alpha > 1 else -math.inf
        return math.inf if alpha < 1 else -math.inf
    return log_q / (alpha - 1)


def _tr_prod(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.real(np.sum(A * B.T)))


# ---------------------------------------------------------------------------
# log Q for each family


def log_q_petz(d: QuantumDichotomy, alpha: float) -> float:
    """``log tr[rho^alpha sigma^(1-alpha)]`` (pseudo-inverse powers)."""
    if alpha > 1 and not d.support_ok:
        return math.inf
    Q = _tr_prod(d.rho_eig.power(alpha), d.sigma_eig.power(1 - alpha))
    return math.log(Q) if Q > 0 else -math.inf


def _graded_logtrace_power(d: QuantumDichotomy, middle: np.ndarray, t: float, power: float) -> float:
    """``log tr[(sigma^t middle sigma^t)^power]`` over the support of ``sigma``.

    Works in the eigenbasis of sigma, where ``diag(v^t) M diag(v^t)`` is a graded
    matrix whose spectrum Jacobi resolves to high relative accuracy even when
    ``v^t`` spans many orders of magnitude.  The rank is read off the
    well-conditioned factor ``M``, never from a threshold on the graded product.
    """
    e = d.sigma_eig
    keep = e.support_mask()
    U = e.eigenvectors[:, keep]
    mid = hermitize(U.conj().T @ middle @ U)
    rank = hermitian_eig(mid).support_rank
    if rank == 0:
        return -math.inf
    scale = e.eigenvalues[keep] ** t
    w = hermitian_eig(hermitize(scale[:, None] * mid * scale[None, :])).eigenvalues[:rank]
    w = w[w > 0]
    return float(logsumexp(power * np.log(w))) if len(w) else -math.inf


def log_q_sandwiched(d: QuantumDichotomy, alpha: float) -> float:
    """``log tr[(sigma^((1-alpha)/2alpha) rho sigma^((1-alpha)/2alpha))^alpha]``.

    A pure ``rho = |psi><psi|`` uses ``Q = (sum_i u_i v_i^((1-alpha)/alpha))^alpha``
    with ``u_i = <psi|P_i|psi>`` over the eigenprojectors ``P_i`` of ``sigma``.
    """
    if alpha > 1 and not d.support_ok:
        return math.inf
    s = (1 - alpha) / alpha
    if d.is_pure(1e-12):
        psi = d.rho_eig.eigenvectors[:, 0]
        e = d.sigma_eig
        cut = e.cutoff()
        terms = [(float(np.real(np.vdot(psi, P @ psi))), v) for v, P in zip(e.values, e.projectors) if v > cut]
        logs = [math.log(u) + s * math.log(v) for u, v in terms if u > 0]
        return alpha * float(logsumexp(logs)) if logs else -math.inf
    return _graded_logtrace_power(d, d.rho, s / 2, alpha)


def log_q_maximal(d: QuantumDichotomy, alpha: float) -> float:
    """``log tr[sigma (sigma^(-1/2) rho sigma^(-1/2))^alpha]``."""
    if not d.support_ok:
        if alpha > 1:
            return math.inf
        return _log_q_perspective(d, alpha)
    Sm = d.sigma_eig.power(-0.5)
    T = hermitian_eig(hermitize(Sm @ d.rho @ Sm))
    Q = _tr_prod(d.sigma, T.power(alpha))
    return math.log(Q) if Q > 0 else -math.inf


def _log_q_perspective(d: QuantumDichotomy, alpha: float) -> float:
    # tr[w f(T)] with w = rho + sigma, T = w^{-1/2} rho w^{-1/2}, f(t) = t^a (1-t)^(1-a)
    omega = d.rho + d.sigma
    Wm = hermitian_eig(omega).power(-0.5)
    T = hermitian_eig(hermitize(Wm @ d.rho @ Wm))
    t = np.clip(T.eigenvalues, 0, 1)
    mu = np.real(np.einsum("ij,ik,kj->j", T.eigenvectors.conj(), omega, T.eigenvectors))
    keep = (t > 1e-12) & (t < 1 - 1e-12) & (mu > 1e-14)
    if not np.any(keep):
        return -math.inf
    return float(logsumexp(np.log(mu[keep]) + alpha * np.log(t[keep]) + (1 - alpha) * np.log1p(-t[keep])))


def log_q_alpha_z(d: QuantumDichotomy, alpha: float, z: float) -> float:
    """``log tr[(sigma^((1-alpha)/2z) rho^(alpha/z) sigma^((1-alpha)/2z))^z]``."""
    if alpha > 1 and not d.support_ok:
        return math.inf
    return _graded_logtrace_power(d, d.rho_eig.power(alpha / z), (1 - alpha) / (2 * z), z)


def _common_support(d: QuantumDichotomy) -> tuple[np.ndarray, bool]:
    Pr = d.rho_eig.support_projector()
    Ps = d.sigma_eig.support_projector()
    e = hermitian_eig(hermitize(Pr + Ps))
    B = e.eigenvectors[:, e.eigenvalues > 1.5]
    mismatch = B.shape[1] != d.rho_eig.support_rank or B.shape[1] != d.sigma_eig.support_rank
    return B, mismatch


def log_q_log_euclidean(d: QuantumDichotomy, alpha: float) -> tuple[float, bool]:
    """``log tr exp(alpha log rho + (1-alpha) log sigma)`` on the common support.

    Returns the value and whether the supports of ``rho`` and ``sigma`` differ.
    """
    if alpha > 1 and not d.support_ok:
        return math.inf, True
    B, mismatch = _common_support(d)
    if B.shape[1] == 0:
        return -math.inf, True
    Lr = hermitian_eig(hermitize(B.conj().T @ d.rho @ B)).log()
    Ls = hermitian_eig(hermitize(B.conj().T @ d.sigma @ B)).log()
    w = hermitian_eig(hermitize(alpha * Lr + (1 - alpha) * Ls)).eigenvalues
    return float(logsumexp(w)), mismatch


# ---------------------------------------------------------------------------
# Relative entropies


def umegaki(d: QuantumDichotomy) -> float:
    """``tr[rho (log rho - log sigma)]``; ``inf`` unless ``supp rho <= supp sigma``."""
    if not d.support_ok:
        return math.inf
    e = d.rho_eig
    w = e.eigenvalues[e.support_mask()]
    ent = float(np.sum(w * np.log(w)))
    return ent - _tr_prod(d.rho, d.sigma_eig.log())


def bs_entropy(d: QuantumDichotomy) -> float:
    """Belavkin-Staszewski entropy ``tr[rho log(rho^(1/2) sigma^(-1) rho^(1/2))]``."""
    if not d.support_ok:
        return math.inf
    R = d.rho_eig.power(0.5)
    X = hermitian_eig(hermitize(R @ d.sigma_eig.power(-1) @ R))
    return _tr_prod(d.rho, X.log())


# ---------------------------------------------------------------------------
# Public divergences


def _check_alpha(alpha: float, lo: float, hi: float, name: str) -> None:
    if not (lo <= alpha <= hi):
        raise AlphaOutOfRange(f"{name}: alpha = {alpha} outside [{lo}, {hi}]")


def petz(d: QuantumDichotomy, alpha: float) -> DivergenceValue:
    """Petz divergence ``(alpha-1)^{-1} log tr[rho^alpha sigma^(1-alpha)]`` for ``alpha`` in ``[0, 2]``."""
    _check_alpha(alpha, 0, 2, "petz")
    if alpha == 1:
        return DivergenceValue(umegaki(d), alpha, PETZ, True, "umegaki")
    return DivergenceValue(_from_log_q(log_q_petz(d, alpha), alpha), alpha, PETZ, True)


def sandwiched(d: QuantumDichotomy, alpha: float) -> DivergenceValue:
    """Sandwiched (minimal) divergence for ``alpha >= 1/2``; ``alpha = inf`` gives ``D_max``."""
    _check_alpha(alpha, 0.5, math.inf, "sandwiched")
    if alpha == 1:
        return DivergenceValue(umegaki(d), alpha, SANDWICHED, True, "umegaki")
    if alpha == math.inf:
        return DivergenceValue(d_infinity(d), alpha, SANDWICHED, True, "d_infinity")
    return DivergenceValue(_from_log_q(log_q_sandwiched(d, alpha), alpha), alpha, SANDWICHED, True)


def maximal(d: QuantumDichotomy, alpha: float) -> DivergenceValue:
    """Maximal (geometric) divergence for ``alpha`` in ``[0, 2]``; ``alpha = 1`` is the BS entropy."""
    _check_alpha(alpha, 0, 2, "maximal")
    if alpha == 1:
        return DivergenceValue(bs_entropy(d), alpha, MAXIMAL, True, "bs_entropy")
    return DivergenceValue(_from_log_q(log_q_maximal(d, alpha), alpha), alpha, MAXIMAL, True)


def alpha_z(d: QuantumDichotomy, alpha: float, z: float) -> DivergenceValue:
    """alpha-z divergence; ``dpi_valid`` reports the data-processing region."""
    if not z > 0:
        raise InvalidZ(f"z must be positive, got {z}")
    if not alpha >= 0:
        raise InvalidAlpha(f"alpha must be >= 0, got {alpha}")
    fam = Family("alpha-z", z=z)
    if alpha == 1:
        return DivergenceValue(umegaki(d), alpha, fam, True, "umegaki")
    val = _from_log_q(log_q_alpha_z(d, alpha, z), alpha)
    return DivergenceValue(val, alpha, fam, alpha_z_dpi_region(alpha, z))


def log_euclidean(d: QuantumDichotomy, alpha: float) -> DivergenceValue:
    """Log-Euclidean divergence for ``alpha`` in ``[0, 2]`` (data processing only on ``[0, 1]``)."""
    _check_alpha(alpha, 0, 2, "log-euclidean")
    if alpha == 1:
        return DivergenceValue(umegaki(d), alpha, LOG_EUCLIDEAN, True, "umegaki")
    lq, mismatch = log_q_log_euclidean(d, alpha)
    flags = ()
    if mismatch:
        warnings.warn("supports of rho and sigma differ; using their intersection",
                      SupportMismatchWarning, stacklevel=2)
        flags = ("support_mismatch",)
    return DivergenceValue(_from_log_q(lq, alpha), alpha, LOG_EUCLIDEAN, alpha <= 1, flags=flags)


MEASURED_MAX_DIM = 4


def _offdiag_hermitian(x: np.ndarray, n: int, iu: tuple) -> np.ndarray:
    """Hermitian matrix with zero diagonal; column phases of the basis are irrelevant."""
    k = len(iu[0])
    H = np.zeros((n, n), dtype=complex)
    H[iu] = x[:k] + 1j * x[k:]
    return H + H.conj().T


def _outcome_divergence(p: np.ndarray, q: np.ndarray, alpha: float) -> float:
    """Classical Renyi divergence of measured outcome vectors (no warnings, lean)."""
    both = (p > 0) & (q > 0)
    if alpha >= 1 and np.any((p > 0) & (q <= 0)):
        return math.inf
    if not np.any(both):
        return math.inf
    pb, qb = p[both], q[both]
    if alpha == 1:
        return float(np.sum(pb * (np.log(pb) - np.log(qb))))
    Q = float(np.sum(pb ** alpha * qb ** (1 - alpha)))
    return math.log(Q) / (alpha - 1)


def measured(d: QuantumDichotomy, alpha: float, family: Family | None = None) -> DivergenceValue:
    """Lower bound on the measured divergence by optimising rank-one projective measurements.

    The measurement basis is ``V exp(iH)`` with ``H`` Hermitian and zero on the
    diagonal, searched by BFGS (finite-difference gradients) from the eigenbases of ``sigma`` and
    ``rho`` and from ``family.restarts`` Haar-random bases drawn with
    ``family.seed``.
    """
    family = Family("measured") if family is None else family
    if not alpha > 0:
        raise InvalidAlpha(f"measured divergence needs alpha > 0, got {alpha}")
    n = d.dim
    if n > MEASURED_MAX_DIM:
        raise DimTooLarge(f"measured divergence supports dim <= {MEASURED_MAX_DIM}, got {n}")
    if alpha > 1 and not d.support_ok:
        return DivergenceValue(math.inf, alpha, family, True, lower_bound=True)
    rho, sigma = d.rho, d.sigma

    def value(U: np.ndarray) -> float:
        p = np.clip(np.real(np.sum(U.conj() * (rho @ U), axis=0)), 0, None)
        q = np.clip(np.real(np.sum(U.conj() * (sigma @ U), axis=0)), 0, None)
        return _outcome_divergence(p, q, alpha)

    from .ensembles import haar_unitary

    rng = np.random.default_rng(family.seed)
    starts = [d.sigma_eig.eigenvectors, d.rho_eig.eigenvectors]
    starts += [haar_unitary(rng, n) for _ in range(family.restarts)]
    best = max(value(V) for V in starts)
    if n > 1:
        iu = np.triu_indices(n, 1)
        for V in starts:
            def objective(x, V=V):
                w, W = np.linalg.eigh(_offdiag_hermitian(x, n, iu))
                v = value(V @ ((W * np.exp(1j * w)) @ W.conj().T))
                return -v if math.isfinite(v) else 1e300
            res = minimize(objective, np.zeros(n * (n - 1)), method="BFGS", options={"gtol": 1e-11})
            if res.fun < 1e300:
                best = max(best, -float(res.fun))
    limit = "measured_relative_entropy" if alpha == 1 else None
    return DivergenceValue(best, alpha, family, True, limit, lower_bound=True)


def divergence(d, family: Family | str, alpha: float) -> DivergenceValue:
    """Evaluate any family; ``d`` may be a :class:`ClassicalDichotomy` for the classical family."""
    if isinstance(family, str):
        family = Family.parse(family)
    tag = family.tag
    if tag == "classical":
        if isinstance(d, QuantumDichotomy):
            d = commuting_reduction(d)
        limit = "kl" if alpha == 1 else None
        p, q = d.as_arrays()
        return DivergenceValue(renyi_vectors(p, q, alpha), alpha, family, alpha >= 0, limit)
    if isinstance(d, ClassicalDichotomy):
        d = QuantumDichotomy.from_classical(d)
    if tag == "petz":
        return petz(d, alpha)
    if tag == "sandwiched":
        return sandwiched(d, alpha)
    if tag == "maximal":
        return maximal(d, alpha)
    if tag == "alpha-z":
        return alpha_z(d, alpha, family.z)
    if tag == "log-euclidean":
        return log_euclidean(d, alpha)
    return measured(d, alpha, family)


def log_q(d: QuantumDichotomy, family: Family | str, alpha: float) -> float:
    """``log Q_alpha`` of a family, defined through ``alpha = 1`` where ``Q_1 = 1``."""
    if isinstance(family, str):
        family = Family.parse(family)
    tag = family.tag
    if tag == "classical":
        from .classical import log_q_alpha
        c = commuting_reduction(d) if isinstance(d, QuantumDichotomy) else d
        return log_q_alpha(*c.as_arrays(), alpha)
    if tag == "petz":
        return log_q_petz(d, alpha)
    if tag == "sandwiched":
        return log_q_sandwiched(d, alpha)
    if tag == "maximal":
        return log_q_maximal(d, alpha)
    if tag == "alpha-z":
        return log_q_alpha_z(d, alpha, family.z)
    if tag == "log-euclidean":
        return log_q_log_euclidean(d, alpha)[0]
    raise ValueError(f"log Q is not available for the {tag} family")
