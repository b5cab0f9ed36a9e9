"""Random dichotomies, states and channels for tests and demonstrations."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .classical import ClassicalDichotomy


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_simplex_rational(rng, n: int, denominator: int = 60, allow_zero: bool = True) -> tuple:
    """Random probability vector with entries ``k / denominator``."""
    rng = _rng(rng)
    lo = 0 if allow_zero else 1
    while True:
        cuts = np.sort(rng.integers(0, denominator + 1, size=n - 1))
        parts = np.diff(np.concatenate([[0], cuts, [denominator]]))
        if parts.min() >= lo:
            return tuple(Fraction(int(k), denominator) for k in parts)


def random_classical_dichotomy(rng, n: int, denominator: int = 60, zero_prob: float = 0.2) -> ClassicalDichotomy:
    """Random rational dichotomy of length ``n``; entries vanish with probability ``zero_prob``."""
    rng = _rng(rng)
    while True:
        p = list(random_simplex_rational(rng, n, denominator, allow_zero=False))
        q = list(random_simplex_rational(rng, n, denominator, allow_zero=False))
        for v in (p, q):
            for i in range(n):
                if rng.random() < zero_prob:
                    v[i] = Fraction(0)
        if sum(p) == 0 or sum(q) == 0:
            continue
        p = [x / sum(p) for x in p]
        q = [x / sum(q) for x in q]
        if any(a != 0 or b != 0 for a, b in zip(p, q)):
            return ClassicalDichotomy(tuple(p), tuple(q))


def split_outcomes(rng, d: ClassicalDichotomy, extra: int) -> ClassicalDichotomy:
    """Refine ``d`` by splitting random outcomes proportionally, then shuffle.

    The result has the same minimal form as ``d``.
    """
    rng = _rng(rng)
    p, q = list(d.p), list(d.q)
    for _ in range(extra):
        i = int(rng.integers(len(p)))
        f = Fraction(int(rng.integers(1, 8)), 8)
        p.append(p[i] * f)
        q.append(q[i] * f)
        p[i] -= p[-1]
        q[i] -= q[-1]
    order = rng.permutation(len(p))
    return ClassicalDichotomy(tuple(p[i] for i in order), tuple(q[i] for i in order))


def random_conditioned_dichotomy(rng, m_max: int = 5, separation: float = 1.2, spread: float = 8.0,
                                 special_prob: float = 0.3, extra: int = 2, denominator: int = 48) -> ClassicalDichotomy:
    """Random dichotomy whose minimal form has at most ``m_max`` outcomes.

    Finite positive likelihood ratios are at least ``separation`` apart
    multiplicatively and lie within ``[1/spread, spread]``; blocks of infinite and
    zero ratio each appear with probability ``special_prob``.  Outcomes are then
    split and shuffled so the input is not already minimal.
    """
    rng = _rng(rng)
    has_inf = rng.random() < special_prob
    has_zero = rng.random() < special_prob
    k_max = m_max - int(has_inf) - int(has_zero)
    k = int(rng.integers(1, k_max + 1))
    logsep = np.log(separation)
    while True:
        logs = np.sort(rng.uniform(-np.log(spread), np.log(spread), size=k))
        if k == 1 or np.min(np.diff(logs)) >= logsep * 1.001:
            break
    ratios = [Fraction(float(np.exp(x))).limit_denominator(64) for x in logs]
    ratios = sorted(set(ratios), reverse=True)
    if any(a / b < Fraction(separation) for a, b in zip(ratios, ratios[1:])):
        return random_conditioned_dichotomy(rng, m_max, separation, spread, special_prob, extra, denominator)
    k = len(ratios)
    q = list(random_simplex_rational(rng, k + int(has_zero), denominator, allow_zero=False))
    q_zero = q.pop() if has_zero else Fraction(0)
    p = [r * w for r, w in zip(ratios, q)]
    total = sum(p)
    if has_inf:
        shrink = Fraction(int(rng.integers(2, 8)), 8)
        if total > shrink:
            p = [x * shrink / total for x in p]
            q_scale = shrink / total
            ratios = [r * q_scale for r in ratios]
        p_inf = 1 - sum(p)
        p.insert(0, p_inf)
        q.insert(0, Fraction(0))
    else:
        p = [x / total for x in p]
    if has_zero:
        p.append(Fraction(0))
        q.append(q_zero)
    d = ClassicalDichotomy(tuple(p), tuple(q))
    return split_outcomes(rng, d, extra)


# ---------------------------------------------------------------------------
# Quantum ensembles


def haar_unitary(rng, n: int) -> np.ndarray:
    rng = _rng(rng)
    Z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_density_matrix(rng, n: int, rank: int | None = None) -> np.ndarray:
    """Random density matrix from the induced (Hilbert-Schmidt type) measure."""
    rng = _rng(rng)
    k = n if rank is None else rank
    G = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    rho = G @ G.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_pure_state(rng, n: int) -> np.ndarray:
    rng = _rng(rng)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_kraus_channel(rng, n_in: int, n_out: int | None = None, n_kraus: int = 2) -> list[np.ndarray]:
    """Kraus operators of a random channel (isometry into environment, then truncation)."""
    rng = _rng(rng)
    n_out = n_in if n_out is None else n_out
    n_kraus = max(n_kraus, -(-n_in // n_out))  # the stacked operators must form an isometry
    G = rng.normal(size=(n_kraus * n_out, n_in)) + 1j * rng.normal(size=(n_kraus * n_out, n_in))
    Q, _ = np.linalg.qr(G)
    return [Q[k * n_out:(k + 1) * n_out, :] for k in range(n_kraus)]


def apply_kraus(kraus, rho: np.ndarray) -> np.ndarray:
    out = sum(K @ rho @ K.conj().T for K in kraus)
    return (out + out.conj().T) / 2
