"""Laplace transforms of discrete measures and their inversion from samples.

For a classical dichotomy the power sum ``Q_alpha = sum p_i^alpha q_i^(1-alpha)``
is the Laplace transform of a discrete measure, so sampling ``D_alpha`` on any
small interval of ``alpha`` determines the minimal form.  Inversion is a Prony
(matrix pencil) fit.  It is exponentially ill-conditioned in the number of
atoms, so samples may be carried in extended precision (``mpmath``) and the fit
then runs at that precision.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp
import numpy as np

from .classical import ClassicalDichotomy, LorenzCurve, MinimalForm, lorenz_curve
from .errors import (
    InexactReconstructionWarning,
    InvalidSamples,
    LaplaceOverflowWarning,
    NegativeMass,
    NegativeWeight,
    RankAmbiguous,
    ResidualTooLarge,
)
from .measure import DiscreteMeasure

__all__ = [
    "DiscreteMeasure",
    "DivergenceSamples",
    "ConversionDecision",
    "laplace_transform",
    "recover_exponential_sum",
    "sample_divergences",
    "reconstruct_minimal_form",
    "decide_conversion_from_divergences",
]

DEFAULT_DPS = 50
SNAP_DENOMINATOR = 10**6
SNAP_WINDOW = 1e-9
BLOCK_CUTOFF = 1e-9


def _is_mp(x) -> bool:
    return isinstance(x, (mp.mpf, mp.mpc))


def laplace_transform(m: DiscreteMeasure, alpha):
    """``sum_j w_j exp(-alpha t_j)``; an atom at ``+inf`` counts only at ``alpha = 0``.

    Examples
    --------
    >>> laplace_transform(DiscreteMeasure(((0.0, 1.0),)), 3.7)
    1.0
    """
    use_mp = _is_mp(alpha) or any(_is_mp(w) or _is_mp(t) for t, w in m.atoms)
    total = mp.mpf(0) if use_mp else 0.0
    for t, w in m.atoms:
        if t == math.inf:
            if alpha == 0:
                total += w
            continue
        if use_mp:
            total += w * mp.exp(-alpha * t)
            continue
        expo = -alpha * t
        if expo > 709.0:
            warnings.warn("Laplace transform term overflows double range", LaplaceOverflowWarning, stacklevel=2)
            return math.inf
        total += w * math.exp(expo)
    return total


# ---------------------------------------------------------------------------
# Prony / matrix-pencil recovery


def _equispaced(alphas) -> tuple:
    a0 = alphas[0]
    step = alphas[1] - alphas[0]
    if step <= 0:
        raise InvalidSamples("alphas must be strictly increasing")
    for k, a in enumerate(alphas):
        if abs(a - (a0 + k * step)) > 1e-9 * max(1.0, abs(float(step))):
            raise InvalidSamples("alphas must be equispaced")
    return a0, step


def _rank(eigs, rank_tol, max_atoms):
    top = eigs[0]
    if top <= 0:
        raise ResidualTooLarge("Hankel matrix of the samples is not positive")
    rel = [e / top for e in eigs]
    r = sum(1 for x in rel if x > rank_tol)
    r = max(1, min(r, max_atoms))
    above = rel[r - 1]
    below = rel[r] if r < len(rel) else 0
    if above < 10 * rank_tol or abs(below) > rank_tol / 10:
        raise RankAmbiguous(
            f"no clear rank gap: relative eigenvalues {float(above):.3e} / {float(below):.3e} around threshold {rank_tol:.1e}"
        )
    return r


def _recover_double(alphas, values, max_atoms, rank_tol):
    a0, step = _equispaced(alphas)
    s = np.asarray(values, dtype=float)
    L = len(s) // 2
    H0 = np.array([[s[i + j] for j in range(L)] for i in range(L)])
    H1 = np.array([[s[i + j + 1] for j in range(L)] for i in range(L)])
    lam, W = np.linalg.eigh(H0)
    lam, W = lam[::-1], W[:, ::-1]
    r = _rank(list(lam), rank_tol, max_atoms)
    scale = W[:, :r] / np.sqrt(lam[:r])
    nodes = np.linalg.eigvalsh(scale.T @ H1 @ scale)
    if np.any(nodes <= 0):
        raise ResidualTooLarge("recovered a non-positive node")
    x = nodes ** (1.0 / step)
    A = np.array([[xj ** a for xj in x] for a in alphas])
    c = np.linalg.lstsq(A, s, rcond=None)[0]
    resid = float(np.max(np.abs(A @ c - s)))
    return [float(v) for v in x], [float(v) for v in c], resid, float(np.max(np.abs(s)))


def _recover_mp(alphas, values, max_atoms, rank_tol):
    a0, step = _equispaced(alphas)
    s = [mp.mpf(v) for v in values]
    L = len(s) // 2
    H0 = mp.matrix([[s[i + j] for j in range(L)] for i in range(L)])
    H1 = mp.matrix([[s[i + j + 1] for j in range(L)] for i in range(L)])
    lam, W = mp.eigsy(H0)
    order = sorted(range(L), key=lambda i: -lam[i])
    lam = [lam[i] for i in order]
    r = _rank(lam, rank_tol, max_atoms)
    S = mp.matrix(L, r)
    for j in range(r):
        f = 1 / mp.sqrt(lam[j])
        for i in range(L):
            S[i, j] = W[i, order[j]] * f
    nodes, _ = mp.eigsy(S.T * H1 * S)
    nodes = [nodes[i] for i in range(r)]
    if any(z <= 0 for z in nodes):
        raise ResidualTooLarge("recovered a non-positive node")
    x = [z ** (1 / mp.mpf(step)) for z in nodes]
    A = mp.matrix([[xj ** mp.mpf(a) for xj in x] for a in alphas])
    c, _ = mp.qr_solve(A, mp.matrix(s))
    c = [c[j] for j in range(r)]
    resid = max(abs(sum(A[k, j] * c[j] for j in range(r)) - s[k]) for k in range(len(s)))
    return x, c, resid, max(abs(v) for v in s)


def recover_exponential_sum(
    samples: Sequence[tuple],
    max_atoms: int | None = None,
    rank_tol: float | None = None,
    dps: int | None = None,
) -> DiscreteMeasure:
    """Fit ``Q(alpha) = sum_j c_j x_j^alpha`` with ``c_j, x_j > 0`` to equispaced samples.

    Parameters
    ----------
    samples : sequence of (alpha, Q) pairs
        At least two samples on an equispaced grid.
    max_atoms : int, optional
        Upper bound on the number of atoms; defaults to ``len(samples) // 2``.
    rank_tol : float, optional
        Relative eigenvalue threshold for the numerical rank of the Hankel
        matrix.  Defaults to ``1e-11`` in double precision and to
        ``10**(-dps/2)`` in extended precision.
    dps : int, optional
        Decimal digits of working precision.  When given, or when any sample is
        an ``mpmath.mpf``, the fit runs in ``mpmath``; otherwise in float64.

    Returns
    -------
    DiscreteMeasure
        Atoms ``(-log x_j, c_j)``.  Location and weight types follow the path
        taken (floats or ``mpf``).

    Raises
    ------
    RankAmbiguous
        No clear gap in the Hankel spectrum around ``rank_tol``.
    NegativeWeight
        A fitted weight is below ``-1e-8``.
    ResidualTooLarge
        The fit misses a sample by more than ``1e-8 * max|Q|``.
    """
    samples = sorted(samples, key=lambda s: s[0])
    if len(samples) < 2:
        raise InvalidSamples("need at least two samples")
    alphas = [a for a, _ in samples]
    values = [v for _, v in samples]
    L = len(samples) // 2
    max_atoms = L if max_atoms is None else min(max_atoms, L)
    if dps is None and any(_is_mp(v) or isinstance(v, str) for v in values):
        dps = max(mp.mp.dps, 30)
    if dps is None:
        x, c, resid, smax = _recover_double(alphas, values, max_atoms, 1e-11 if rank_tol is None else rank_tol)
        t = [-math.log(v) for v in x]
    else:
        with mp.workdps(dps):
            tol = 10.0 ** (-dps / 2) if rank_tol is None else rank_tol
            x, c, resid, smax = _recover_mp([mp.mpf(a) for a in alphas], values, max_atoms, tol)
            # logs must be taken at working precision: mpmath can lose all digits
            # when a high-precision argument is evaluated at a lower precision
            t = [-mp.log(v) for v in x]
    if resid > 1e-8 * smax:
        raise ResidualTooLarge(f"fit residual {float(resid):.3e} exceeds 1e-8 * max|Q|")
    atoms = []
    for tj, cj in zip(t, c):
        if cj < -1e-8:
            raise NegativeWeight(f"recovered weight {float(cj):.3e} < 0")
        if cj > 0:
            atoms.append((tj, cj))
    return DiscreteMeasure(tuple(atoms))


# ---------------------------------------------------------------------------
# Divergence samples and reconstruction of minimal forms


@dataclass(frozen=True)
class DivergenceSamples:
    """Renyi divergence values ``D_alpha`` on an equispaced grid inside ``(a, b)``.

    Values may be floats or ``mpmath.mpf`` numbers (``dps`` records the
    precision they were computed at; ``None`` for double precision).
    """

    interval: tuple
    alphas: tuple
    values: tuple
    dps: int | None = None

    def __post_init__(self):
        a, b = self.interval
        if not 0 < a < b < 1:
            raise InvalidSamples(f"interval ({a}, {b}) must lie inside (0, 1)")
        if len(self.alphas) != len(self.values):
            raise InvalidSamples("alphas and values differ in length")
        if len(self.alphas) < 2:
            raise InvalidSamples("need at least two samples")
        if any(not (a < x < b) for x in self.alphas):
            raise InvalidSamples("alphas must lie strictly inside the interval")
        if any(y <= x for x, y in zip(self.alphas, self.alphas[1:])):
            raise InvalidSamples("alphas must be strictly increasing")
        if any(not mp.isfinite(v) for v in self.values):
            raise InvalidSamples("divergence values must be finite")

    def q_samples(self) -> list[tuple]:
        if self.dps is None:
            return [(float(a), math.exp((float(a) - 1) * float(v))) for a, v in zip(self.alphas, self.values)]
        with mp.workdps(self.dps):
            return [(mp.mpf(a), +mp.exp((mp.mpf(a) - 1) * mp.mpf(v))) for a, v in zip(self.alphas, self.values)]

    def to_json(self) -> dict:
        if self.dps is None:
            return {"interval": list(self.interval), "alphas": [float(a) for a in self.alphas],
                    "values": [float(v) for v in self.values]}
        with mp.workdps(self.dps):
            return {"interval": list(self.interval),
                    "alphas": [mp.nstr(mp.mpf(a), self.dps + 5) for a in self.alphas],
                    "values": [mp.nstr(mp.mpf(v), self.dps + 5) for v in self.values],
                    "dps": self.dps}

    @classmethod
    def from_json(cls, obj: dict) -> "DivergenceSamples":
        try:
            interval = tuple(float(x) for x in obj["interval"])
            alphas, values = obj["alphas"], obj["values"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSamples(f"malformed sample set: {exc}") from exc
        dps = obj.get("dps")
        if dps is None and any(isinstance(v, str) for v in list(alphas) + list(values)):
            dps = DEFAULT_DPS
        if dps is None:
            return cls(interval, tuple(float(a) for a in alphas), tuple(float(v) for v in values))
        with mp.workdps(int(dps)):
            return cls(interval, tuple(mp.mpf(a) for a in alphas), tuple(mp.mpf(v) for v in values), int(dps))


def sample_divergences(
    d: ClassicalDichotomy,
    interval: tuple = (0.05, 0.95),
    count: int | None = None,
    dps: int | None = DEFAULT_DPS,
) -> DivergenceSamples:
    """Evaluate ``D_alpha(d)`` at ``count`` equispaced points inside ``interval``.

    The grid is ``a + k (b - a) / (count + 1)`` for ``k = 1..count``; ``count``
    defaults to ``2 n + 4``.  With ``dps`` set the values are exact to that many
    digits (computed from the rational entries); with ``dps=None`` they are floats.
    """
    a, b = interval
    K = 2 * d.n + 4 if count is None else count
    pairs = [(p, q) for p, q in zip(d.p, d.q) if p > 0 and q > 0]
    if not pairs:
        raise InvalidSamples("p and q are orthogonal; all divergences are infinite")
    prec = DEFAULT_DPS if dps is None else dps
    with mp.workdps(prec + 10):
        lp = [mp.log(mp.mpf(p.numerator) / p.denominator) for p, _ in pairs]
        lq = [mp.log(mp.mpf(q.numerator) / q.denominator) for _, q in pairs]
        step = (mp.mpf(b) - mp.mpf(a)) / (K + 1)
        alphas = [mp.mpf(a) + (k + 1) * step for k in range(K)]
        values = []
        for al in alphas:
            Q = mp.fsum(mp.exp(al * x + (1 - al) * y) for x, y in zip(lp, lq))
            values.append(mp.log(Q) / (al - 1))
    if dps is None:
        return DivergenceSamples((a, b), tuple(float(x) for x in alphas), tuple(float(v) for v in values))
    with mp.workdps(dps):
        return DivergenceSamples((a, b), tuple(+x for x in alphas), tuple(+v for v in values), dps)


def _snap(values) -> tuple[list, bool]:
    snapped, exact = [], True
    for v in values:
        f = Fraction(float(v)).limit_denominator(SNAP_DENOMINATOR)
        if abs(float(v) - f) <= SNAP_WINDOW:
            snapped.append(f)
        else:
            exact = False
            snapped.append(float(v))
    return snapped, exact


def reconstruct_minimal_form(s: DivergenceSamples, max_atoms: int | None = None,
                             rank_tol: float | None = None) -> MinimalForm:
    """Recover the minimal form ``(p_tilde, q_tilde)`` from divergence samples.

    The fit of ``Q_alpha`` yields the likelihood ratios ``r_j`` as nodes and the
    masses ``q_tilde_j`` as weights; then ``p_tilde_j = r_j q_tilde_j``.  The block
    of infinite ratio gets ``p`` mass ``1 - sum_j p_tilde_j`` and the block of
    ratio zero gets ``q`` mass ``1 - sum_j q_tilde_j``; deficits below ``1e-9``
    are treated as absent blocks.

    Masses within ``1e-9`` of a fraction with denominator at most ``10**6`` are
    snapped to it.  If every mass snaps and the vectors sum to one exactly the
    result is exact; otherwise the masses are floats and ``exact`` is False.
    """
    measure = recover_exponential_sum(s.q_samples(), max_atoms=max_atoms, rank_tol=rank_tol, dps=s.dps)
    finite = sorted(measure.atoms, key=lambda a: a[0])
    with mp.workdps(s.dps or mp.mp.dps):
        ratios = [mp.exp(-t) if _is_mp(t) else math.exp(-t) for t, _ in finite]
        q_t = [w for _, w in finite]
        p_t = [r * w for r, w in zip(ratios, q_t)]
        p_inf = 1 - sum(p_t)
        q_zero = 1 - sum(q_t)
    for name, mass in (("infinite-ratio p", p_inf), ("zero-ratio q", q_zero)):
        if mass < -1e-8:
            raise NegativeMass(f"{name} block has mass {float(mass):.3e}")
    if p_inf > BLOCK_CUTOFF:
        p_t.insert(0, p_inf)
        q_t.insert(0, 0)
    if q_zero > BLOCK_CUTOFF:
        p_t.append(0)
        q_t.append(q_zero)
    with mp.workdps(s.dps or mp.mp.dps):
        sp, sq = sum(p_t), sum(q_t)
        p_t = [x / sp for x in p_t]
        q_t = [x / sq for x in q_t]
    ps, exact_p = _snap(p_t)
    qs, exact_q = _snap(q_t)
    m = len(ps)
    exact = exact_p and exact_q and sum(ps) == 1 and sum(qs) == 1
    if exact:
        rat = tuple(math.inf if q == 0 else p / q for p, q in zip(ps, qs))
        return MinimalForm(tuple(ps), tuple(qs), tuple((j,) for j in range(m)), rat, tuple(range(m)))
    warnings.warn("reconstructed masses are not small-denominator rationals", InexactReconstructionWarning,
                  stacklevel=2)
    pf = tuple(float(x) for x in p_t)
    qf = tuple(float(x) for x in q_t)
    rat = tuple(math.inf if q == 0 else p / q for p, q in zip(pf, qf))
    return MinimalForm(pf, qf, tuple((j,) for j in range(m)), rat, tuple(range(m)), exact=False)


def _float_lorenz(mf: MinimalForm) -> LorenzCurve:
    x = y = Fraction(0)
    pts = [(x, y)]
    for p, q in zip(mf.p_tilde, mf.q_tilde):
        x = min(x + Fraction(q), Fraction(1))
        y = min(y + Fraction(p), Fraction(1))
        pts.append((x, y))
    pts[-1] = (Fraction(1), Fraction(1))
    return LorenzCurve(tuple(pts))


def _dominates(L1: LorenzCurve, L2: LorenzCurve, tol) -> bool:
    xs = sorted({x for x in L1.xs + L2.xs if 0 <= x <= 1})
    return all(L1(x) >= L2(x) - tol for x in xs)


@dataclass(frozen=True)
class ConversionDecision:
    convertible_1_to_2: bool
    convertible_2_to_1: bool
    interconvertible: bool
    minimal_forms: tuple = ()


def decide_conversion_from_divergences(s1: DivergenceSamples, s2: DivergenceSamples,
                                       tol: float = 1e-6) -> ConversionDecision:
    """Decide convertibility between two dichotomies known only through divergence samples.

    Both minimal forms are reconstructed and their Lorenz curves compared.  The
    comparison is exact when both reconstructions are exact and otherwise allows
    slack ``tol``; interconvertibility then means equal minimal forms within ``tol``.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InexactReconstructionWarning)
        mf1 = reconstruct_minimal_form(s1)
        mf2 = reconstruct_minimal_form(s2)
    if mf1.exact and mf2.exact:
        d1, d2 = mf1.as_dichotomy(), mf2.as_dichotomy()
        L1, L2 = lorenz_curve(d1), lorenz_curve(d2)
        slack = 0
    else:
        L1, L2 = _float_lorenz(mf1), _float_lorenz(mf2)
        slack = Fraction(tol)
    a = _dominates(L1, L2, slack)
    b = _dominates(L2, L1, slack)
    if mf1.exact and mf2.exact:
        inter = (mf1.p_tilde, mf1.q_tilde) == (mf2.p_tilde, mf2.q_tilde)
    else:
        inter = mf1.m == mf2.m and all(
            abs(float(x) - float(y)) <= tol
            for x, y in zip(mf1.p_tilde + mf1.q_tilde, mf2.p_tilde + mf2.q_tilde))
    return ConversionDecision(a, b, inter and a and b, (mf1, mf2))
