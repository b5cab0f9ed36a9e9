"""Classical dichotomies in exact rational arithmetic.

A dichotomy is a pair ``(p, q)`` of probability vectors of equal length.  Two
dichotomies are interconvertible by stochastic maps iff their minimal forms
coincide; the minimal form sorts the likelihood ratios ``p_i / q_i`` in
decreasing order and merges runs of equal ratio into single outcomes.

Indices are 0-based throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DegenerateBlock, InvalidAlpha, InvalidDichotomy, OrthogonalPairWarning
from .measure import DiscreteMeasure


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise InvalidDichotomy(f"non-finite entry {x!r}")
        return Fraction(float(x))
    raise InvalidDichotomy(f"cannot interpret {x!r} as a rational number")


@dataclass(frozen=True)
class ClassicalDichotomy:
    """Pair of exact probability vectors.

    Entries may be given as ``Fraction``, ``int``, ``"num/den"`` strings or
    floats (converted exactly).  Each vector must sum to exactly one.  Indices
    where both ``p`` and ``q`` vanish are dropped.

    Examples
    --------
    >>> d = ClassicalDichotomy(["1/2", "1/2", 0], ["3/4", "1/4", 0])
    >>> d.n
    2
    """

    p: tuple
    q: tuple

    def __post_init__(self):
        p = [_as_fraction(x) for x in self.p]
        q = [_as_fraction(x) for x in self.q]
        if len(p) != len(q):
            raise InvalidDichotomy(f"length mismatch: {len(p)} vs {len(q)}")
        if any(x < 0 for x in p + q):
            raise InvalidDichotomy("negative probability")
        if sum(p) != 1 or sum(q) != 1:
            raise InvalidDichotomy(f"vectors must sum to 1 exactly (got {sum(p)}, {sum(q)})")
        keep = [i for i in range(len(p)) if p[i] != 0 or q[i] != 0]
        object.__setattr__(self, "p", tuple(p[i] for i in keep))
        object.__setattr__(self, "q", tuple(q[i] for i in keep))

    @classmethod
    def normalized(cls, p: Sequence, q: Sequence, zero_tol: float = 0.0) -> "ClassicalDichotomy":
        """Build from non-negative weights, renormalising each vector exactly.

        Float entries not exceeding ``zero_tol`` times the vector maximum are set
        to zero first.
        """
        out = []
        for v in (p, q):
            v = [_as_fraction(x) for x in v]
            if zero_tol > 0:
                cut = Fraction(zero_tol) * max(v)
                v = [x if x > cut else Fraction(0) for x in v]
            s = sum(v)
            if s <= 0:
                raise InvalidDichotomy("vector has no positive mass")
            out.append([x / s for x in v])
        return cls(tuple(out[0]), tuple(out[1]))

    @property
    def n(self) -> int:
        return len(self.p)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([float(x) for x in self.p]), np.array([float(x) for x in self.q])

    def ratios(self) -> tuple:
        """Likelihood ratios ``p_i / q_i`` with ``math.inf`` where ``q_i = 0``."""
        return tuple(math.inf if qi == 0 else pi / qi for pi, qi in zip(self.p, self.q))

    def tensor(self, other: "ClassicalDichotomy") -> "ClassicalDichotomy":
        p = tuple(a * b for a in self.p for b in other.p)
        q = tuple(a * b for a in self.q for b in other.q)
        return ClassicalDichotomy(p, q)

    def to_json(self) -> dict:
        return {"p": [_frac_str(x) for x in self.p], "q": [_frac_str(x) for x in self.q]}


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Renyi divergences


def log_q_alpha(p, q, alpha: float) -> float:
    """``log sum_{p_i, q_i > 0} p_i^alpha q_i^(1-alpha)``.

    Terms with a vanishing entry are dropped, which is the pseudo-inverse
    convention and also the correct value for ``alpha`` in ``[0, 1)``.  Any real
    ``alpha`` is accepted, including negative values.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = (p > 0) & (q > 0)
    if not np.any(mask):
        return -math.inf
    if alpha == 0:
        return math.log(float(np.sum(q[mask])))
    return float(logsumexp(alpha * np.log(p[mask]) + (1 - alpha) * np.log(q[mask])))


def renyi_vectors(p, q, alpha: float) -> float:
    """Renyi divergence of two non-negative float vectors (see :func:`classical_renyi`)."""
    if not alpha >= 0:
        raise InvalidAlpha(f"alpha must be >= 0, got {alpha}")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    both = (p > 0) & (q > 0)
    dominated = not np.any((p > 0) & (q == 0))
    if alpha == math.inf:
        return float(np.max(np.log(p[both]) - np.log(q[both]))) if dominated else math.inf
    if alpha >= 1 and not dominated:
        return math.inf
    if np.array_equal(p, q):
        return 0.0
    if not np.any(both):
        warnings.warn("p and q have disjoint supports", OrthogonalPairWarning, stacklevel=2)
        return math.inf
    if alpha == 1:
        return float(np.sum(p[both] * (np.log(p[both]) - np.log(q[both]))))
    return log_q_alpha(p, q, alpha) / (alpha - 1)


def classical_renyi(d: ClassicalDichotomy, alpha: float) -> float:
    """Renyi divergence ``D_alpha(p || q)`` without assuming ``p << q``.

    Parameters
    ----------
    d : ClassicalDichotomy
    alpha : float
        Order in ``[0, inf]``.  ``alpha = 1`` gives the Kullback-Leibler
        divergence, ``alpha = inf`` the max-divergence.

    Returns
    -------
    float
        ``(alpha-1)^{-1} log sum p_i^alpha q_i^{1-alpha}`` where the sum runs over
        the common support.  For ``alpha < 1`` the part of ``p`` singular to
        ``q`` only enters through its mass, so this equals
        ``alpha/(alpha-1) log(lambda) + D_alpha(p_parallel || q)`` with ``lambda``
        the mass of ``p`` on the support of ``q``.  For ``alpha >= 1`` the value is
        ``+inf`` unless ``p << q``.
    """
    p, q = d.as_arrays()
    return renyi_vectors(p, q, alpha)


# ---------------------------------------------------------------------------
# Minimal form and channels


@dataclass(frozen=True)
class MinimalForm:
    """Minimal form of a classical dichotomy.

    ``blocks[j]`` lists the original indices merged into outcome ``j``;
    ``ratios[j]`` is their common likelihood ratio (``math.inf`` when ``q`` is 0).
    ``permutation`` is the stable ratio-descending order of the input indices.
    """

    p_tilde: tuple
    q_tilde: tuple
    blocks: tuple
    ratios: tuple
    permutation: tuple
    exact: bool = True

    @property
    def m(self) -> int:
        return len(self.p_tilde)

    @property
    def multiplicities(self) -> tuple:
        return tuple(len(b) for b in self.blocks)

    def as_dichotomy(self) -> ClassicalDichotomy:
        return ClassicalDichotomy(self.p_tilde, self.q_tilde)

    def to_json(self) -> dict:
        return {
            "p_tilde": [_frac_str(x) if isinstance(x, Fraction) else x for x in self.p_tilde],
            "q_tilde": [_frac_str(x) if isinstance(x, Fraction) else x for x in self.q_tilde],
            "blocks": [list(b) for b in self.blocks],
            "ratios": [
                "inf" if r == math.inf else (_frac_str(r) if isinstance(r, Fraction) else r)
                for r in self.ratios
            ],
            "permutation": list(self.permutation),
            "exact": self.exact,
        }


def _sort_key(ratio):
    return (0, 0) if ratio == math.inf else (1, -ratio)


def minimal_form(d: ClassicalDichotomy) -> MinimalForm:
    """Sort outcomes by decreasing likelihood ratio and merge equal ratios.

    Examples
    --------
    >>> d = ClassicalDichotomy(["1/3"] * 3, ["1/3"] * 3)
    >>> minimal_form(d).p_tilde
    (Fraction(1, 1),)
    """
    r = d.ratios()
    perm = tuple(sorted(range(d.n), key=lambda i: _sort_key(r[i])))
    blocks, ratios = [], []
    for i in perm:
        if blocks and ratios[-1] == r[i]:
            blocks[-1].append(i)
        else:
            blocks.append([i])
            ratios.append(r[i])
    p_t = tuple(sum((d.p[i] for i in b), Fraction(0)) for b in blocks)
    q_t = tuple(sum((d.q[i] for i in b), Fraction(0)) for b in blocks)
    return MinimalForm(p_t, q_t, tuple(tuple(b) for b in blocks), tuple(ratios), perm)


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic matrix with exact rational entries.

    ``M @ v`` maps a probability column vector of length ``cols`` to one of
    length ``rows``; ``M @ N`` composes.
    """

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(_as_fraction(x) for x in row) for row in self.entries)
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("entries must form a non-empty rectangular matrix")
        if any(x < 0 for r in rows for x in r):
            raise ValueError("stochastic matrix has a negative entry")
        for j in range(len(rows[0])):
            if sum(r[j] for r in rows) != 1:
                raise ValueError(f"column {j} does not sum to 1")
        object.__setattr__(self, "entries", rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    def apply(self, v: Sequence) -> tuple:
        v = [_as_fraction(x) for x in v]
        if len(v) != self.shape[1]:
            raise ValueError(f"vector length {len(v)} does not match {self.shape[1]} columns")
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.entries)

    def __matmul__(self, other):
        if isinstance(other, StochasticMatrix):
            cols = list(zip(*other.entries))
            return StochasticMatrix(tuple(
                tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols)
                for row in self.entries
            ))
        return self.apply(other)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries])

    def to_json(self) -> list:
        return [[_frac_str(x) for x in row] for row in self.entries]


def build_channels(d: ClassicalDichotomy, mf: MinimalForm | None = None) -> tuple[StochasticMatrix, StochasticMatrix]:
    """Stochastic maps ``T`` (n -> m) and ``R`` (m -> n) between ``d`` and its minimal form.

    ``T`` sums each block; column ``j`` of ``R`` spreads block ``j`` back
    proportionally to ``q`` (or to ``p`` for the block where ``q`` vanishes).
    Both act on the original index order.
    """
    mf = minimal_form(d) if mf is None else mf
    n, m = d.n, mf.m
    T = [[Fraction(0)] * n for _ in range(m)]
    R = [[Fraction(0)] * m for _ in range(n)]
    for j, block in enumerate(mf.blocks):
        if mf.q_tilde[j] > 0:
            src, tot = d.q, mf.q_tilde[j]
        elif mf.p_tilde[j] > 0:
            src, tot = d.p, mf.p_tilde[j]
        else:
            raise DegenerateBlock(f"block {j} carries no mass")
        for k in block:
            T[j][k] = Fraction(1)
            R[k][j] = src[k] / tot
    return StochasticMatrix(tuple(map(tuple, T))), StochasticMatrix(tuple(map(tuple, R)))


# ---------------------------------------------------------------------------
# Lorenz curves and relative majorization


@dataclass(frozen=True)
class LorenzCurve:
    """Concave piecewise-linear curve through ``points``.

    Abscissas are non-decreasing; several points share ``x = 0`` when some
    outcomes have ``q = 0``.  Evaluation takes the upper envelope.
    """

    points: tuple

    def __call__(self, x) -> Fraction:
        x = _as_fraction(x)
        pts = self.points
        best = None
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 <= x <= x1:
                y = y0 if x1 == x0 else y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                best = y if best is None else max(best, y)
        if best is None:
            raise ValueError(f"x = {x} outside [0, 1]")
        return best

    @property
    def xs(self) -> tuple:
        return tuple(pt[0] for pt in self.points)

    @property
    def ys(self) -> tuple:
        return tuple(pt[1] for pt in self.points)

    def simplify(self) -> "LorenzCurve":
        """Drop repeated points and points interior to straight segments."""
        out = []
        for pt in self.points:
            if out and out[-1] == pt:
                continue
            while len(out) >= 2:
                (ax, ay), (bx, by) = out[-2], out[-1]
                if (bx - ax) * (pt[1] - ay) == (by - ay) * (pt[0] - ax):
                    out.pop()
                else:
                    break
            out.append(pt)
        return LorenzCurve(tuple(out))


def lorenz_curve(d: ClassicalDichotomy, simplify: bool = False) -> LorenzCurve:
    """Cumulative ``(sum q, sum p)`` after sorting by decreasing likelihood ratio.

    Examples
    --------
    >>> lorenz_curve(ClassicalDichotomy([1, 0], ["1/2", "1/2"])).points[1]
    (Fraction(1, 2), Fraction(1, 1))
    """
    r = d.ratios()
    perm = sorted(range(d.n), key=lambda i: _sort_key(r[i]))
    x = y = Fraction(0)
    pts = [(x, y)]
    for i in perm:
        x += d.q[i]
        y += d.p[i]
        pts.append((x, y))
    curve = LorenzCurve(tuple(pts))
    return curve.simplify() if simplify else curve


def relative_majorizes(d1: ClassicalDichotomy, d2: ClassicalDichotomy) -> bool:
    """True iff some stochastic map sends ``d1`` to ``d2`` (Lorenz-curve domination)."""
    L1, L2 = lorenz_curve(d1), lorenz_curve(d2)
    xs = sorted(set(L1.xs) | set(L2.xs))
    return all(L1(x) >= L2(x) for x in xs)


@dataclass(frozen=True)
class Interconversion:
    """Outcome of an interconvertibility test with the certifying maps."""

    interconvertible: bool
    forward: StochasticMatrix | None = None
    backward: StochasticMatrix | None = None


def interconvertible_classical(d1: ClassicalDichotomy, d2: ClassicalDichotomy) -> Interconversion:
    """Decide interconvertibility by comparing minimal forms exactly.

    On success ``forward = R2 T1`` maps ``d1`` onto ``d2`` and ``backward = R1 T2``
    maps ``d2`` onto ``d1``.
    """
    mf1, mf2 = minimal_form(d1), minimal_form(d2)
    if (mf1.p_tilde, mf1.q_tilde) != (mf2.p_tilde, mf2.q_tilde):
        return Interconversion(False)
    T1, R1 = build_channels(d1, mf1)
    T2, R2 = build_channels(d2, mf2)
    fwd, bwd = R2 @ T1, R1 @ T2
    assert fwd @ d1.p == d2.p and fwd @ d1.q == d2.q
    assert bwd @ d2.p == d1.p and bwd @ d2.q == d1.q
    return Interconversion(True, fwd, bwd)


def tilde_measure(d: ClassicalDichotomy) -> DiscreteMeasure:
    """Measure with atoms ``-log r_j`` of mass ``q_tilde_j`` (``+inf`` for ratio 0).

    Its Laplace transform at ``alpha`` equals ``sum p_i^alpha q_i^(1-alpha)``
    over the common support, for every ``alpha > 0``.
    """
    mf = minimal_form(d)
    atoms = []
    for r, qt in zip(mf.ratios, mf.q_tilde):
        if qt == 0:
            continue
        atoms.append((math.inf if r == 0 else -math.log(r), float(qt)))
    return DiscreteMeasure(tuple(atoms))
