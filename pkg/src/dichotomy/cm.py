"""Complete-monotonicity tests for ``g(alpha) = exp(-alpha D_inf) Q_alpha``.

When ``rho`` and ``sigma`` commute, ``g`` is a positive combination of decaying
exponentials, hence completely monotone: ``(-1)^n g^(n)(alpha) >= 0`` for all
``n``.  Families with a classical simulation (Petz, maximal) inherit this for
every pair.  For the sandwiched family a violation at some order is evidence
that the pair cannot be simulated classically.

Derivatives are taken by central finite differences with one Richardson step,
and a violation only counts when it exceeds ten times the error estimate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from ._parallel import parallel_map
from .classical import ClassicalDichotomy
from .errors import NotMajorized, StepUnderflow
from .qdichotomy import QuantumDichotomy, d_infinity, nussbaum_szkola_vectors
from .zoo import Family, log_q

MAX_ORDER = 6
NOISE_FACTOR = 10.0
MIN_STEP = 1e-6


@dataclass(frozen=True)
class DerivativeEstimate:
    order: int
    alpha: float
    value: float
    step: float
    error_estimate: float


def _central(f, alpha: float, n: int, h: float) -> float:
    return sum((-1) ** k * comb(n, k) * f(alpha + (n / 2 - k) * h) for k in range(n + 1)) / h ** n


def nth_derivative(f, alpha: float, n: int, h: float | None = None) -> DerivativeEstimate:
    """n-th derivative by central differences at steps ``h`` and ``h/2`` plus Richardson.

    ``h`` defaults to ``1e-2 * max(1, alpha)`` and is reduced so that every
    evaluation point stays right of ``alpha - n h > 0``.  The error estimate is
    the distance between the extrapolated value and the finer difference.

    Examples
    --------
    >>> round(nth_derivative(lambda a: a ** 2, 1.0, 2).value, 8)
    2.0
    """
    if not 0 <= n <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {n}")
    if n == 0:
        return DerivativeEstimate(0, alpha, float(f(alpha)), 0.0, 0.0)
    if h is None:
        h = 1e-2 * max(1.0, abs(alpha))
        if alpha > 0:
            h = min(h, alpha / (n + 1))
    if h < MIN_STEP or (alpha > 0 and alpha - n * h <= 0):
        raise StepUnderflow(f"step {h:.2e} too small or too large at alpha = {alpha}")
    d1 = _central(f, alpha, n, h)
    d2 = _central(f, alpha, n, h / 2)
    rich = (4 * d2 - d1) / 3
    return DerivativeEstimate(n, alpha, float(rich), h, float(abs(rich - d2)))


# ---------------------------------------------------------------------------
# The function g


def family_d_infinity(d, family: Family | str) -> float:
    """The ``alpha -> inf`` rate used to normalise ``g`` for a family.

    Classical: ``log max p_i / q_i``.  Petz: the same for its Nussbaum-Szkola
    pair, i.e. the largest ``log(p_i / q_j)`` over overlapping eigenprojectors.
    All other families: the quantum max-divergence.
    """
    tag = Family.parse(family).tag if isinstance(family, str) else family.tag
    if tag == "classical" or isinstance(d, ClassicalDichotomy):
        if isinstance(d, QuantumDichotomy):
            from .qdichotomy import commuting_reduction
            d = commuting_reduction(d)
        p, q = d.as_arrays()
        if np.any((p > 0) & (q == 0)):
            return math.inf
        m = (p > 0) & (q > 0)
        return float(np.max(np.log(p[m]) - np.log(q[m])))
    if tag == "petz":
        if not d.support_ok:
            return math.inf
        P, Q = nussbaum_szkola_vectors(d)
        m = (P > 0) & (Q > 0)
        return float(np.max(np.log(P[m]) - np.log(Q[m])))
    return d_infinity(d)


def g_function(d, family: Family | str, alpha: float, d_inf: float | None = None) -> float:
    """``exp(-alpha D_inf + log Q_alpha)`` for the chosen family.

    The trace formula of the family is used for every ``alpha > 0`` where it is
    defined; no data-processing range is imposed.
    """
    family = Family.parse(family) if isinstance(family, str) else family
    if not alpha > 0:
        raise ValueError(f"g is defined for alpha > 0, got {alpha}")
    D = family_d_infinity(d, family) if d_inf is None else d_inf
    return math.exp(-alpha * D + log_q(d, family, alpha))


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class Verdict:
    status: str  # "pass", "fail" or "inconclusive"
    margin: float  # (-1)^n g^(n)(alpha)
    error_estimate: float


@dataclass
class CMReport:
    """Verdicts ``verdicts[n][k]`` for order ``n`` at ``alpha_grid[k]``."""

    family: Family
    alpha_grid: list
    max_order: int
    verdicts: list
    d_inf: float
    first_violation: tuple | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.status == "pass" for row in self.verdicts for v in row)

    def first_violating_order(self) -> int | None:
        return None if self.first_violation is None else self.first_violation[0]

    def orders_passed(self) -> list[bool]:
        return [all(v.status == "pass" for v in row) for row in self.verdicts]

    def to_json(self) -> dict:
        return {
            "family": str(self.family),
            "d_inf": self.d_inf,
            "alpha_grid": list(self.alpha_grid),
            "max_order": self.max_order,
            "passed": self.passed,
            "first_violation": None if self.first_violation is None else {
                "order": self.first_violation[0], "alpha": self.first_violation[1],
                "margin": self.first_violation[2]},
            "verdicts": [
                [{"alpha": a, "status": v.status, "margin": v.margin, "error_estimate": v.error_estimate}
                 for a, v in zip(self.alpha_grid, row)]
                for row in self.verdicts
            ],
        }


def _verdict(f, alpha: float, n: int) -> Verdict:
    try:
        est = nth_derivative(f, alpha, n)
    except (StepUnderflow, OverflowError, ValueError):
        return Verdict("inconclusive", math.nan, math.inf)
    val = (-1) ** n * est.value
    if not math.isfinite(val):
        return Verdict("inconclusive", val, est.error_estimate)
    status = "pass" if val >= -NOISE_FACTOR * est.error_estimate else "fail"
    return Verdict(status, val, est.error_estimate)


def cm_check(d, family: Family | str, alpha_grid, max_order: int = 4,
             d_inf: float | None = None, workers: int | None = None) -> CMReport:
    """Test ``(-1)^n g^(n)(alpha) >= 0`` for ``n = 0..max_order`` on ``alpha_grid``.

    A grid point fails only when the signed derivative is below ``-10`` times its
    error estimate.  ``first_violation`` is the failure with the smallest order,
    then the smallest ``alpha``, as ``(order, alpha, margin)``.
    """
    family = Family.parse(family) if isinstance(family, str) else family
    if not 0 <= max_order <= MAX_ORDER:
        raise ValueError(f"max_order must be in 0..{MAX_ORDER}")
    grid = sorted(float(a) for a in alpha_grid)
    if not grid or grid[0] <= 0:
        raise ValueError("alpha grid must lie in (0, inf)")
    D = family_d_infinity(d, family) if d_inf is None else d_inf

    def f(a):
        return g_function(d, family, a, D)

    tasks = [(n, a) for n in range(max_order + 1) for a in grid]
    results = parallel_map(lambda t: _verdict(f, t[1], t[0]), tasks, workers)
    verdicts = [results[n * len(grid):(n + 1) * len(grid)] for n in range(max_order + 1)]
    first = None
    for n, row in enumerate(verdicts):
        for a, v in zip(grid, row):
            if v.status == "fail":
                first = (n, a, v.margin)
                break
        if first:
            break
    return CMReport(family, grid, max_order, verdicts, D, first)


def petz_cm_analytic(d: QuantumDichotomy, alpha: float, n: int) -> float:
    """Exact ``d^n/dalpha^n`` of the Petz ``g`` from its Nussbaum-Szkola exponential sum.

    ``g(alpha) = sum_ij Q_ij exp(alpha (log r_ij - D))`` with ``r_ij = P_ij / Q_ij``
    and ``D`` the Petz max-rate, so the derivative is
    ``sum_ij Q_ij (log r_ij - D)^n exp(alpha (log r_ij - D))``.
    """
    P, Q = nussbaum_szkola_vectors(d)
    m = (P > 0) & (Q > 0)
    c = np.log(P[m]) - np.log(Q[m])
    c = c - np.max(c)
    return float(np.sum(Q[m] * c ** n * np.exp(alpha * c)))


def _is_majorized(n_vec, m_vec) -> bool:
    a = sorted(n_vec, reverse=True)
    b = sorted(m_vec, reverse=True)
    if len(a) != len(b) or sum(a) != sum(b):
        return False
    return all(sum(a[:k]) >= sum(b[:k]) for k in range(1, len(a) + 1))


def schur_product_check(f, x: float, n_vec, m_vec) -> bool:
    """``prod_j (-1)^{n_j} f^(n_j)(x) >= prod_j (-1)^{m_j} f^(m_j)(x)`` up to noise.

    Requires ``n_vec`` to majorize ``m_vec``; completely monotone ``f`` satisfy the
    inequality.
    """
    if not _is_majorized(n_vec, m_vec):
        raise NotMajorized(f"{list(n_vec)} does not majorize {list(m_vec)}")
    if max(list(n_vec) + list(m_vec)) > 4:
        raise ValueError("orders above 4 are not supported here")

    def product(orders):
        vals, errs = [], []
        for k in orders:
            e = nth_derivative(f, x, k)
            vals.append((-1) ** k * e.value)
            errs.append(e.error_estimate)
        prod = float(np.prod(vals))
        err = sum(errs[i] * abs(float(np.prod(vals[:i] + vals[i + 1:]))) for i in range(len(vals)))
        return prod, err

    lhs, el = product(n_vec)
    rhs, er = product(m_vec)
    scale = max(abs(lhs), abs(rhs))
    return lhs >= rhs - NOISE_FACTOR * (el + er) - 1e-12 * scale


# ---------------------------------------------------------------------------
# Qubit family and curves


def qubit_pair(s: float) -> QuantumDichotomy:
    """``rho_s = exp(s X) / (2 cosh s)`` against ``sigma = exp(Z) / (2 cosh 1)``.

    ``rho_0`` is maximally mixed, so ``s = 0`` is a commuting pair and the
    commutator grows with ``s``.
    """
    rho = 0.5 * np.array([[1.0, math.tanh(s)], [math.tanh(s), 1.0]])
    e = math.e
    sigma = np.diag([e, 1 / e]) / (e + 1 / e)
    return QuantumDichotomy(rho, sigma)


def derivative_curves(d, family: Family | str, alphas, max_order: int = 4,
                      workers: int | None = None) -> list[list[float]]:
    """Rows ``[alpha, g, -g', g'', ...]`` of signed derivatives up to ``max_order``."""
    family = Family.parse(family) if isinstance(family, str) else family
    D = family_d_infinity(d, family)

    def f(a):
        return g_function(d, family, a, D)

    def row(a):
        out = [float(a)]
        for n in range(max_order + 1):
            try:
                out.append((-1) ** n * nth_derivative(f, a, n).value)
            except StepUnderflow:
                out.append(math.nan)
        return out

    return parallel_map(row, list(alphas), workers)


def curves_to_csv(rows, max_order: int, stream=None) -> str:
    """CSV text with header ``alpha,order_0,...`` and 17 significant digits."""
    buf = io.StringIO() if stream is None else stream
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha"] + [f"order_{n}" for n in range(max_order + 1)])
    for r in rows:
        w.writerow([format(v, ".17g") for v in r])
    return buf.getvalue() if stream is None else ""
