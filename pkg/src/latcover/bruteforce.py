"""Independent brute-force oracles that gate every solver.

These deliberately share no code with the solvers they check: candidate
generation is a plain coefficient box derived from the euclidean
circumradius bound ||y||_2 <= R * ||y||_K, and every gauge evaluation is
the body's exact comparison. Bound checkers for the counting
inequalities live here too.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .bodies import ConcreteBody
from .errors import BudgetExceeded, MissingAnalyticData
from .lattice import LatticeBasis


@dataclass(frozen=True)
class BruteForceBudget:
    max_candidates: int = 10**6

    def __post_init__(self):
        if self.max_candidates <= 0:
            raise ValueError("budget must be positive")


def _candidate_box(basis: LatticeBasis, center: la.Vec, radius: Fraction,
                   budget: BruteForceBudget):
    """Iterate coefficient vectors z with ||Bz - center||_2 possibly <= radius.

    Uses |z_i - (B^{-1} c)_i| <= radius * ||row_i(B^{-1})||_2, exact and
    conservative.
    """
    inv = la.inverse(basis.matrix)
    c = la.matvec(inv, la.vec(center))
    ranges = []
    total = 1
    for i, row in enumerate(inv):
        w_hi = la.sqrt_bounds(la.norm_sq(row))[1]
        lo = c[i] - radius * w_hi
        hi = c[i] + radius * w_hi
        lo_i = math.ceil(lo)
        hi_i = math.floor(hi)
        if hi_i < lo_i:
            return iter(())
        ranges.append(range(lo_i, hi_i + 1))
        total *= len(ranges[-1])
        if total > budget.max_candidates:
            raise BudgetExceeded(f"candidate box of {total} exceeds budget")
    return itertools.product(*ranges)


def brute_enum(basis: LatticeBasis, body: ConcreteBody, center: la.Vec,
               dist: Fraction, budget: BruteForceBudget = BruteForceBudget()):
    """Exact {y in L : ||y - center||_K <= dist}, lex-sorted coefficients."""
    center = la.vec(center)
    dist = la.frac(dist)
    radius = dist * body.centering.R
    out = []
    for z in _candidate_box(basis, center, radius, budget):
        y = basis.point(z)
        if body.gauge_cmp(la.sub(y, center), dist) <= 0:
            out.append((z, y))
    out.sort(key=lambda t: t[0])
    return [y for _, y in out]


def brute_svp(basis: LatticeBasis, body: ConcreteBody,
              budget: BruteForceBudget = BruteForceBudget()):
    """Exact (lambda_1 gauge value, full argmin set).

    The argmin set comes from exactly comparable gauge keys; the returned
    value is the exact rational gauge when rational, otherwise a tight
    enclosure midpoint.
    """
    n = basis.dimension
    # upper bound: gauge of the shortest basis column in euclidean norm
    best_col = min(basis.columns, key=la.norm_sq)
    ub = body.gauge_rational(best_col, la.frac(1, 10**12)) + la.frac(1, 10**9)
    radius = ub * body.centering.R
    cands = [(z, basis.point(z))
             for z in _candidate_box(basis, la.zeros(n), radius, budget) if any(z)]
    if not cands:
        raise BudgetExceeded("no nonzero candidates inside brute-force radius")
    keys = [body.gauge_key(y) for _, y in cands]
    m = min(keys)
    best = sorted((cands[i] for i in range(len(cands)) if keys[i] == m),
                  key=lambda t: t[0])
    vectors = [y for _, y in best]
    value = body.gauge_rational(vectors[0], la.frac(1, 10**12))
    return value, vectors


def brute_cvp(basis: LatticeBasis, body: ConcreteBody, target: la.Vec,
              budget: BruteForceBudget = BruteForceBudget()):
    """Exact (distance value, full argmin set) for the gauge CVP."""
    target = la.vec(target)
    # upper bound from rounding target coordinates
    z0 = tuple(round(c) for c in basis.coefficients(target))
    ub = body.gauge_rational(la.sub(basis.point(z0), target), la.frac(1, 10**12)) + la.frac(1, 10**9)
    radius = ub * body.centering.R
    cands = [(z, basis.point(z)) for z in _candidate_box(basis, target, radius, budget)]
    if not cands:
        raise BudgetExceeded("empty brute-force candidate box for cvp")
    keys = [body.gauge_key(la.sub(y, target)) for _, y in cands]
    m = min(keys)
    best = sorted((cands[i] for i in range(len(cands)) if keys[i] == m),
                  key=lambda t: t[0])
    vectors = [y for _, y in best]
    value = body.gauge_rational(la.sub(vectors[0], target), la.frac(1, 10**12))
    return value, vectors


# -- paper-bound checkers -----------------------------------------------------

def check_lambda1_bound(count_dk: int, n: int, d: Fraction, lambda1: Fraction,
                        gamma: Fraction = la.ONE):
    """count(dK) <= (gamma (1 + 2d/lambda1))^n; returns (ok, margin)."""
    if lambda1 is None or lambda1 <= 0:
        raise MissingAnalyticData("lambda1 required")
    bound = float(gamma * (1 + 2 * la.frac(d) / la.frac(lambda1))) ** n
    return count_dk <= bound, bound - count_dk


def check_gkl_smooth(count_tk: int, count_k: int, n: int, t: Fraction):
    """count(tK) <= (4t+2)^n * G(K, L) with G lower-bounded by count_k."""
    bound = float(4 * la.frac(t) + 2) ** n * count_k
    return count_tk <= bound, bound - count_tk


def check_volume_bounds(count: int, vol: float, det_l: float, n: int,
                        mu: float | None = None):
    """vol/det <= G and, when mu is supplied, G <= max(1, mu^n) 2^n vol/det."""
    if vol is None or det_l is None:
        raise MissingAnalyticData("vol(K) and det(L) required")
    lower_ok = vol / det_l <= count + 1e-9
    result = {"lower_ok": lower_ok, "lower_margin": count - vol / det_l}
    if mu is not None:
        ub = max(1.0, mu**n) * 2**n * vol / det_l
        result["upper_ok"] = count <= ub + 1e-9
        result["upper_margin"] = ub - count
    return result


def check_bounds(lemma: str, **kwargs):
    """Dispatch a named inequality check; raises MissingAnalyticData when
    the required analytic quantities are absent."""
    table = {
        "lambda1": check_lambda1_bound,
        "gkl-smooth": check_gkl_smooth,
        "volume": check_volume_bounds,
    }
    if lemma not in table:
        raise MissingAnalyticData(f"unknown lemma {lemma!r}")
    try:
        return table[lemma](**kwargs)
    except TypeError as exc:
        raise MissingAnalyticData(str(exc)) from exc
