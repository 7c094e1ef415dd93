"""General-norm lattice solvers built on ellipsoid coverings.

lattice_enum enumerates lattice points of gauge <= d around a target by
running the exact ellipsoidal enumerator once per covering translate and
filtering with the weak distance oracle, giving the two-sided sandwich
{gauge <= d} <= S <= {gauge <= d + eps}.

shortest_vectors / closest_vectors wrap the enumerator in the doubling
loop seeded by the euclidean engine, then filter to the near-minimal set.
The covering is computed once per session and rescaled with d, never
rebuilt inside the loop.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import linalg as la
from .bodies import BodyOracle
from .bruteforce import (BruteForceBudget, brute_enum, check_gkl_smooth,
                         check_lambda1_bound, check_volume_bounds)
from .errors import BudgetExceeded, CapExceeded
from .lattice import LatticeBasis
from .mellip import Covering, covering_for_body
from .sampling import RngState
from .voronoi import EnumCap, InnerProduct, L2Engine, euclidean


@dataclass(frozen=True)
class EnumRequest:
    body: BodyOracle
    lattice: LatticeBasis
    center: la.Vec
    distance: Fraction
    slack: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", la.vec(self.center))
        object.__setattr__(self, "distance", la.frac(self.distance))
        object.__setattr__(self, "slack", la.frac(self.slack))
        if self.distance < 0:
            raise ValueError("distance must be >= 0")
        if not 0 < self.slack < 1:
            raise ValueError("slack must lie in (0,1)")


@dataclass
class SolveReport:
    result_set: list                 # lex-sorted lattice points
    result_coeffs: list              # matching basis coefficients
    final_distance: Fraction         # d when the doubling loop stopped
    seed_distance: Fraction          # t from the euclidean engine
    filter_threshold: Optional[Fraction]   # m in the final filter
    enumeration_calls: int
    points_scanned: int

    @property
    def values(self):
        return [tuple(p) for p in self.result_set]


class EnumSession:
    """Covering plus the cached exact engine for one (body, lattice) pair."""

    def __init__(self, body: BodyOracle, lattice: LatticeBasis,
                 cover: Optional[Covering] = None, rng: Optional[RngState] = None,
                 cap: EnumCap = EnumCap(), cover_h: Optional[float] = None):
        if lattice.rank != lattice.dimension:
            raise ValueError("solvers need full-rank lattices")
        self.body = body
        self.lattice = lattice
        self.cover = cover if cover is not None else covering_for_body(
            body, rng=rng, h=cover_h)
        self.cap = cap
        self.engine = L2Engine(lattice, InnerProduct(self.cover.ellipsoid.shape), cap)
        self.enumeration_calls = 0
        self.points_scanned = 0

    def enum(self, center: la.Vec, d: Fraction, eps: Fraction):
        """One Lattice-Enum pass: sandwich-exact point set around center."""
        center = la.vec(center)
        d = la.frac(d)
        eps = la.frac(eps)
        distance = self.body.require_distance()
        inflate = 1 + self.cover.slack
        radius_sq = (d * inflate) ** 2
        seen = {}
        for s in self.cover.translates:
            c = la.add(center, la.scale(s, d))
            pts, coeffs = self.engine.enum_ball(c, radius_sq)
            self.enumeration_calls += 1
            self.points_scanned += len(pts)
            for p, zc in zip(pts, coeffs):
                seen.setdefault(zc, p)
        threshold = d + eps / 2
        out = []
        for zc in sorted(seen):
            diff = la.sub(seen[zc], center)
            if distance(diff, eps / 2) <= threshold:
                out.append((zc, seen[zc]))
        return [p for _, p in out], [zc for zc, _ in out]


def lattice_enum(req: EnumRequest, cover: Covering,
                 cap: EnumCap = EnumCap()):
    """{y : ||y - x||_K <= d} <= S <= {y : ||y - x||_K <= d + eps}."""
    session = EnumSession(req.body, req.lattice, cover=cover, cap=cap)
    pts, _ = session.enum(req.center, req.distance, req.slack)
    return pts


MAX_DOUBLINGS = 128


def shortest_vectors(body: BodyOracle, lattice: LatticeBasis, eps,
                     cover: Optional[Covering] = None,
                     rng: Optional[RngState] = None,
                     cap: EnumCap = EnumCap(),
                     cover_h: Optional[float] = None,
                     session: Optional[EnumSession] = None) -> SolveReport:
    """All shortest nonzero vectors under the body gauge, plus nothing of
    gauge beyond (1 + eps) lambda_1.

    Doubling loop: seed t = ||z'|| / R from the euclidean engine, grow d
    until the enumerator finds a nonzero point, then enumerate once more
    at d + t and keep points within (eps/2) t of the observed minimum.
    """
    eps = la.frac(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0,1)")
    if session is None:
        session = EnumSession(body, lattice, cover=cover, rng=rng,
                              cap=cap, cover_h=cover_h)
    distance = body.require_distance()
    n = lattice.dimension
    _, _, min_sq = L2Engine(lattice, euclidean(n), cap).shortest()
    t = la.sqrt_bounds(min_sq)[0] / body.centering.R
    if t <= 0:
        raise BudgetExceeded("degenerate euclidean seed")
    d = t
    zero = la.zeros(n)
    for _ in range(MAX_DOUBLINGS):
        pts, coeffs = session.enum(zero, d, t)
        nonzero = [i for i, zc in enumerate(coeffs) if any(zc)]
        if nonzero:
            break
        d = 2 * d
    else:
        raise BudgetExceeded("doubling loop did not terminate")
    pts, coeffs = session.enum(zero, d + t, t)
    keep = [(zc, p) for zc, p in zip(coeffs, pts) if any(zc)]
    probe = eps * t / 4
    dists = [distance(p, probe) for _, p in keep]
    m = min(dists)
    cutoff = m + eps * t / 2
    out = [(zc, p) for (zc, p), dv in zip(keep, dists) if dv <= cutoff]
    out.sort(key=lambda it: it[0])
    return SolveReport(result_set=[p for _, p in out],
                       result_coeffs=[zc for zc, _ in out],
                       final_distance=d, seed_distance=t,
                       filter_threshold=m,
                       enumeration_calls=session.enumeration_calls,
                       points_scanned=session.points_scanned)


def closest_vectors(body: BodyOracle, lattice: LatticeBasis, target, eps,
                    cover: Optional[Covering] = None,
                    rng: Optional[RngState] = None,
                    cap: EnumCap = EnumCap(),
                    cover_h: Optional[float] = None,
                    session: Optional[EnumSession] = None) -> SolveReport:
    """All closest lattice vectors to the target under the body gauge,
    plus nothing beyond (1 + eps) times the distance."""
    eps = la.frac(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0,1)")
    target = la.vec(target)
    if lattice.contains(target):
        zc = tuple(int(c) for c in lattice.coefficients(target))
        return SolveReport(result_set=[target], result_coeffs=[zc],
                           final_distance=la.ZERO, seed_distance=la.ZERO,
                           filter_threshold=la.ZERO,
                           enumeration_calls=0, points_scanned=0)
    if session is None:
        session = EnumSession(body, lattice, cover=cover, rng=rng,
                              cap=cap, cover_h=cover_h)
    distance = body.require_distance()
    n = lattice.dimension
    _, _, dist_sq = L2Engine(lattice, euclidean(n), cap).closest(target)
    t = la.sqrt_bounds(dist_sq)[0] / body.centering.R
    if t <= 0:
        raise BudgetExceeded("degenerate euclidean seed for cvp")
    d = t
    for _ in range(MAX_DOUBLINGS):
        pts, coeffs = session.enum(target, d, t)
        if pts:
            break
        d = 2 * d
    else:
        raise BudgetExceeded("doubling loop did not terminate")
    pts, coeffs = session.enum(target, d + t, t)
    probe = eps * t / 4
    dists = [distance(la.sub(p, target), probe) for p in pts]
    m = min(dists)
    cutoff = m + eps * t / 2
    out = [(zc, p) for zc, p, dv in zip(coeffs, pts, dists) if dv <= cutoff]
    out.sort(key=lambda it: it[0])
    return SolveReport(result_set=[p for _, p in out],
                       result_coeffs=[zc for zc, _ in out],
                       final_distance=d, seed_distance=t,
                       filter_threshold=m,
                       enumeration_calls=session.enumeration_calls,
                       points_scanned=session.points_scanned)


@dataclass
class CountReport:
    counts: dict                   # shift (as tuple) -> |(K + x) cap L|
    g_lower: int                   # max over the sampled shifts
    best_shift: tuple
    checks: dict = field(default_factory=dict)


def count_G(body, lattice: LatticeBasis, shifts,
            budget: BruteForceBudget = BruteForceBudget(),
            lambda1: Optional[Fraction] = None,
            gamma: Fraction = la.ONE,
            vol: Optional[float] = None,
            mu: Optional[float] = None,
            scale_check: Optional[Fraction] = None) -> CountReport:
    """Shift-sampled lower bound on G(K, L) = max_x |(K+x) cap L| with
    the counting inequalities evaluated where analytic data is supplied.

    scale_check additionally counts (t K + x) at the best shift and tests
    the (4t+2)^n growth bound.
    """
    n = lattice.dimension
    counts = {}
    for x in shifts:
        x = la.vec(x)
        pts = brute_enum(lattice, body, x, la.ONE, budget)
        counts[tuple(x)] = len(pts)
    best_shift = max(counts, key=lambda k: counts[k])
    g_lower = counts[best_shift]
    checks = {}
    if lambda1 is not None:
        ok, margin = check_lambda1_bound(g_lower, n, la.ONE, lambda1, gamma)
        checks["lambda1"] = {"ok": ok, "margin": margin}
    if vol is not None:
        det_l = lattice.determinant()
        checks["volume"] = check_volume_bounds(g_lower, vol, det_l, n, mu)
    if scale_check is not None:
        tscale = la.frac(scale_check)
        scaled_counts = [
            len(brute_enum(lattice, body, la.vec(x), tscale, budget))
            for x in counts]
        ok, margin = check_gkl_smooth(max(scaled_counts), g_lower, n, tscale)
        checks["gkl_smooth"] = {"ok": ok, "margin": margin}
    return CountReport(counts=counts, g_lower=g_lower,
                       best_shift=best_shift, checks=checks)
