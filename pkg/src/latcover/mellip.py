"""M-ellipsoid construction and certification.

lp balls get their analytic M-ellipsoid (a scaled euclidean ball).
General bodies go through the randomized generate-and-certify loop:
estimate the centroid, tilt the uniform density by a random dual vector,
estimate the inertial ellipsoid of the tilted density, scale by sqrt(n),
then certify by deterministically covering both the body by the
ellipsoid and the polar of the difference body by the polar ellipsoid.

Covering construction tiles space by the maximum-volume parallelepiped
inscribed in the candidate ellipsoid and runs a breadth-first search of
tiles that weakly intersect the body. Exceeding the tile budget is a
certified lower bound on the covering number, never a truncation.
"""

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import linalg as la
from .bodies import (BodyOracle, CenteringCertificate, ConcreteBody,
                     EllipsoidBody, LpBall, PolytopeBody, Separation,
                     shifted_body)
from .convexopt import AffineMax, weak_optimize_linear
from .ellipsoid import (Ellipsoid, InscribedParallelepiped,
                        inscribed_parallelepiped)
from .errors import (DegenerateCovariance, LineSearchFailure,
                     NotPositiveDefinite, RestartBudgetExceeded)
from .sampling import (LogconcaveDensity, RngState, estimate_moments,
                       hit_and_run_sample, uniform_density)

SQRT_8PI_E = math.sqrt(8 * math.pi * math.e)
H_PRIMAL_DEFAULT = 13 * math.e
H_DUAL_DEFAULT = 25 * math.e * 13


def lp_m_ellipsoid(n: int, p) -> Ellipsoid:
    """n^{1/2 - 1/p} B_2^n: inscribed ball of B_p^n for p <= 2, containing
    ball for p >= 2; an M-ellipsoid either way."""
    if isinstance(p, str):
        p = math.inf
    if p == math.inf:
        radius_sq = la.frac(n)
    else:
        p = la.frac(p)
        if p < 1:
            raise ValueError("p must be >= 1")
        if p == 1:
            radius_sq = la.frac(1, n)
        elif p == 2:
            radius_sq = la.ONE
        else:
            radius_sq = la.frac(float(n) ** (1.0 - 2.0 / float(p)))
    return Ellipsoid(la.mat_scale(la.identity(n), 1 / radius_sq))


@dataclass(frozen=True)
class CoverBudget:
    """Tile budget for Build-Cover: abort past hard_cap = ceil((sqrt(8 pi e) H)^n)."""

    h: float
    dimension: int
    hard_cap: int = 0

    def __post_init__(self):
        if self.h < 1:
            raise ValueError("H must be >= 1")
        if self.hard_cap == 0:
            object.__setattr__(self, "hard_cap",
                               math.ceil((SQRT_8PI_E * self.h) ** self.dimension))
        if self.hard_cap < 1:
            raise ValueError("hard cap must be >= 1")


@dataclass
class Covering:
    """Certificate that K <= union of x + (1+slack) P over x in translates,
    hence K <= union of x + (1+slack) E."""

    ellipsoid: Ellipsoid
    box: InscribedParallelepiped
    translates: list            # rational tile centers
    translate_coords: list      # integer tiling-lattice coordinates
    slack: Fraction

    def __post_init__(self):
        self._coord_set = set(self.translate_coords)
        v = np.array(self.box.v_rows)
        n = self.ellipsoid.dimension
        self._to_tile = (math.sqrt(n) / 2.0) * v   # x -> tiling coordinates

    @property
    def size(self) -> int:
        return len(self.translates)

    def covers_point(self, y, tol: float = 1e-9) -> bool:
        """Membership of y in some (1+slack)-inflated admitted tile."""
        u = self._to_tile @ np.asarray(y, dtype=float)
        z_star = tuple(int(round(c)) for c in u)
        if z_star in self._coord_set:
            return True
        limit = (1.0 + float(self.slack)) / 2.0 + tol
        spread = range(-1, 2)
        n = len(z_star)

        def near(z):
            return all(abs(u[i] - z[i]) <= limit for i in range(n))

        for delta in itertools.product(spread, repeat=n):
            z = tuple(z_star[i] + delta[i] for i in range(n))
            if z in self._coord_set and near(z):
                return True
        return False


@dataclass
class BuildCoverResult:
    status: str                     # "covering" | "exceeds_budget"
    covering: Optional[Covering]
    tiles_seen: int
    budget: CoverBudget

    @property
    def exceeded(self) -> bool:
        return self.status == "exceeds_budget"


def scaled_ellipsoid_covering(cover_ell: Ellipsoid, outer_scale: float) -> Covering:
    """Covering of outer_scale * E by translates of E, built analytically.

    Admits every tile of E's parallelepiped tiling that meets the outer
    ellipsoid (clamped-distance test in tiling coordinates), so any body
    inside outer_scale * E is covered with zero slack. No oracle calls.
    """
    n = cover_ell.dimension
    par = inscribed_parallelepiped(cover_ell)
    v = np.array(par.v_rows)
    b_inv = np.linalg.inv(v)
    sqrt_n = math.sqrt(n)
    reach = outer_scale * sqrt_n / 2.0
    span = int(math.floor(reach + 0.5)) + 1
    admitted = []
    for z in itertools.product(range(-span, span + 1), repeat=n):
        gap = sum(max(abs(zi) - 0.5, 0.0) ** 2 for zi in z)
        if gap <= reach * reach + 1e-12:
            admitted.append(z)
    admitted.sort()
    translates = [la.snap_vec((b_inv @ ((2.0 / sqrt_n) * np.asarray(z, dtype=float))).tolist())
                  for z in admitted]
    # slack absorbs the translate snapping; covering of outer_scale*E is exact
    return Covering(ellipsoid=cover_ell, box=par, translates=translates,
                    translate_coords=admitted, slack=la.frac(1, 512))


def build_cover(body: BodyOracle, ellipsoid: Ellipsoid, budget: CoverBudget,
                slack: Optional[Fraction] = None) -> BuildCoverResult:
    """Cover the body by translates of the ellipsoid, or certify that
    more than budget.h^n translates are needed.

    BFS over the parallelepiped tiling lattice; a tile is admitted when
    the weak intersection oracle INT(x, 1/n) answers 1, i.e. the convex
    program inf_K sqrt(n) max_i |<b_i, y - x>_A| evaluates below
    1 + 1/(2n). FIFO order with lexicographic tie-break keeps the
    translate list deterministic.
    """
    n = ellipsoid.dimension
    if slack is None:
        slack = la.frac(1, n)
    par = inscribed_parallelepiped(ellipsoid)
    v = np.array(par.v_rows)
    sqrt_n = math.sqrt(n)
    rows_f = sqrt_n * v                      # objective rows: +-sqrt(n) V_i
    rows = [la.vec([la.frac(x) for x in row]) for row in rows_f]
    all_rows = la.mat(list(rows) + [la.neg(r) for r in rows])
    b_inv = np.linalg.inv(v)                 # tile center = B (2/sqrt(n)) z
    eps = la.frac(slack)
    threshold = 1 + float(eps) / 2

    def tile_center(z) -> np.ndarray:
        return b_inv @ ((2.0 / sqrt_n) * np.asarray(z, dtype=float))

    def intersects(z) -> bool:
        x = tile_center(z)
        consts = la.vec([-la.dot(r, la.vec([la.frac(c) for c in x.tolist()]))
                         for r in all_rows])
        obj = AffineMax(rows=all_rows, consts=consts)
        res = weak_optimize_linear(body, obj, eps / 2)
        return float(res.value) <= threshold

    a0_f = np.array(la.to_float_vec(body.centering.a0))
    seed = tuple(int(round(c)) for c in ((sqrt_n / 2.0) * (v @ a0_f)))
    queue = deque([seed])
    visited = {seed}
    admitted = []
    while queue:
        z = queue.popleft()
        if not intersects(z):
            continue
        admitted.append(z)
        if len(admitted) > budget.hard_cap:
            return BuildCoverResult("exceeds_budget", None, len(admitted), budget)
        neighbors = []
        for i in range(n):
            for s in (1, -1):
                nz = z[:i] + (z[i] + s,) + z[i + 1:]
                if nz not in visited:
                    visited.add(nz)
                    neighbors.append(nz)
        queue.extend(sorted(neighbors))
    admitted.sort()
    translates = [la.snap_vec(tile_center(z).tolist()) for z in admitted]
    # recorded slack absorbs the translate snapping on top of the INT slack
    covering = Covering(ellipsoid=ellipsoid, box=par, translates=translates,
                        translate_coords=admitted, slack=eps + la.frac(1, 512))
    return BuildCoverResult("covering", covering, len(admitted), budget)


# -- width-norm and polar oracles ---------------------------------------------

class WidthNormBody(ConcreteBody):
    """(K-K)* of a polytope, via exact support widths over the vertex set:
    gauge(x) = max_v <x,v> - min_v <x,v>."""

    def __init__(self, vertices, circum_r: Fraction, inner_r: Fraction):
        self.parent_vertices = [la.vec(v) for v in vertices]
        self._vf = np.array([la.to_float_vec(v) for v in self.parent_vertices])
        n = len(self.parent_vertices[0])
        cert = CenteringCertificate(la.zeros(n), 1 / (2 * circum_r), 1 / (2 * inner_r))
        super().__init__(cert, n, symmetric=True)
        self.separation_float = self._separation_np

    def _separation_np(self, x):
        vals = self._vf @ np.asarray(x, dtype=float)
        hi, lo = int(np.argmax(vals)), int(np.argmin(vals))
        if vals[hi] - vals[lo] <= 1.0:
            return True, None
        return False, self._vf[hi] - self._vf[lo]

    def width_exact(self, x: la.Vec) -> Fraction:
        vals = [la.dot(x, v) for v in self.parent_vertices]
        return max(vals) - min(vals)

    def gauge_cmp(self, x, c):
        w = self.width_exact(la.vec(x))
        return (w > c) - (w < c)

    def gauge_value(self, x):
        vals = self._vf @ np.array([float(v) for v in x])
        return float(vals.max() - vals.min())

    def gauge_value_np(self, xs):
        vals = self._vf @ np.asarray(xs, dtype=float)
        return float(vals.max() - vals.min())

    def gauge_rational(self, x, eps):
        del eps
        return self.width_exact(la.vec(x))

    def gauge_key(self, x):
        return self.width_exact(la.vec(x))

    def support_argmax(self, direction):
        # boundary point of (K-K)*: x with width 1 along the best vertex pair
        d = la.vec(direction)
        w = self.width_exact(d)
        if w == 0:
            return la.zeros(self.dimension)
        return la.scale(d, 1 / w)

    def _separation(self, x):
        x = la.vec(x)
        vals = [la.dot(x, v) for v in self.parent_vertices]
        hi = max(range(len(vals)), key=lambda i: vals[i])
        lo = min(range(len(vals)), key=lambda i: vals[i])
        if vals[hi] - vals[lo] <= 1:
            return Separation(True)
        return Separation(False, la.sub(self.parent_vertices[hi], self.parent_vertices[lo]))


def width_norm_body(body: BodyOracle, opt_eps: Fraction = la.frac(1, 100)) -> BodyOracle:
    """Oracle for the width-norm unit ball (K-K)*.

    Exact constructions for concrete bodies (polar lp ball, polar
    ellipsoid, vertex widths for polytopes); the generic fallback
    evaluates two weak optimizations per query at accuracy eps/4 each.
    """
    if isinstance(body, LpBall):
        # (K-K)* = (2K)* = K*/2
        dual = body.polar()
        return LpBall(body.dimension, dual.p, dual.scale / 2)
    if isinstance(body, EllipsoidBody):
        shape = la.mat_scale(la.inverse(body.ellipsoid.shape), 4)
        return EllipsoidBody(Ellipsoid(shape))
    if isinstance(body, PolytopeBody):
        return WidthNormBody(body.vertices, body.centering.R, body.centering.require_r())
    return _generic_width_body(body, opt_eps)


def _generic_width_body(body: BodyOracle, opt_eps: Fraction) -> BodyOracle:
    r = body.centering.require_r()
    big_r = body.centering.R
    cert = CenteringCertificate(la.zeros(body.dimension), 1 / (2 * big_r), 1 / (2 * r))

    def width(x: la.Vec, eps: Fraction):
        lo = weak_optimize_linear(body, AffineMax(la.mat([x]), la.vec([0])), eps / 4)
        hi = weak_optimize_linear(body, AffineMax(la.mat([la.neg(x)]), la.vec([0])), eps / 4)
        w = -la.frac(hi.value) - la.frac(lo.value)
        return w, lo, hi

    def distance(x, eps):
        w, _, _ = width(la.vec(x), la.frac(eps))
        return max(w, la.ZERO)

    def membership(x, eps):
        return 1 if distance(x, eps) <= 1 else 0

    def separation(x):
        x = la.vec(x)
        w, lo, hi = width(x, opt_eps)
        if w <= 1:
            return Separation(True)
        direction = la.sub(la.vec([la.frac(v) for v in hi.witness]),
                           la.vec([la.frac(v) for v in lo.witness]))
        if all(v == 0 for v in direction):
            return Separation(True)
        return Separation(False, direction)

    return BodyOracle(cert, membership, distance, separation,
                      body.dimension, symmetric=True)


def scaled_polar_oracle(body: BodyOracle, factor: Fraction,
                        opt_eps: Fraction = la.frac(1, 100)) -> BodyOracle:
    """Oracle for factor * conv{K, -K}*; exact for symmetric concrete bodies."""
    factor = la.frac(factor)
    if isinstance(body, LpBall):
        dual = body.polar()
        return LpBall(body.dimension, dual.p, dual.scale * factor)
    if isinstance(body, EllipsoidBody):
        shape = la.mat_scale(la.inverse(body.ellipsoid.shape), 1 / (factor * factor))
        return EllipsoidBody(Ellipsoid(shape))
    if isinstance(body, PolytopeBody) and body.symmetric:
        rows = la.mat(body.vertices)
        rhs = la.vec([factor] * len(body.vertices))
        return PolytopeBody(rows, rhs, symmetric=True)
    return _generic_scaled_polar(body, factor, opt_eps)


def _generic_scaled_polar(body: BodyOracle, factor: Fraction, opt_eps: Fraction):
    r = body.centering.require_r()
    big_r = body.centering.R
    cert = CenteringCertificate(la.zeros(body.dimension),
                                factor / big_r, factor / r)

    def support_pair(x: la.Vec, eps: Fraction):
        # sup_K <x,.> = -inf_K <-x,.> and sup_K <-x,.> = -inf_K <x,.>
        neg = weak_optimize_linear(body, AffineMax(la.mat([la.neg(x)]), la.vec([0])), eps)
        pos = weak_optimize_linear(body, AffineMax(la.mat([x]), la.vec([0])), eps)
        return -la.frac(neg.value), -la.frac(pos.value)

    def membership(x, eps):
        # x in f conv{K,-K}* iff max(sup_K <x,.>, sup_K <-x,.>) <= f
        sup_pos, sup_neg = support_pair(la.vec(x), la.frac(eps) / 2)
        return 1 if max(sup_pos, sup_neg) <= factor else 0

    return BodyOracle(cert, membership, None, None, body.dimension, symmetric=True)


# -- centroid and inertial estimation ------------------------------------------

@dataclass
class CentroidEstimate:
    ok: bool
    point: Optional[la.Vec] = None
    certificate: Optional[CenteringCertificate] = None


def estimate_centroid(body: BodyOracle, rng: RngState, delta: float = 0.1,
                      samples: Optional[int] = None,
                      burn_in: Optional[int] = None,
                      thinning: Optional[int] = None) -> CentroidEstimate:
    """Sample mean of the uniform density, gated by 2n membership probes
    at radius 3r/(4(n+1)). FAIL is a value, not an error."""
    n = body.dimension
    r = body.centering.require_r()
    if samples is None:
        samples = max(64, 40 * n)
    pts = hit_and_run_sample(uniform_density(body), rng, burn_in=burn_in,
                             count=samples, thinning=thinning)
    mean = np.array(pts).mean(axis=0)
    b = la.vec([la.frac(float(v)) for v in mean.tolist()])
    probe_r = 3 * r / (4 * (n + 1))
    probe_eps = r / (4 * (n + 1) * _sqrt_upper(n))
    for i in range(n):
        for s in (1, -1):
            p = list(b)
            p[i] = p[i] + s * probe_r
            if body.membership(la.vec(p), probe_eps) != 1:
                return CentroidEstimate(ok=False)
    del delta
    cert = CenteringCertificate(b, r / (2 * (n + 1) * _sqrt_upper(n)),
                                2 * body.centering.R)
    return CentroidEstimate(ok=True, point=b, certificate=cert)


def _sqrt_upper(n: int) -> Fraction:
    return la.sqrt_bounds(la.frac(n))[1]


def estimate_inertial_ellipsoid(density: LogconcaveDensity, rng: RngState,
                                delta: float = 0.1,
                                eps: Optional[float] = None,
                                count: Optional[int] = None,
                                burn_in: Optional[int] = None,
                                thinning: Optional[int] = None) -> Ellipsoid:
    """E(A) with A the inverse empirical covariance of the density."""
    n = density.body.dimension
    if eps is None:
        eps = 1.0 / n
    est = estimate_moments(density, rng, eps=eps, delta=delta, count=count,
                           burn_in=burn_in, thinning=thinning)
    return Ellipsoid(est.inverse_covariance_rational())


def m_gen(body: BodyOracle, rng: RngState,
          moment_eps: Optional[float] = None,
          moment_count: Optional[int] = None,
          burn_in: Optional[int] = None,
          thinning: Optional[int] = None) -> Ellipsoid:
    """Candidate M-ellipsoid: sqrt(n) times the estimated inertial
    ellipsoid of the uniform density tilted by a random vector from
    n conv{K,-K}*. The caller must have the body approximately centered."""
    n = body.dimension
    polar = scaled_polar_oracle(body, la.frac(n))
    s_pts = hit_and_run_sample(uniform_density(polar), rng, burn_in=burn_in,
                               count=1, thinning=thinning)
    s = s_pts[0]
    density = LogconcaveDensity(body=body, reweight=s)
    inertial = estimate_inertial_ellipsoid(density, rng, eps=moment_eps,
                                           count=moment_count, burn_in=burn_in,
                                           thinning=thinning)
    # sqrt(n) E(A) = E(A / n)
    return Ellipsoid(la.mat_scale(inertial.shape, la.frac(1, n)))


@dataclass
class MEllipsoidConfig:
    h_primal: float = H_PRIMAL_DEFAULT
    h_dual: float = H_DUAL_DEFAULT
    max_restarts: int = 20
    moment_eps: Optional[float] = None
    moment_count: Optional[int] = None
    burn_in: Optional[int] = None
    thinning: Optional[int] = None
    centroid_samples: Optional[int] = None


@dataclass
class MEllipsoidResult:
    ellipsoid: Ellipsoid            # covering ellipsoid, centered at the centroid shift
    center: la.Vec                  # the centroid estimate b
    covering: Covering              # K <= translates + (1+1/n) E (translates include b)
    dual_covering: Covering         # (K-K)* <= translates + (1+1/n) E*
    attempts: int
    budgets: dict


def m_ellipsoid(body: BodyOracle, rng: RngState,
                config: MEllipsoidConfig = MEllipsoidConfig()) -> MEllipsoidResult:
    """Generate-and-certify loop; restarts on centroid failure or on
    either covering budget being exceeded."""
    n = body.dimension
    for attempt in range(1, config.max_restarts + 1):
        stream = rng.spawn(attempt)
        est = estimate_centroid(body, stream, samples=config.centroid_samples,
                                burn_in=config.burn_in, thinning=config.thinning)
        if not est.ok:
            continue
        # symmetric bodies have centroid exactly 0; keep gauges exact
        if body.symmetric:
            shift = la.zeros(n)
            centered = body
        else:
            shift = est.point
            centered = shifted_body(body, shift)
        try:
            candidate = m_gen(centered, stream, moment_eps=config.moment_eps,
                              moment_count=config.moment_count,
                              burn_in=config.burn_in, thinning=config.thinning)
        except (DegenerateCovariance, LineSearchFailure, NotPositiveDefinite):
            continue
        primal_budget = CoverBudget(config.h_primal, n)
        primal = build_cover(centered, candidate, primal_budget)
        if primal.exceeded:
            continue
        dual_budget = CoverBudget(config.h_dual, n)
        width_body = width_norm_body(body)
        try:
            polar_candidate = Ellipsoid(la.inverse(candidate.shape))
        except NotPositiveDefinite:
            continue
        dual = build_cover(width_body, polar_candidate, dual_budget)
        if dual.exceeded:
            continue
        covering = primal.covering
        if any(c != 0 for c in shift):
            covering = Covering(
                ellipsoid=covering.ellipsoid, box=covering.box,
                translates=[la.add(t, shift) for t in covering.translates],
                translate_coords=covering.translate_coords, slack=covering.slack)
        return MEllipsoidResult(
            ellipsoid=Ellipsoid(candidate.shape, shift),
            center=shift, covering=covering, dual_covering=dual.covering,
            attempts=attempt,
            budgets={"primal_hard_cap": primal_budget.hard_cap,
                     "dual_hard_cap": dual_budget.hard_cap,
                     "primal_tiles": primal.tiles_seen,
                     "dual_tiles": dual.tiles_seen})
    raise RestartBudgetExceeded(f"no certificate after {config.max_restarts} restarts")


def covering_for_body(body: BodyOracle, rng: Optional[RngState] = None,
                      h: Optional[float] = None,
                      config: MEllipsoidConfig = MEllipsoidConfig()) -> Covering:
    """Session covering used by the general-norm solvers.

    Bodies with an analytic M-ellipsoid use it deterministically. Other
    bodies use the deterministic rounding route when no rng is supplied
    (sandwich ellipsoid scaled to the geometric mean), or the full
    randomized pipeline when an rng is given.
    """
    n = body.dimension
    hint = getattr(body, "m_ellipsoid_hint", None)
    if hint is not None:
        budget = CoverBudget(h if h is not None else H_PRIMAL_DEFAULT, n)
        result = build_cover(body, hint, budget)
        if result.exceeded:
            raise RestartBudgetExceeded("analytic M-ellipsoid failed its budget")
        return result.covering
    if rng is not None:
        return m_ellipsoid(body, rng, config).covering
    from .convexopt import gls_round
    rounding = gls_round(body, la.frac(1, 10**6))
    kappa = (n + 1) * math.sqrt(n)
    # scale the outer ellipsoid down to the geometric mean of the sandwich
    shape = la.snap_mat(la.mat_scale(rounding.ellipsoid.shape, la.snap(kappa, 12)))
    shape = tuple(tuple((shape[i][j] + shape[j][i]) / 2 for j in range(n)) for i in range(n))
    cover_ell = Ellipsoid(shape)
    if h is None:
        h = max(1.0, 3.0 * math.sqrt(kappa * n))
    result = build_cover(body, cover_ell, CoverBudget(h, n))
    if result.exceeded:
        raise RestartBudgetExceeded("rounding-based covering exceeded its budget")
    return result.covering
