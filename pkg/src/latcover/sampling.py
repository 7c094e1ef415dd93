"""Hit-and-run sampling of exponentially reweighted densities on convex
bodies, plus empirical moment estimation.

Mixing here is heuristic: burn-in and thinning defaults are desk-scale
knobs, not certified total-variation bounds. Determinism is strict:
identical (instance, seed, burn-in, count) produces bit-identical
points, which the acceptance suite relies on.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import linalg as la
from .bodies import BodyOracle
from .ellipsoid import Ellipsoid
from .errors import DegenerateCovariance, LineSearchFailure


@dataclass
class RngState:
    """Seeded, platform-stable random stream (PCG64)."""

    seed: int
    counter: int = 0
    _gen: np.random.Generator = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        if self._gen is None:
            self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def normal(self, n: int) -> np.ndarray:
        self.counter += 1
        return self._gen.standard_normal(n)

    def uniform(self) -> float:
        self.counter += 1
        return float(self._gen.random())

    def spawn(self, tag: int) -> "RngState":
        """Independent stream derived from (seed, tag); used by restart loops."""
        return RngState(seed=(self.seed * 0x9E3779B1 + tag) % (2**63))


@dataclass(frozen=True)
class LogconcaveDensity:
    """Density proportional to exp(<reweight, x>) on the body, 0 outside."""

    body: BodyOracle
    reweight: tuple = ()

    def __post_init__(self):
        if not self.reweight:
            object.__setattr__(self, "reweight", (0.0,) * self.body.dimension)
        if len(self.reweight) != self.body.dimension:
            raise ValueError("reweight dimension mismatch")

    @property
    def is_uniform(self) -> bool:
        return all(float(s) == 0.0 for s in self.reweight)


def uniform_density(body: BodyOracle) -> LogconcaveDensity:
    return LogconcaveDensity(body=body)


def _chord(body: BodyOracle, x: np.ndarray, u: np.ndarray, eps: Fraction):
    """Intersection interval [lo, hi] of the line x + t u with the body.

    Uses the body's analytic chord solver when present; otherwise bisects
    the weak membership oracle to relative width 1e-9 within the (r, R)
    shell bound."""
    del eps  # slack folded into the float membership tolerance
    if body.chord_intersect is not None:
        t_lo, t_hi = body.chord_intersect(x, u)
        if t_hi < t_lo or not math.isfinite(t_lo) or not math.isfinite(t_hi):
            raise LineSearchFailure("degenerate chord")
        # tolerate boundary drift: the interval must bracket the current point
        return min(t_lo, 0.0), max(t_hi, 0.0)
    big_r = float(body.centering.R)
    a0 = np.array(la.to_float_vec(body.centering.a0))

    def inside(t: float) -> bool:
        return body.membership_float(x + t * u)

    if not inside(0.0):
        raise LineSearchFailure("hit-and-run state left the body")
    span = 2 * big_r + float(np.linalg.norm(x - a0)) + 1.0

    def boundary(sign: float) -> float:
        lo, hi = 0.0, span
        if inside(sign * hi):
            return sign * hi  # numerically flat chord; accept the shell bound
        for _ in range(48):
            mid = (lo + hi) / 2
            if inside(sign * mid):
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-9 * max(1.0, hi):
                break
        return sign * lo

    t_hi = boundary(1.0)
    t_lo = boundary(-1.0)
    if t_hi <= t_lo:
        raise LineSearchFailure("degenerate chord")
    return t_lo, t_hi


def _sample_exp_on_interval(c: float, lo: float, hi: float, unif: float) -> float:
    """Inverse-CDF sample of density exp(c t) on [lo, hi]."""
    if abs(c) * (hi - lo) < 1e-12:
        return lo + unif * (hi - lo)
    # t = lo + log(1 + U (exp(c (hi-lo)) - 1)) / c, stabilized
    w = c * (hi - lo)
    if w > 0:
        # sample from the right tail without overflow
        log_term = w + math.log(unif + (1 - unif) * math.exp(-w))
        return lo + log_term / c
    log_term = math.log1p(unif * math.expm1(w))
    return lo + log_term / c


def hit_and_run_sample(density: LogconcaveDensity, rng: RngState,
                       burn_in: Optional[int] = None, count: int = 1,
                       thinning: Optional[int] = None):
    """Draw `count` points from the density by hit-and-run.

    Defaults: burn_in = 1000 n^2 steps, thinning = 10 n steps between
    retained samples. Points are returned as float tuples; all are
    membership-verified at slack r * 1e-6.
    """
    body = density.body
    n = body.dimension
    if burn_in is None:
        burn_in = 1000 * n * n
    if thinning is None:
        thinning = 10 * n
    eps = la.frac(float(body.centering.require_r()) * 1e-6)
    s = np.array([float(v) for v in density.reweight])
    x = np.array(la.to_float_vec(body.centering.a0))
    out = []
    steps_until_keep = burn_in
    kept = 0
    while kept < count:
        u = rng.normal(n)
        norm = float(np.linalg.norm(u))
        if norm < 1e-12:
            continue
        u = u / norm
        lo, hi = _chord(body, x, u, eps)
        c = float(s @ u)
        t = _sample_exp_on_interval(c, lo, hi, rng.uniform())
        x = x + t * u
        if steps_until_keep > 0:
            steps_until_keep -= 1
            continue
        out.append(tuple(x.tolist()))
        kept += 1
        steps_until_keep = thinning
    return out


@dataclass
class MomentEstimate:
    mean: tuple
    second_moment: tuple      # covariance matrix rows
    relative_error: float
    sample_count: int

    def covariance_matrix(self) -> np.ndarray:
        return np.array(self.second_moment, dtype=float)

    def inverse_covariance_rational(self) -> la.Mat:
        """Exact rational inverse of the (rationalized) covariance; raises
        DegenerateCovariance if not PD."""
        cov = la.mat(self.second_moment)
        sym = tuple(tuple((cov[i][j] + cov[j][i]) / 2 for j in range(len(cov)))
                    for i in range(len(cov)))
        try:
            la.ldlt(sym)
        except Exception as exc:
            raise DegenerateCovariance(str(exc)) from exc
        return la.inverse(sym)


def estimate_moments(density: LogconcaveDensity, rng: RngState, eps: float,
                     delta: float = 0.1, sample_constant: int = 50,
                     burn_in: Optional[int] = None,
                     thinning: Optional[int] = None,
                     count: Optional[int] = None) -> MomentEstimate:
    """Empirical mean and covariance from N = ceil(C n^2 / eps^2) samples
    (or an explicit count override).

    delta only scales the sample count logarithmically; concentration at
    desk scale is validated by the analytic-body tests, not certified.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0,1)")
    n = density.body.dimension
    if count is None:
        count = math.ceil(sample_constant * n * n / (eps * eps))
    count = max(count, 16)
    pts = hit_and_run_sample(density, rng, burn_in=burn_in, count=count,
                             thinning=thinning)
    arr = np.array(pts)
    mean = arr.mean(axis=0)
    centered = arr - mean
    cov = (centered.T @ centered) / len(arr)
    cov = (cov + cov.T) / 2
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise DegenerateCovariance("empirical covariance is not PD") from exc
    del delta
    return MomentEstimate(mean=tuple(mean.tolist()),
                          second_moment=tuple(map(tuple, cov.tolist())),
                          relative_error=eps, sample_count=len(arr))


def inertial_ellipsoid_from_moments(est: MomentEstimate) -> Ellipsoid:
    """E(A) with A = cov^{-1}: the ellipsoid whose gauge is the Mahalanobis
    norm of the estimated density."""
    return Ellipsoid(est.inverse_covariance_rational())
