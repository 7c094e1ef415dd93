"""Oracle-based convex optimization: cutting planes, rounding, slices.

weak_optimize_linear minimizes an affine-max function over a body via
the central-cut ellipsoid method driven by the body's strong separation
oracle. gls_round is the shallow-cut variant producing either a tiny
enclosing ellipsoid or a sandwich certificate. slice_separation builds
the oracle of a hyperplane section in the section's own coordinates.

The ellipsoid iterations run in 64-bit floats; results are converted to
exact rationals only at the boundary. Accuracy guarantees come from the
volume argument, not from exact arithmetic.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import linalg as la
from .bodies import BodyOracle, CenteringCertificate, Separation
from .ellipsoid import Ellipsoid, ellipsoid_volume, unit_ball_volume
from .errors import EmptySlice, IterationBudgetExceeded, RankDeficient


@dataclass(frozen=True)
class AffineMax:
    """f(x) = max_i (<rows[i], x> + consts[i]), the objective class the
    cutting-plane solver accepts."""

    rows: la.Mat
    consts: la.Vec

    def __post_init__(self):
        if len(self.rows) != len(self.consts):
            raise ValueError("rows/consts length mismatch")
        object.__setattr__(self, "_rf", np.array(la.to_float_mat(self.rows)))
        object.__setattr__(self, "_cf", np.array(la.to_float_vec(self.consts)))

    def value(self, x) -> float:
        return float(np.max(self._rf @ np.asarray(x, dtype=float) + self._cf))

    def argmax_row(self, x) -> int:
        return int(np.argmax(self._rf @ np.asarray(x, dtype=float) + self._cf))

    def gradient_row_float(self, x) -> np.ndarray:
        return self._rf[self.argmax_row(x)]

    def gradient_bound(self) -> float:
        return float(np.max(np.linalg.norm(self._rf, axis=1)))


def linear_objective(direction) -> AffineMax:
    return AffineMax(rows=la.mat([direction]), consts=la.vec([0]))


@dataclass
class WeakOptimum:
    value: Fraction          # omega with |omega - inf_K f| <= eps
    witness: tuple           # float point in K^eps with f(witness) <= omega + eps
    iterations: int


def weak_optimize_linear(body: BodyOracle, objective: AffineMax, eps,
                         max_iterations: Optional[int] = None) -> WeakOptimum:
    """Minimize an affine-max function over the body within eps.

    Central-cut ellipsoid method: separation cuts while the center is
    outside K, objective subgradient cuts while inside. A point with
    value below the incumbent is never discarded, so once the ellipsoid
    volume drops below the volume of the guaranteed flat ball around the
    optimum, the incumbent is eps-close to the infimum.
    """
    eps_f = float(eps)
    if eps_f <= 0:
        raise ValueError("eps must be positive")
    sep = body.require_separation()
    cert = body.centering
    n = body.dimension
    r = float(cert.require_r())
    big_r = float(cert.R)
    if n == 1:
        return _optimize_interval(body, objective, eps_f)

    grad = objective.gradient_bound()
    if grad == 0.0:
        val = la.frac(float(max(objective.consts)))
        return WeakOptimum(value=val, witness=tuple(la.to_float_vec(cert.a0)), iterations=0)

    # flat ball radius around the optimum on which f <= inf + eps/2
    rho = min(big_r, r * eps_f / (4 * grad * big_r))
    needed = int(2 * n * (n + 1) * math.log(max(2.0, 2 * big_r / rho))) + 8
    budget = max_iterations if max_iterations is not None else needed
    sep_f = getattr(body, "separation_float", None)
    center = np.array(la.to_float_vec(cert.a0))
    q = np.eye(n) * big_r * big_r
    best_val = math.inf
    best_pt = None
    it = 0
    while it < budget:
        it += 1
        if sep_f is not None:
            inside, direction = sep_f(center)
        else:
            answer = sep(la.vec(center.tolist()))
            inside = answer.inside
            direction = None if inside else np.array(la.to_float_vec(answer.direction))
        if inside:
            val = objective.value(center)
            if val < best_val:
                best_val = val
                best_pt = center.copy()
            g = objective.gradient_row_float(center)
        else:
            g = direction
        gq = q @ g
        denom = float(g @ gq)
        if denom <= 0:
            break  # ellipsoid collapsed numerically
        step = gq / math.sqrt(denom)
        center = center - step / (n + 1)
        q = (n * n / (n * n - 1.0)) * (q - (2.0 / (n + 1)) * np.outer(step, step))
        q = (q + q.T) / 2
        if best_pt is not None and _volume_of(q, n) < unit_ball_volume(n) * rho**n:
            break
    else:
        if best_pt is None or max_iterations is not None:
            raise IterationBudgetExceeded(
                f"cutting-plane loop hit {budget} iterations")
    if best_pt is None:
        raise IterationBudgetExceeded("no feasible center found")
    return WeakOptimum(value=la.frac(best_val), witness=tuple(best_pt.tolist()),
                       iterations=it)


def _volume_of(q: np.ndarray, n: int) -> float:
    sign, logdet = np.linalg.slogdet(q)
    if sign <= 0:
        return 0.0
    return unit_ball_volume(n) * math.exp(logdet / 2)


def _optimize_interval(body: BodyOracle, objective: AffineMax, eps_f: float) -> WeakOptimum:
    """1-D special case: bracket K by bisection, minimize the convex
    piecewise-linear objective by ternary search."""
    sep = body.require_separation()
    a0 = float(body.centering.a0[0])
    big_r = float(body.centering.R)

    def feasible(x):
        return sep(la.vec([la.frac(x)])).inside

    lo_out, hi_out = a0 - big_r, a0 + big_r
    if not feasible(a0):
        raise IterationBudgetExceeded("interval anchor infeasible")
    lo_in = hi_in = a0
    for _ in range(80):
        m = (lo_out + lo_in) / 2
        if feasible(m):
            lo_in = m
        else:
            lo_out = m
    for _ in range(80):
        m = (hi_out + hi_in) / 2
        if feasible(m):
            hi_in = m
        else:
            hi_out = m
    lo, hi = lo_in, hi_in
    for _ in range(200):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if objective.value([m1]) <= objective.value([m2]):
            hi = m2
        else:
            lo = m1
    x = (lo + hi) / 2
    del eps_f
    return WeakOptimum(value=la.frac(objective.value([x])), witness=(x,), iterations=360)


# -- shallow-cut rounding -----------------------------------------------------

@dataclass
class GlsOutcome:
    kind: str               # "small_volume" | "sandwich"
    ellipsoid: Ellipsoid    # K <= E + t always; sandwich adds E/((n+1)sqrt(n)) + t <= K
    volume: float
    iterations: int

    @property
    def center(self) -> la.Vec:
        return self.ellipsoid.center


def gls_round(body: BodyOracle, eps, max_iterations: Optional[int] = None) -> GlsOutcome:
    """Shallow-cut ellipsoid rounding of a circumscribed body.

    Returns small_volume once vol(E) <= eps, or sandwich when the 2n
    axis probes at depth 1/(n+1) all lie in K (their convex hull then
    contains E/((n+1)sqrt(n)) around the center). K <= E + t holds in
    every outcome because every cut keeps a superset of K.
    """
    sep = body.require_separation()
    n = body.dimension
    eps_f = float(eps)
    big_r = float(body.centering.R)
    if n == 1:
        return _gls_interval(body, eps_f)
    budget = max_iterations if max_iterations is not None else (
        int(20 * n * n * math.log(max(2.0, big_r * n / eps_f))) + 16)
    center = np.array(la.to_float_vec(body.centering.a0))
    q = np.eye(n) * big_r * big_r
    it = 0
    while True:
        vol = _volume_of(q, n)
        if vol <= eps_f:
            return GlsOutcome("small_volume", _to_ellipsoid(q, center), vol, it)
        cut = _find_violated_probe(sep, center, q, n,
                                   sep_f=getattr(body, "separation_float", None))
        if cut is None:
            # the shallow-cut loop has stalled at a sandwich; a support-box
            # pass may still certify the small-volume answer for thin bodies
            tightened = _support_box_ellipsoid(body, q, center)
            if tightened is not None:
                tvol = ellipsoid_volume(tightened)
                if tvol <= eps_f:
                    return GlsOutcome("small_volume", tightened, tvol, it)
            return GlsOutcome("sandwich", _to_ellipsoid(q, center), vol, it)
        if it >= budget:
            raise IterationBudgetExceeded(f"rounding hit {budget} iterations")
        it += 1
        g, level = cut
        gq = q @ g
        denom = float(g @ gq)
        if denom <= 0:
            return GlsOutcome("small_volume", _to_ellipsoid(q, center), vol, it)
        sdenom = math.sqrt(denom)
        # cut keeps {<g,x> <= level}; the update formulas use the depth
        # alpha with the plane written as <g,x> <= <g,c> - alpha sqrt(g'Qg)
        alpha = (float(g @ center) - level) / sdenom
        alpha = max(-1.0 / (n + 1), min(alpha, 1.0 / (n + 1)))
        tau = (1 + n * alpha) / (n + 1)
        delta = (n * n / (n * n - 1.0)) * (1 - alpha * alpha)
        sigma = 2 * (1 + n * alpha) / ((n + 1) * (1 + alpha))
        step = gq / sdenom
        center = center - tau * step
        q = delta * (q - sigma * np.outer(step, step))
        q = (q + q.T) / 2


def _find_violated_probe(sep, center: np.ndarray, q: np.ndarray, n: int,
                         sep_f=None):
    """Probe the center and the 2n shallow axis points; return the cut
    (direction, support level) of the first point outside K."""
    def ask(p):
        if sep_f is not None:
            return sep_f(p)
        answer = sep(la.vec(p.tolist()))
        if answer.inside:
            return True, None
        return False, np.array(la.to_float_vec(answer.direction))

    inside, g = ask(center)
    if not inside:
        return g, float(g @ center)
    w, v = np.linalg.eigh(q)
    w = np.maximum(w, 0.0)
    for i in range(n):
        axis = math.sqrt(w[i]) * v[:, i]
        for s in (1.0, -1.0):
            p = center + s * axis / (n + 1)
            inside, g = ask(p)
            if not inside:
                return g, float(g @ p)
    return None


def _support_box_ellipsoid(body: BodyOracle, q: np.ndarray,
                           center: np.ndarray) -> Optional[Ellipsoid]:
    """Circumscribed ellipsoid from the support box of K in the working
    ellipsoid's eigenbasis: the sqrt(n)-scaled box ellipsoid. Needs the
    support values, obtained by weak optimization over K."""
    n = len(q)
    try:
        w, v = np.linalg.eigh(q)
    except np.linalg.LinAlgError:
        return None
    spans = []
    mids = []
    for i in range(n):
        direction = la.vec([la.frac(x) for x in v[:, i].tolist()])
        try:
            lo = weak_optimize_linear(body, linear_objective(direction),
                                      la.frac(1, 10**6))
            hi = weak_optimize_linear(body, linear_objective(la.neg(direction)),
                                      la.frac(1, 10**6))
        except (IterationBudgetExceeded, ValueError):
            return None  # no inner-radius certificate; skip the tightening
        sup = -float(hi.value) + 1e-6
        inf = float(lo.value) - 1e-6
        mids.append((sup + inf) / 2)
        spans.append(max((sup - inf) / 2, 1e-12))
    # box half-widths h_i around the box center: ellipsoid sum (x_i/h_i)^2 <= n
    shape = v @ np.diag([1.0 / (n * h * h) for h in spans]) @ v.T
    new_center = v @ np.array(mids)
    return _to_ellipsoid(np.linalg.inv((shape + shape.T) / 2), new_center)


def _to_ellipsoid(q: np.ndarray, center: np.ndarray) -> Ellipsoid:
    n = len(q)
    shape = la.mat(np.linalg.inv(q).tolist())
    sym = tuple(tuple((shape[i][j] + shape[j][i]) / 2 for j in range(n)) for i in range(n))
    return Ellipsoid(sym, la.vec([la.frac(c) for c in center.tolist()]))


def _gls_interval(body: BodyOracle, eps_f: float) -> GlsOutcome:
    sep = body.require_separation()
    a0 = float(body.centering.a0[0])
    big_r = float(body.centering.R)

    def feasible(x):
        return sep(la.vec([la.frac(x)])).inside

    if not feasible(a0):
        # shrink towards nothing; report a tiny enclosing interval around a0
        lo_out, hi_out = a0 - big_r, a0 + big_r
        # K is somewhere inside; bisect both sides against the separator sign
        for _ in range(200):
            m = (lo_out + hi_out) / 2
            ans = sep(la.vec([la.frac(m)]))
            if ans.inside:
                a0 = m
                break
            if float(ans.direction[0]) > 0:
                hi_out = m
            else:
                lo_out = m
        else:
            half = max((hi_out - lo_out) / 2, eps_f / 8)
            e = Ellipsoid(la.mat([[la.frac(1 / (half * half))]]),
                          la.vec([la.frac((lo_out + hi_out) / 2)]))
            return GlsOutcome("small_volume", e, 2 * half, 400)
    lo_in = hi_in = a0
    lo_out, hi_out = a0 - big_r, a0 + big_r
    for _ in range(100):
        m = (lo_out + lo_in) / 2
        if feasible(m):
            lo_in = m
        else:
            lo_out = m
    for _ in range(100):
        m = (hi_out + hi_in) / 2
        if feasible(m):
            hi_in = m
        else:
            hi_out = m
    mid = (lo_out + hi_out) / 2
    half = (hi_out - lo_out) / 2
    e = Ellipsoid(la.mat([[la.frac(1 / (half * half))]]), la.vec([la.frac(mid)]))
    kind = "small_volume" if 2 * half <= eps_f else "sandwich"
    return GlsOutcome(kind, e, 2 * half, 400)


# -- hyperplane slices --------------------------------------------------------

@dataclass
class SliceFrame:
    """Affine chart of {x : Ax = b}: x = origin + F c with F near-orthonormal
    rational columns spanning the lineality space."""

    origin: la.Vec
    frame_cols: list        # rational columns
    gram_inv: la.Mat        # (F^t F)^{-1}, cached for projections

    def embed(self, c: la.Vec) -> la.Vec:
        x = self.origin
        for col, ci in zip(self.frame_cols, la.vec(c), strict=True):
            x = la.add(x, la.scale(col, ci))
        return x

    def project(self, x: la.Vec) -> la.Vec:
        ft_x = la.vec([la.dot(col, x) for col in self.frame_cols])
        return la.matvec(self.gram_inv, ft_x)

    def pull_direction(self, g: la.Vec) -> la.Vec:
        return la.vec([la.dot(col, g) for col in self.frame_cols])


def subspace_frame(cols) -> list:
    """Orthogonal rational columns scaled to within ~1e-9 of unit length."""
    ortho, _ = la.gram_schmidt([la.vec(c) for c in cols])
    out = []
    for g in ortho:
        norm = math.sqrt(float(la.norm_sq(g)))
        out.append(la.scale(g, la.frac(1.0 / norm)))
    return out


def kernel_basis(a_rows: la.Mat) -> list:
    """Rational basis of {x : A x = 0}."""
    n = len(a_rows[0])
    rows = [list(r) for r in a_rows]
    pivots = []
    rk = 0
    for col in range(n):
        piv = next((r for r in range(rk, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = 1 / rows[rk][col]
        rows[rk] = [x * inv for x in rows[rk]]
        for r in range(len(rows)):
            if r != rk and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rk])]
        pivots.append(col)
        rk += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [la.ZERO] * n
        v[fc] = la.ONE
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(la.vec(v))
    return basis


def affine_solution(a_rows: la.Mat, b: la.Vec) -> la.Vec:
    """Any rational solution of A x = b; raises EmptySlice if inconsistent."""
    m, n = len(a_rows), len(a_rows[0])
    aug = [list(r) + [bi] for r, bi in zip(a_rows, b, strict=True)]
    pivots = []
    rk = 0
    for col in range(n):
        piv = next((r for r in range(rk, m) if aug[r][col] != 0), None)
        if piv is None:
            continue
        aug[rk], aug[piv] = aug[piv], aug[rk]
        inv = 1 / aug[rk][col]
        aug[rk] = [x * inv for x in aug[rk]]
        for r in range(m):
            if r != rk and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[rk])]
        pivots.append(col)
        rk += 1
    for r in range(rk, m):
        if aug[r][n] != 0:
            raise EmptySlice("hyperplane system is inconsistent")
    x = [la.ZERO] * n
    for i, pc in enumerate(pivots):
        x[pc] = aug[i][n]
    return la.vec(x)


def slice_separation(body: BodyOracle, a_rows: la.Mat, b: la.Vec):
    """Oracle for K intersect {Ax=b} in the slice's own coordinates.

    Returns (oracle, frame). Separating directions are the projections
    of the parent separators onto the lineality space; a vanishing
    projection certifies emptiness (EmptySlice raised at query time).
    Construction raises EmptySlice when the subspace misses the
    circumscribing ball entirely.
    """
    a_rows = la.mat(a_rows)
    b = la.vec(b)
    origin0 = affine_solution(a_rows, b)
    kern = kernel_basis(a_rows)
    if not kern:
        raise RankDeficient("hyperplane system has a unique point; slice is 0-dimensional")
    frame_cols = subspace_frame(kern)
    gram = la.gram(frame_cols)
    frame = SliceFrame(origin=origin0, frame_cols=frame_cols, gram_inv=la.inverse(gram))
    # re-anchor the origin at the projection of the parent center onto H
    c0 = frame.project(la.sub(body.centering.a0, origin0))
    origin = frame.embed(c0)
    frame = SliceFrame(origin=origin, frame_cols=frame_cols, gram_inv=frame.gram_inv)

    dist_sq = la.norm_sq(la.sub(body.centering.a0, origin))
    big_r_sq = body.centering.R * body.centering.R - dist_sq
    if big_r_sq <= 0:
        raise EmptySlice("hyperplane misses the circumscribing ball")
    # conservative scaling: frame columns are within 1e-9 of unit norm
    big_r = la.sqrt_bounds(big_r_sq)[1] * la.frac(1 + 1e-6)
    k = len(frame_cols)
    cert = CenteringCertificate(la.zeros(k), None, big_r)

    origin_f = np.array(la.to_float_vec(origin))
    frame_f = np.array(la.to_float_mat(la.from_columns(frame_cols)))

    def membership(c, eps):
        return body.membership(frame.embed(c), eps)

    def membership_float(cs):
        return body.membership_float(origin_f + frame_f @ np.asarray(cs, dtype=float))

    separation = None
    if body.separation is not None:
        parent_sep = body.separation

        def separation(c):  # noqa: F811
            ans = parent_sep(frame.embed(c))
            if ans.inside:
                return Separation(True)
            g = frame.pull_direction(ans.direction)
            if all(x == 0 for x in g):
                raise EmptySlice("separator orthogonal to the slice")
            return Separation(False, g)

    oracle = BodyOracle(cert, membership, None, separation, dimension=k,
                        membership_float=membership_float)
    if body.chord_intersect is not None:
        parent_chord = body.chord_intersect
        oracle.chord_intersect = lambda c, d: parent_chord(
            origin_f + frame_f @ np.asarray(c, dtype=float),
            frame_f @ np.asarray(d, dtype=float))
    return oracle, frame
