"""Integer-programming feasibility by recursive hyperplane branching.

The recursion follows the classical fixed-dimension pattern: refine the
basis against the circumscribed radius, localize the body with the
shallow-cut rounding algorithm, then either use the rounding ellipsoid's
dual shortest vector (tiny-volume case) or an exact general-norm SVP on
the width-norm ball (sandwich case) to pick a thin direction, and branch
over the few lattice hyperplanes orthogonal to it.

Bodies are carried through the recursion as exact objects (H-polytopes
and quadrics) so slicing, support functions, and width norms stay
rational; the oracle view is materialized only where the rounding and
optimization subroutines need it.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import linalg as la
from .bodies import (BodyOracle, CenteringCertificate, ConcreteBody,
                     EllipsoidBody, LpBall, PolytopeBody, Separation,
                     _vertices)
from .convexopt import gls_round, subspace_frame
from .ellipsoid import Ellipsoid
from .errors import BudgetExceeded, EmptySlice, RankDeficient
from .lattice import LatticeBasis, lll_reduce
from .mellip import WidthNormBody, scaled_ellipsoid_covering
from .solvers import EnumSession, shortest_vectors
from .voronoi import EnumCap, InnerProduct, L2Engine, euclidean


# -- exact body carriers -------------------------------------------------------

class PolytopeCarrier:
    """{x : A x <= b}, no interior-origin requirement; bounded assumed."""

    def __init__(self, a_rows: la.Mat, b: la.Vec):
        self.a_rows = la.mat(a_rows)
        self.b = la.vec(b)
        self.dimension = len(self.a_rows[0]) if self.a_rows else 0
        self._verts = None

    @property
    def vertices(self):
        if self._verts is None:
            self._verts = _vertices(self.a_rows, self.b)
        return self._verts

    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def membership(self, x: la.Vec) -> bool:
        return all(la.dot(r, x) <= bi for r, bi in zip(self.a_rows, self.b))

    def separation(self, x: la.Vec) -> Separation:
        slack = [la.dot(r, x) - bi for r, bi in zip(self.a_rows, self.b)]
        worst = max(range(len(slack)), key=lambda i: slack[i])
        if slack[worst] <= 0:
            return Separation(True)
        return Separation(False, self.a_rows[worst])

    def support_bounds(self, y: la.Vec):
        """Exact (inf, sup) of <y, x> over the polytope."""
        vals = [la.dot(y, v) for v in self.vertices]
        return min(vals), max(vals)

    def center_and_radius(self):
        verts = self.vertices
        c = verts[0]
        for v in verts[1:]:
            c = la.add(c, v)
        c = la.scale(c, la.frac(1, len(verts)))
        r_sq = max(la.norm_sq(la.sub(v, c)) for v in verts)
        return c, la.sqrt_bounds(r_sq)[1]

    def slice(self, origin: la.Vec, frame_cols) -> "PolytopeCarrier":
        """Substitute x = origin + F c."""
        new_rows = []
        new_b = []
        for r, bi in zip(self.a_rows, self.b):
            new_rows.append(tuple(la.dot(r, col) for col in frame_cols))
            new_b.append(bi - la.dot(r, origin))
        return PolytopeCarrier(la.mat(new_rows), la.vec(new_b))

    def width_body(self, inner_r: Fraction, outer_r: Fraction) -> ConcreteBody:
        return WidthNormBody(self.vertices, outer_r, inner_r)

    def oracle_view(self) -> BodyOracle:
        c, big_r = self.center_and_radius()
        cert = CenteringCertificate(c, None, big_r)
        return BodyOracle(cert,
                          membership=lambda x, eps: 1 if self.membership(la.vec(x)) else 0,
                          separation=lambda x: self.separation(la.vec(x)),
                          dimension=self.dimension)


class QuadricCarrier:
    """{x : (x - m)^t M (x - m) <= rho} with M PD rational."""

    def __init__(self, m_mat: la.Mat, center: la.Vec, rho: Fraction):
        self.m_mat = la.mat(m_mat)
        self.center = la.vec(center)
        self.rho = la.frac(rho)
        self.dimension = len(self.m_mat)
        la.ldlt(self.m_mat)

    def is_empty(self) -> bool:
        return self.rho < 0

    def membership(self, x: la.Vec) -> bool:
        d = la.sub(x, self.center)
        return la.quadratic_form(self.m_mat, d) <= self.rho

    def separation(self, x: la.Vec) -> Separation:
        d = la.sub(x, self.center)
        if la.quadratic_form(self.m_mat, d) <= self.rho:
            return Separation(True)
        return Separation(False, la.matvec(self.m_mat, d))

    def support_bounds(self, y: la.Vec):
        # sup = <y, m> + sqrt(rho * y^t M^{-1} y); conservative enclosure
        mid = la.dot(y, self.center)
        q = self.rho * la.quadratic_form(la.inverse(self.m_mat), y)
        if q < 0:
            return mid, mid
        lo, hi = la.sqrt_bounds(q)
        return mid - hi, mid + hi

    def center_and_radius(self):
        if self.rho < 0:
            return self.center, la.ONE
        _, diag = la.ldlt(self.m_mat)
        del diag
        import numpy as np
        w = np.linalg.eigvalsh(np.array(la.to_float_mat(self.m_mat)))
        r_sq = la.frac(float(self.rho) / max(float(w[0]), 1e-300) * (1 + 1e-9))
        return self.center, la.sqrt_bounds(r_sq)[1]

    def slice(self, origin: la.Vec, frame_cols) -> "QuadricCarrier":
        """Substitute x = origin + F c: quadratic re-centers at the
        projected center with rho reduced by the off-subspace part."""
        f_mat = la.from_columns(list(frame_cols))
        ft = la.transpose(f_mat)
        m_new = la.matmul(ft, la.matmul(self.m_mat, f_mat))
        d0 = la.sub(origin, self.center)
        # minimize (d0 + F c)^t M (d0 + F c): c* = -(F^t M F)^{-1} F^t M d0
        rhs = la.matvec(ft, la.matvec(self.m_mat, d0))
        c_star = la.solve(m_new, la.neg(rhs))
        base = la.quadratic_form(self.m_mat, la.add(d0, la.matvec(f_mat, c_star)))
        return QuadricCarrier(m_new, c_star, self.rho - base)

    def width_body(self, inner_r, outer_r) -> ConcreteBody:
        del inner_r, outer_r
        if self.rho <= 0:
            raise EmptySlice("width body of an empty quadric")
        shape = la.mat_scale(la.inverse(self.m_mat), 4 * self.rho)
        return EllipsoidBody(Ellipsoid(la.inverse(shape)))

    def oracle_view(self) -> BodyOracle:
        c, big_r = self.center_and_radius()
        cert = CenteringCertificate(c, None, big_r)
        return BodyOracle(cert,
                          membership=lambda x, eps: 1 if self.membership(la.vec(x)) else 0,
                          separation=lambda x: self.separation(la.vec(x)),
                          dimension=self.dimension)


def carrier_from_body(body) -> "PolytopeCarrier | QuadricCarrier":
    """Exact carrier for the concrete bodies the CLI can parse."""
    if isinstance(body, (PolytopeCarrier, QuadricCarrier)):
        return body
    if isinstance(body, PolytopeBody):
        return PolytopeCarrier(body.a_rows, body.b)
    if isinstance(body, EllipsoidBody):
        return QuadricCarrier(body.ellipsoid.shape, body.ellipsoid.center, la.ONE)
    if isinstance(body, LpBall):
        n = body.dimension
        s = body.scale
        if body.p == math.inf:
            rows, rhs = [], []
            for i in range(n):
                e = [la.ZERO] * n
                e[i] = la.ONE
                rows.append(tuple(e))
                rows.append(la.neg(tuple(e)))
                rhs += [s, s]
            return PolytopeCarrier(la.mat(rows), la.vec(rhs))
        if body.p == 2:
            return QuadricCarrier(la.identity(n), la.zeros(n), s * s)
        if body.p == 1:
            import itertools
            rows = [tuple(la.frac(sg) for sg in signs)
                    for signs in itertools.product((1, -1), repeat=n)]
            return PolytopeCarrier(la.mat(rows), la.vec([s] * len(rows)))
    raise ValueError(f"no exact carrier for {type(body).__name__}")


# -- instance / config / result -----------------------------------------------

@dataclass
class IPInstance:
    body: object                 # carrier or concrete body
    lattice: LatticeBasis

    def __post_init__(self):
        self.body = carrier_from_body(self.body)
        if self.lattice.rank != self.lattice.dimension:
            raise RankDeficient("ip needs a full-rank lattice")


def safe_flatness_bound(n: int) -> float:
    """n (n+1) sqrt(n): provable via the rounding sandwich combined with
    the ellipsoidal flatness bound, with no unspecified constants."""
    return n * (n + 1) * math.sqrt(n) if n >= 1 else 1.0


def rudelson_flatness_bound(n: int) -> float:
    """Experimental n^{4/3}-type bound; constants are not pinned down, so
    this mode is opt-in only."""
    return max(1.0, 4.0 * n ** (4.0 / 3.0) * max(1.0, math.log(n + 1)) ** 2)


@dataclass
class FlatnessConfig:
    f_bound: Callable[[int], float] = safe_flatness_bound
    branch_cap: int = 10**5          # total recursion nodes
    depth_cap: Optional[int] = None  # default: starting dimension
    cap: EnumCap = field(default_factory=EnumCap)

    def bound(self, n: int) -> float:
        b = self.f_bound(n)
        if b < 1:
            raise ValueError("flatness bound must be >= 1")
        return b


@dataclass
class IPResult:
    status: str                     # "feasible" | "infeasible" | "budget_exceeded"
    point: Optional[la.Vec] = None  # exact rational witness
    nodes: int = 0
    max_depth: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


# -- refinement and flatness direction ------------------------------------------

@dataclass
class RefineOutcome:
    status: str                      # "infeasible" | "full" | "drop"
    anchor: la.Vec = None            # closest lattice point p to the body center
    kept: int = 0                    # dimensions kept when status == "drop"
    sub_vectors: list = None         # successive-minima vectors spanning the kept space


def refine_basis(body, lattice: LatticeBasis, cap: EnumCap = EnumCap()) -> RefineOutcome:
    """Anchor the lattice at the body and drop dimensions whose minima
    exceed twice the circumscribed radius.

    Every lattice point inside the body lies in anchor + (sublattice of
    the kept span), so dropping is sound; infeasible when even the
    closest lattice point misses the circumscribing ball.
    """
    carrier = carrier_from_body(body)
    a0, big_r = carrier.center_and_radius()
    eng = L2Engine(lattice, euclidean(lattice.dimension), cap)
    pts, _, dist_sq = eng.closest(a0)
    if dist_sq > big_r * big_r:
        return RefineOutcome(status="infeasible")
    anchor = pts[0]
    values, vecs = eng.successive_minima()
    keep = [i for i, v in enumerate(values) if v <= 4 * big_r * big_r]
    kept = len(keep)
    if kept == lattice.rank:
        return RefineOutcome(status="full", anchor=anchor, kept=kept, sub_vectors=vecs)
    return RefineOutcome(status="drop", anchor=anchor, kept=kept,
                         sub_vectors=[vecs[i] for i in keep])


def flatness_direction(body, lattice: LatticeBasis,
                       config: Optional[FlatnessConfig] = None,
                       cap: EnumCap = EnumCap()):
    """Thin direction y in the dual lattice plus exact width bounds (l, u):
    l <= inf <x,y> over K and sup <x,y> <= u (conservative rationals)."""
    carrier = carrier_from_body(body)
    del config
    rounding = gls_round(carrier.oracle_view(), la.frac(1, 10**9))
    y, coeffs = _width_svp(carrier, lattice, rounding, cap)
    lo, hi = carrier.support_bounds(y)
    return y, coeffs, lo, hi


def _width_svp(carrier, lattice: LatticeBasis, rounding, cap: EnumCap,
               eps: Optional[Fraction] = None):
    """Shortest dual vector under the width norm (K-K)*; returns the
    vector and the integer pairing coefficients w with <y, B z> = w . z.

    The covering comes analytically from the rounding sandwich: with
    E/kappa <= K - t <= E we get E*/2 <= (K-K)* <= (kappa/2) E*, so half
    of the outer ellipsoid covers the width ball with a few translates.
    """
    n = lattice.dimension
    inner_r, outer_r = _sandwich_radii(rounding, n)
    wbody = carrier.width_body(inner_r, outer_r)
    dual = lattice.dual()
    if eps is None:
        eps = la.frac(1, 2)
    kappa = (n + 1) * math.sqrt(n)
    star_shape = la.snap_mat(la.inverse(rounding.ellipsoid.shape))
    star_shape = tuple(tuple((star_shape[i][j] + star_shape[j][i]) / 2
                             for j in range(n)) for i in range(n))
    e_r_star = Ellipsoid(star_shape)
    w_outer = e_r_star.scaled(la.snap(kappa / 2.0 * 1.001, 12))
    cover = scaled_ellipsoid_covering(w_outer.scaled(la.frac(1, 2)), 2.0)
    session = EnumSession(wbody, dual, cover=cover, cap=cap)
    report = shortest_vectors(wbody, dual, eps, session=session, cap=cap)
    y = report.result_set[0]
    return y, _pairing_coeffs(lattice, y)


def _pairing_coeffs(lattice: LatticeBasis, y: la.Vec):
    """w = B^t y, verified integral (y must lie in the dual lattice)."""
    w = la.matvec(la.transpose(lattice.matrix), la.vec(y))
    if any(c.denominator != 1 for c in w):
        raise RankDeficient("direction is not a dual lattice vector")
    return tuple(int(c) for c in w)


def _sandwich_radii(rounding, n: int):
    axes = rounding.ellipsoid.semi_axes()
    kappa = (n + 1) * math.sqrt(n)
    inner = la.frac(max(axes[-1] / kappa * (1 - 1e-9), 1e-12))
    outer = la.frac(axes[0] * (1 + 1e-9))
    return inner, outer


# -- the recursion ---------------------------------------------------------------

def ip_feasible(instance: IPInstance, config: FlatnessConfig = None) -> IPResult:
    """Decide K cap L = empty or return an exact lattice point in K."""
    if config is None:
        config = FlatnessConfig()
    state = {"nodes": 0, "max_depth": 0}
    depth_cap = config.depth_cap if config.depth_cap is not None else instance.lattice.rank + 1

    try:
        point = _solve(instance.body, instance.lattice, config, state, depth=0,
                       depth_cap=depth_cap)
    except BudgetExceeded:
        return IPResult(status="budget_exceeded", nodes=state["nodes"],
                        max_depth=state["max_depth"])
    if point is None:
        return IPResult(status="infeasible", nodes=state["nodes"],
                        max_depth=state["max_depth"])
    return IPResult(status="feasible", point=point, nodes=state["nodes"],
                    max_depth=state["max_depth"])


def _solve(carrier, lattice: LatticeBasis, config: FlatnessConfig, state,
           depth: int, depth_cap: int):
    state["nodes"] += 1
    state["max_depth"] = max(state["max_depth"], depth)
    if state["nodes"] > config.branch_cap:
        raise BudgetExceeded(f"ip node budget {config.branch_cap} exhausted")
    if depth > depth_cap:
        raise BudgetExceeded("ip recursion deeper than its cap")
    if carrier.is_empty():
        return None
    n = lattice.rank

    refine = refine_basis(carrier, lattice, config.cap)
    if refine.status == "infeasible":
        return None
    anchor = refine.anchor
    shifted = carrier.slice(anchor, la.columns(la.identity(carrier.dimension)))
    if shifted.membership(la.zeros(carrier.dimension)):
        return anchor
    if refine.status == "drop":
        if refine.kept == 0:
            return None  # anchor was the only candidate and it missed
        return _descend_subspace(carrier, anchor, refine.sub_vectors,
                                 lattice, config, state, depth, depth_cap)

    rounding = gls_round(shifted.oracle_view(), _localize_eps(n, lattice))
    if rounding.kind == "small_volume":
        y_coeffs, k_values = _thin_slab(lattice, rounding, config)
    else:
        y_coeffs, lo, hi = _flatness_branch(shifted, lattice, rounding, config)
        margin = la.frac(1, 10**6)  # absorbs sqrt-enclosure width in the cap
        k_lo = math.ceil(lo)
        k_hi = math.floor(min(hi, lo + la.frac(config.bound(n)) + 1 + margin))
        k_values = list(range(k_lo, k_hi + 1))
    for k in k_values:
        child_point = _branch_on_hyperplane(shifted, lattice, y_coeffs, k,
                                            config, state, depth, depth_cap)
        if child_point is not None:
            return la.add(anchor, child_point)
    return None


def _localize_eps(n: int, lattice: LatticeBasis) -> Fraction:
    det = lattice.determinant()
    eps = (1.0 / (4 * n)) ** n * det
    return la.frac(max(eps, 1e-300))


def _thin_slab(lattice: LatticeBasis, rounding, config: FlatnessConfig):
    """Tiny rounding ellipsoid: branch over the few hyperplanes meeting
    E + t along its shortest dual direction."""
    shape_inv = la.inverse(rounding.ellipsoid.shape)
    dual = lattice.dual()
    pts, _, _ = L2Engine(dual, InnerProduct(shape_inv), config.cap).shortest()
    y = pts[0]
    t = rounding.ellipsoid.center
    mid = la.dot(y, t)
    spread_sq = la.quadratic_form(shape_inv, y)
    _, hw = la.sqrt_bounds(spread_sq)
    k_lo = math.ceil(mid - hw)
    k_hi = math.floor(mid + hw)
    return _pairing_coeffs(lattice, y), list(range(k_lo, k_hi + 1))


def _flatness_branch(carrier, lattice: LatticeBasis, rounding, config: FlatnessConfig):
    n = lattice.rank
    eps_svp = la.frac(min(0.5, 1.0 / config.bound(n)))
    y, y_coeffs = _width_svp(carrier, lattice, rounding, config.cap, eps=eps_svp)
    lo, hi = carrier.support_bounds(y)
    return y_coeffs, lo, hi


def _branch_on_hyperplane(carrier, lattice: LatticeBasis, y_coeffs, k: int,
                          config: FlatnessConfig, state, depth: int, depth_cap: int):
    """Child instance on {x : <y, x> = k}; y given by its integer dual
    coefficients so that <y, B z> = y_coeffs . z."""
    g, ucols = la.integer_row_reduce(y_coeffs)
    if g == 0:
        return None
    if k % g != 0:
        return None
    z0 = la.scale(ucols[0], la.frac(k, g))
    point0 = lattice.point(z0)
    kernel = ucols[1:]
    if not kernel:
        return point0 if carrier.membership(point0) else None
    child_cols = [lattice.point(z) for z in kernel]
    return _recurse_into(carrier, point0, child_cols, config, state, depth, depth_cap)


def _descend_subspace(carrier, anchor, sub_vectors, lattice: LatticeBasis,
                      config: FlatnessConfig, state, depth, depth_cap):
    """Recurse into anchor + (L cap span(sub_vectors)); the sublattice is
    the full integer kernel of the orthogonal-complement constraints
    c^t B z = 0 for each complement direction c."""
    comp = _complement_basis(sub_vectors, lattice.dimension)
    if not comp:
        kernel_cols = la.columns(la.identity(lattice.rank))
    else:
        m_rows = [la.matvec(la.transpose(lattice.matrix), c) for c in comp]
        kernel_cols = _integer_kernel(m_rows, lattice.rank)
        if not kernel_cols:
            return None  # anchor itself was already checked by the caller
    child_cols = [lattice.point(z) for z in kernel_cols]
    shifted = carrier.slice(anchor, la.columns(la.identity(carrier.dimension)))
    child_point = _recurse_into(shifted, la.zeros(carrier.dimension), child_cols,
                                config, state, depth, depth_cap)
    if child_point is None:
        return None
    return la.add(anchor, child_point)


def _recurse_into(carrier, origin, child_cols, config, state, depth, depth_cap):
    """Slice the carrier onto origin + span(child_cols) and solve the
    lower-dimensional instance in its own coordinates."""
    frame = subspace_frame(child_cols)
    child_carrier = carrier.slice(origin, frame)
    if child_carrier.is_empty():
        return None
    gram = la.gram(frame)
    ginv = la.inverse(gram)
    coeff_cols = [la.matvec(ginv, la.vec([la.dot(f, c) for f in frame]))
                  for c in child_cols]
    child_lattice = LatticeBasis(la.from_columns(coeff_cols))
    child_lattice, _ = lll_reduce(child_lattice)
    sub = _solve(child_carrier, child_lattice, config, state, depth + 1, depth_cap)
    if sub is None:
        return None
    back = origin
    for f, c in zip(frame, sub, strict=True):
        back = la.add(back, la.scale(f, c))
    return back


def _complement_basis(vectors, ambient: int):
    """Rational basis of the orthogonal complement of span(vectors)."""
    rows = la.mat(vectors)
    from .convexopt import kernel_basis
    return kernel_basis(rows)


def _integer_kernel(m_rows, k: int):
    """Full integer kernel of a rational m x k system, via iterated
    unimodular reductions row by row."""
    basis = la.columns(la.identity(k))
    for row in m_rows:
        # current unknowns z = basis * t; constraint row . (B z) already folded:
        vals = [la.dot(la.vec(row), b) for b in basis]
        den = 1
        for v in vals:
            den = den * v.denominator // math.gcd(den, v.denominator)
        ints = [int(v * den) for v in vals]
        if all(x == 0 for x in ints):
            continue
        g, ucols = la.integer_row_reduce(ints)
        del g
        new_basis = []
        for col in ucols[1:]:
            combined = la.zeros(k)
            for ci, b in zip(col, basis, strict=True):
                combined = la.add(combined, la.scale(b, ci))
            new_basis.append(combined)
        basis = new_basis
        if not basis:
            break
    return basis
