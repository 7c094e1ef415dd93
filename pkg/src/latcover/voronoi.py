"""Exact lattice algorithms under an ellipsoidal inner product <x,y>_A.

All arithmetic is rational; set-valued results are canonicalized by
lexicographic sort on the integer coefficient vectors, so outputs diff
cleanly. Every search is guarded by an EnumCap: exceeding it raises,
it never truncates silently.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .errors import CapExceeded, RankDeficient
from .lattice import LatticeBasis, lll_reduce


@dataclass(frozen=True)
class InnerProduct:
    """<x,y>_A = x^t A y for symmetric positive definite rational A."""

    a: la.Mat

    def __post_init__(self):
        la.ldlt(self.a)  # exact PD certificate

    def of(self, u: la.Vec, v: la.Vec | None = None) -> Fraction:
        return la.quadratic_form(self.a, u, v)

    @property
    def dimension(self) -> int:
        return len(self.a)


def euclidean(n: int) -> InnerProduct:
    return InnerProduct(la.identity(n))


@dataclass(frozen=True)
class EnumCap:
    max_points: int = 10**6

    def __post_init__(self):
        if self.max_points <= 0:
            raise ValueError("cap must be positive")


@dataclass(frozen=True)
class VoronoiData:
    """Voronoi-relevant vectors of (L, <.,.>_A), closed under negation."""

    relevant: tuple          # lattice vectors
    relevant_coeffs: tuple   # the same vectors in basis coefficients
    inner: InnerProduct
    norms_sq: tuple          # ||v||_A^2 per relevant vector

    def __len__(self):
        return len(self.relevant)


@dataclass
class _GsoData:
    """Cached rational GSO of a basis under <.,.>_A for enumeration."""

    cols: list
    mu: list       # mu[i][j] for j < i
    norms: list    # squared A-norms of the GSO vectors
    inner: InnerProduct


def _gso(basis: LatticeBasis, ip: InnerProduct) -> _GsoData:
    cols = basis.columns
    ortho = []
    mu = []
    norms = []
    for b in cols:
        row = []
        g = b
        for j, q in enumerate(ortho):
            c = ip.of(b, q) / norms[j]
            row.append(c)
            g = la.sub(g, la.scale(q, c))
        ortho.append(g)
        norms.append(ip.of(g))
        if norms[-1] == 0:
            raise RankDeficient("basis dependent under inner product")
        mu.append(row)
    return _GsoData(cols=cols, mu=mu, norms=norms, inner=ip)


def fincke_pohst_enum(basis: LatticeBasis, ip: InnerProduct, center: la.Vec,
                      radius_sq: Fraction, cap: EnumCap = EnumCap(),
                      _gso_cache: _GsoData | None = None):
    """Exact depth-first enumeration of {y in L : ||y - center||_A^2 <= radius_sq}.

    Returns (points, coeffs) lex-sorted by coefficient vector. The
    recursion works on the exact GSO; interval bounds per level avoid
    square roots by scanning integers outward from the real center and
    stopping on the exact quadratic test.
    """
    radius_sq = la.frac(radius_sq)
    if radius_sq < 0:
        return [], []
    k = basis.rank
    gso = _gso_cache if _gso_cache is not None else _gso(basis, ip)
    # center in GSO coordinates: tau_i = <t, g_i>_A / ||g_i||_A^2 where the
    # g_i are implicit; compute by forward elimination against mu.
    t = la.vec(center)
    tau = _gso_coords(gso, t, basis)

    found = []

    def descend(level: int, remaining: Fraction, partial: dict):
        # c = center coordinate at this level given choices above
        c = tau[level] - sum((gso.mu[j][level] * partial[j] for j in range(level + 1, k)), la.ZERO)
        q = gso.norms[level]
        base = _floor_frac(c)
        for z0, step in ((base, -1), (base + 1, 1)):
            z = z0
            while True:
                d = remaining - q * (z - c) ** 2
                if d < 0:
                    break
                partial[level] = la.frac(z)
                if level == 0:
                    coeff = tuple(int(partial[i]) for i in range(k))
                    found.append(coeff)
                    if len(found) > cap.max_points:
                        raise CapExceeded(len(found))
                else:
                    descend(level - 1, d, partial)
                z += step
        partial.pop(level, None)

    descend(k - 1, radius_sq, {})
    found.sort()
    points = [basis.point(cf) for cf in found]
    return points, found


def _gso_coords(gso: _GsoData, t: la.Vec, basis: LatticeBasis):
    """Coordinates tau with t = sum tau_i g_i (+ component outside the span).

    For full-rank bases the outside component is zero. Solved by the
    triangular relation <t, g_j>_A = tau_j ||g_j||^2 given g recursion.
    """
    k = basis.rank
    # Reconstruct g_j implicitly: <t, g_j> = <t, b_j> - sum_{i<j} mu_ji <t, g_i>
    ip = gso.inner
    t_dot_g = []
    for j in range(k):
        v = ip.of(t, gso.cols[j])
        for i in range(j):
            v -= gso.mu[j][i] * t_dot_g[i]
        t_dot_g.append(v)
    return [t_dot_g[j] / gso.norms[j] for j in range(k)]


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def _babai(gso: _GsoData, basis: LatticeBasis, target: la.Vec):
    """Nearest-plane rounding; returns coefficient vector of a nearby point."""
    k = basis.rank
    tau = _gso_coords(gso, la.vec(target), basis)
    z = [la.ZERO] * k
    for level in range(k - 1, -1, -1):
        c = tau[level] - sum((gso.mu[j][level] * z[j] for j in range(level + 1, k)), la.ZERO)
        z[level] = la.frac(round(c))
    return tuple(int(v) for v in z)


class L2Engine:
    """Shared exact machinery for one (lattice, inner product) pair.

    LLL-preconditions the basis once and caches GSO plus (on demand)
    the Voronoi-relevant vectors, which all targets and radii reuse:
    Voronoi relevance is invariant under uniform scalings of the metric.
    """

    def __init__(self, basis: LatticeBasis, ip: InnerProduct | None = None,
                 cap: EnumCap = EnumCap()):
        if basis.rank != basis.dimension:
            raise RankDeficient("l2 engine needs a full-rank lattice")
        self.original = basis
        self.inner = ip if ip is not None else euclidean(basis.dimension)
        self.cap = cap
        self.reduced, self.unimod = lll_reduce(basis, inner=self.inner.a)
        self.gso = _gso(self.reduced, self.inner)
        self._voronoi: VoronoiData | None = None

    def to_original_coeffs(self, zc):
        """Map reduced-basis coefficients to the caller's basis (B_red = B U)."""
        k = len(zc)
        return tuple(int(sum(self.unimod[i][j] * zc[j] for j in range(k)))
                     for i in range(k))

    def _coeff_quadratic(self, center: la.Vec, radius_sq: Fraction):
        """Integer-scaled evaluator of ||B z - center||_A^2 vs radius_sq.

        ||B z - c||^2 = z^t G z - 2 w z + c0 with G = B^t A B, w = B^t A c,
        c0 = c^t A c; one common-denominator clearing makes every
        per-point test pure integer arithmetic.
        """
        if not hasattr(self, "_gram_red"):
            cols = self.reduced.columns
            self._gram_red = tuple(tuple(self.inner.of(u, v) for v in cols)
                                   for u in cols)
        g = self._gram_red
        ac = la.matvec(self.inner.a, center)
        w = tuple(la.dot(col, ac) for col in self.reduced.columns)
        c0 = la.dot(center, ac)
        den = 1
        for value in [radius_sq, c0, *w, *(x for row in g for x in row)]:
            den = den * value.denominator // math.gcd(den, value.denominator)
        g_int = [[int(x * den) for x in row] for row in g]
        w2_int = [2 * int(x * den) for x in w]
        c0_int = int(c0 * den)
        r2_int = int(radius_sq * den)
        k = len(w)

        def dist_scaled(z):
            total = c0_int
            for i in range(k):
                zi = z[i]
                if zi:
                    row = g_int[i]
                    total += zi * (sum(row[j] * z[j] for j in range(k)) - w2_int[i])
            return total

        return dist_scaled, r2_int

    def _emit(self, coeff_list):
        """Canonical output: points and coefficients in the original basis,
        lex-sorted by original coefficients."""
        orig = sorted(self.to_original_coeffs(zc) for zc in coeff_list)
        pts = [self.original.point(zc) for zc in orig]
        return pts, orig

    # ---- Voronoi-relevant vectors ---------------------------------------
    def voronoi_data(self) -> VoronoiData:
        if self._voronoi is None:
            self._voronoi = self._compute_relevant()
        return self._voronoi

    def _compute_relevant(self) -> VoronoiData:
        k = self.reduced.rank
        doubled = LatticeBasis(la.mat_scale(self.reduced.matrix, 2))
        dgso = _gso(doubled, self.inner)
        rel, rel_coeffs, norms = [], [], []
        for bits in range(1, 2 ** k):
            coset = tuple((bits >> i) & 1 for i in range(k))
            offset = self.reduced.point(coset)
            # minimize ||2 L z + offset||_A: CVP of -offset on 2L
            z0 = _babai(dgso, doubled, la.neg(offset))
            best = self.inner.of(la.add(doubled.point(z0), offset))
            pts, coeffs = fincke_pohst_enum(doubled, self.inner, la.neg(offset),
                                            best, self.cap, _gso_cache=dgso)
            vals = [self.inner.of(la.add(p, offset)) for p in pts]
            m = min(vals)
            mins = [(la.add(pts[i], offset), coeffs[i]) for i in range(len(pts)) if vals[i] == m]
            if len(mins) == 2:  # strict up to sign: exactly {v, -v}
                for v, zc in mins:
                    rel.append(v)
                    full = tuple(2 * zc[i] + coset[i] for i in range(k))
                    rel_coeffs.append(full)
                    norms.append(m)
        order = sorted(range(len(rel)), key=lambda i: rel_coeffs[i])
        return VoronoiData(relevant=tuple(rel[i] for i in order),
                           relevant_coeffs=tuple(rel_coeffs[i] for i in order),
                           inner=self.inner,
                           norms_sq=tuple(norms[i] for i in order))

    # ---- closest vectors --------------------------------------------------
    def _descend_to_closest(self, target: la.Vec, dist_scaled=None):
        """Iterative slicer: Babai start, then relevant-vector descent.

        A point with no improving relevant step has its residual in the
        closed Voronoi cell, hence is a true closest vector. Returns the
        reduced-basis coefficients and the integer-scaled squared distance
        under the supplied evaluator.
        """
        vd = self.voronoi_data()
        if dist_scaled is None:
            dist_scaled, _ = self._coeff_quadratic(la.vec(target), la.ZERO)
        z = _babai(self.gso, self.reduced, target)
        cur = dist_scaled(z)
        improved = True
        while improved and cur > 0:
            improved = False
            for zc in vd.relevant_coeffs:
                nz = tuple(z[i] + zc[i] for i in range(len(z)))
                nd = dist_scaled(nz)
                if nd < cur:
                    z, cur = nz, nd
                    improved = True
                    break
        return z, cur

    def closest(self, target: la.Vec):
        """All closest lattice vectors to target: (points, coeffs, dist_sq)."""
        target = la.vec(target)
        dist_scaled, _ = self._coeff_quadratic(target, la.ZERO)
        z, cur = self._descend_to_closest(target, dist_scaled)
        # tie set: ball of radius dist around target, BFS over relevant steps
        raw = self._ball_bfs_raw(dist_scaled, cur, seed=z)
        keep = [zc for zc in raw if dist_scaled(zc) == cur]
        pts, coeffs = self._emit(keep)
        dist = self.inner.of(la.sub(self.reduced.point(z), target))
        return pts, coeffs, dist

    # ---- enumeration inside an ellipsoid ----------------------------------
    def enum_ball(self, center: la.Vec, radius_sq: Fraction):
        """{y in L : ||y-center||_A^2 <= radius_sq}, BFS over relevant vectors."""
        center = la.vec(center)
        radius_sq = la.frac(radius_sq)
        if radius_sq < 0:
            return [], []
        dist_scaled, r2_scaled = self._coeff_quadratic(center, radius_sq)
        z, cur = self._descend_to_closest(center, dist_scaled)
        if cur > r2_scaled:
            return [], []
        return self._emit(self._ball_bfs_raw(dist_scaled, r2_scaled, seed=z))

    def _ball_bfs_raw(self, dist_scaled, r2_scaled, seed):
        """Reduced-basis coefficient set of the ball BFS; all distance
        tests run on the integer-scaled evaluator."""
        vd = self.voronoi_data()
        if dist_scaled(seed) > r2_scaled:
            return []
        visited = {seed}
        queue = [seed]
        accepted = []
        while queue:
            queue.sort()
            next_queue = []
            for zc in queue:
                accepted.append(zc)
                if len(accepted) > self.cap.max_points:
                    raise CapExceeded(len(accepted))
                for step in vd.relevant_coeffs:
                    nz = tuple(zc[i] + step[i] for i in range(len(zc)))
                    if nz in visited:
                        continue
                    visited.add(nz)
                    if dist_scaled(nz) <= r2_scaled:
                        next_queue.append(nz)
            queue = next_queue
        return accepted

    # ---- shortest vectors --------------------------------------------------
    def shortest(self):
        """All shortest nonzero vectors and lambda_1^2 (exact rational).

        Every shortest vector is Voronoi relevant (strict minimizer of its
        coset mod 2L by the parallelogram law), so the relevant set
        suffices.
        """
        vd = self.voronoi_data()
        m = min(vd.norms_sq)
        raw = [vd.relevant_coeffs[i] for i in range(len(vd)) if vd.norms_sq[i] == m]
        pts, coeffs = self._emit(raw)
        return pts, coeffs, m

    def successive_minima(self):
        """(lambda_i^2 values, achieving vectors), greedy over a ball search."""
        k = self.reduced.rank
        bound = max(self.inner.of(c) for c in self.reduced.columns)
        pts, coeffs = fincke_pohst_enum(self.reduced, self.inner,
                                        la.zeros(self.reduced.dimension), bound,
                                        self.cap, _gso_cache=self.gso)
        ranked = sorted((self.inner.of(p), cf, p) for (p, cf) in zip(pts, coeffs)
                        if any(cf))
        chosen, values = [], []
        basis_rows = []
        for val, _, p in ranked:
            if len(chosen) == k:
                break
            if la.rank(tuple(basis_rows + [p])) > len(basis_rows):
                chosen.append(p)
                values.append(val)
                basis_rows.append(p)
        return values, chosen


# -- spec-level wrappers ------------------------------------------------------

def relevant_vectors(basis: LatticeBasis, ip: InnerProduct | None = None,
                     cap: EnumCap = EnumCap()) -> VoronoiData:
    return L2Engine(basis, ip, cap).voronoi_data()


def cvp_ellip(basis: LatticeBasis, ip: InnerProduct | None, target: la.Vec,
              cap: EnumCap = EnumCap()):
    """All closest lattice vectors to target under ||.||_A: (points, dist_sq)."""
    eng = L2Engine(basis, ip, cap)
    pts, _, dist = eng.closest(target)
    return pts, dist


def svp_ellip(basis: LatticeBasis, ip: InnerProduct | None = None,
              cap: EnumCap = EnumCap()):
    """All shortest nonzero vectors under ||.||_A: (points, lambda1_sq)."""
    eng = L2Engine(basis, ip, cap)
    pts, _, m = eng.shortest()
    return pts, m


def ellipsoid_enum(basis: LatticeBasis, shape: la.Mat, translate: la.Vec,
                   cap: EnumCap = EnumCap()):
    """Lattice points in E(A) + t for origin-centered E(A)."""
    eng = L2Engine(basis, InnerProduct(shape), cap)
    pts, _ = eng.enum_ball(translate, la.ONE)
    return pts


def successive_minima(basis: LatticeBasis, ip: InnerProduct | None = None,
                      cap: EnumCap = EnumCap()):
    return L2Engine(basis, ip, cap).successive_minima()
