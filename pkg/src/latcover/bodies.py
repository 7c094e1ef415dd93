"""Convex bodies and the oracle stack every solver consumes.

A BodyOracle bundles a centering certificate (a0, r, R) with weak
membership, a weak distance oracle for the gauge ||.||_K, and (when
available) strong separation. Concrete bodies (lp balls, polytopes,
ellipsoids) evaluate their gauges exactly, so the epsilon slack in the
oracle contracts is only exercised by derived oracles such as width
norms of sliced bodies.

Conventions: gauges require 0 in the interior of K, so polytopes must
have all b_i > 0 (callers pre-shift). Rank-deficient or unbounded
bodies are rejected up front.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import linalg as la
from .ellipsoid import Ellipsoid
from .errors import OracleIncapable, RankDeficient, SchemaError


@dataclass(frozen=True)
class CenteringCertificate:
    """a0 + r B_2 <= K <= a0 + R B_2 (rationals, r may be conservative).

    r is None for circumscribed-only bodies (e.g. hyperplane slices),
    which support separation-based algorithms but not gauge machinery.
    """

    a0: la.Vec
    r: Optional[Fraction]
    R: Fraction

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("centering needs R > 0")
        if self.r is not None and not (0 < self.r <= self.R):
            raise ValueError("centering needs 0 < r <= R")

    def require_r(self) -> Fraction:
        if self.r is None:
            raise ValueError("operation needs an inner-radius certificate")
        return self.r


@dataclass(frozen=True)
class Separation:
    """Strong-separation answer: inside, or a hyperplane direction c with
    <c, x> < <c, point> for all x in K."""

    inside: bool
    direction: Optional[la.Vec] = None


class BodyOracle:
    """Stacked oracle describing an (a0, r, R)-centered convex body.

    membership(x, eps) follows the weak contract: must answer 1 on
    K^{-eps}, 0 outside K^{eps}, anything in the boundary shell.
    distance(x, eps) returns a rational within eps of ||x||_K and is
    None for bodies without 0 guaranteed interior. separation(x) is
    None when no separation facility exists.
    """

    def __init__(self, centering: CenteringCertificate,
                 membership: Callable[[la.Vec, Fraction], int],
                 distance: Optional[Callable[[la.Vec, Fraction], Fraction]] = None,
                 separation: Optional[Callable[[la.Vec], Separation]] = None,
                 dimension: Optional[int] = None,
                 symmetric: bool = False,
                 polar_body: Optional[Callable[[], "BodyOracle"]] = None,
                 membership_float: Optional[Callable[[list], bool]] = None):
        self.centering = centering
        self.membership = membership
        self.distance = distance
        self.separation = separation
        self.dimension = dimension if dimension is not None else len(centering.a0)
        self.symmetric = symmetric
        self._polar_body = polar_body
        # fast float membership for samplers; falls back to the exact path
        if membership_float is None:
            def membership_float(xs):
                eps = la.frac(1, 10**9)
                return membership(la.vec([la.frac(float(v)) for v in xs]), eps) == 1
        self.membership_float = membership_float
        # optional analytic chord solver for samplers: (x, u) -> (t_lo, t_hi)
        # with {t : x + t u in K} = [t_lo, t_hi]; None means bisect membership
        self.chord_intersect = None
        # optional float separation (np point) -> (inside, direction array);
        # cutting-plane loops prefer it over the exact oracle
        self.separation_float = None

    def require_distance(self):
        if self.distance is None:
            raise OracleIncapable("body has no distance oracle")
        return self.distance

    def require_separation(self):
        if self.separation is None:
            raise OracleIncapable("body has no separation oracle")
        return self.separation

    def polar(self) -> "BodyOracle":
        """Exact polar body when one is known analytically."""
        if self._polar_body is None:
            raise OracleIncapable("no analytic polar for this body")
        return self._polar_body()


class ConcreteBody(BodyOracle):
    """Body with an exactly evaluable gauge.

    Subclasses implement gauge_cmp(x, c): sign of ||x||_K - c computed
    exactly for rational c, and gauge_value(x): float. The weak oracles
    are derived from these.
    """

    def __init__(self, centering, dimension, symmetric, polar_body=None,
                 m_ellipsoid_hint: Optional[Ellipsoid] = None):
        super().__init__(centering, self._membership, self._distance,
                         self._separation, dimension, symmetric, polar_body,
                         membership_float=lambda xs: self.gauge_value_np(xs) <= 1 + 1e-12)
        self.m_ellipsoid_hint = m_ellipsoid_hint
        self.chord_intersect = self._chord_by_gauge

    # -- exact machinery supplied by subclasses ---------------------------
    def gauge_cmp(self, x: la.Vec, c: Fraction) -> int:
        raise NotImplementedError

    def gauge_value(self, x: la.Vec) -> float:
        raise NotImplementedError

    def gauge_rational(self, x: la.Vec, eps: Fraction) -> Fraction:
        """Rational within eps of the gauge; default bisects gauge_cmp."""
        g = self.gauge_value(x)
        lo = la.frac(max(0.0, g * (1 - 1e-9) - 1e-12))
        hi = la.frac(g * (1 + 1e-9) + 1e-12)
        if self.gauge_cmp(x, lo) < 0 or self.gauge_cmp(x, hi) > 0:
            # float estimate was off; widen and bisect
            lo, hi = la.ZERO, la.frac(2 * g + 1)
            while self.gauge_cmp(x, hi) > 0:
                hi *= 2
        while hi - lo > eps:
            mid = (lo + hi) / 2
            if self.gauge_cmp(x, mid) > 0:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2

    def gauge_key(self, x: la.Vec):
        """Exactly comparable key for the gauge: two points have equal
        gauge iff their keys compare equal (within one body). Falls back
        to the float value for bodies without an exact key."""
        return self.gauge_value(x)

    def gauge_value_np(self, xs) -> float:
        """Float gauge on a float sequence; the sampler hot path."""
        return self.gauge_value(la.vec([la.frac(float(v)) for v in xs]))

    def _chord_by_gauge(self, x, u):
        """Boundary crossings of t -> gauge(x + t u) by value bisection.

        Assumes x is inside K; the gauge along the ray is convex so each
        side has a single crossing.
        """
        import numpy as np
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        span = 2 * float(self.centering.R) / max(1e-300, float(np.linalg.norm(u))) + 1.0

        def crossing(sign):
            lo, hi = 0.0, span
            if self.gauge_value_np(x + sign * hi * u) <= 1.0:
                return sign * hi
            for _ in range(48):
                mid = (lo + hi) / 2
                if self.gauge_value_np(x + sign * mid * u) <= 1.0:
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-10 * max(1.0, hi):
                    break
            return sign * lo

        return crossing(-1.0), crossing(1.0)

    def support_argmax(self, direction: la.Vec) -> la.Vec:
        """A point of K attaining (or exactly approaching) sup_K <d, x>."""
        raise NotImplementedError

    # -- derived oracles ---------------------------------------------------
    def _membership(self, x, eps) -> int:
        del eps  # exact gauge test is always a valid weak answer
        return 1 if self.gauge_cmp(la.vec(x), la.ONE) <= 0 else 0

    def _distance(self, x, eps) -> Fraction:
        return self.gauge_rational(la.vec(x), la.frac(eps))

    def _separation(self, x) -> Separation:
        raise NotImplementedError


class LpBall(ConcreteBody):
    """scale * B_p^n. Gauges for p in {1, 2, inf} are exact; general p
    uses floats inside a guaranteed enclosure."""

    def __init__(self, dimension: int, p, scale=1):
        if isinstance(p, str):
            if p != "inf":
                raise SchemaError("p must be a number >= 1 or 'inf'", "p")
            p = math.inf
        if p != math.inf:
            p = la.frac(p)
            if p < 1:
                raise SchemaError("p must be >= 1", "p")
        self.p = p
        self.scale = la.frac(scale)
        if self.scale <= 0:
            raise SchemaError("scale must be positive", "scale")
        n = dimension
        s = self.scale
        if p == math.inf:
            r, big_r = s, s * _sqrt_upper(n)
        elif p == 2:
            r, big_r = s, s
        elif p > 2:
            r, big_r = s, s * _pow_upper(n, 0.5 - 1 / float(p))
        elif p == 1:
            r, big_r = s / _sqrt_upper(n), s
        else:
            r, big_r = s * _pow_lower(n, 0.5 - 1 / float(p)), s
        centering = CenteringCertificate(la.zeros(n), r, big_r)
        super().__init__(centering, n, symmetric=True,
                         polar_body=self._polar,
                         m_ellipsoid_hint=_lp_hint(n, p, s))
        if self.p == 2:
            self.chord_intersect = self._chord_ball
        elif self.p == math.inf:
            self.chord_intersect = self._chord_box
        elif self.p == 1:
            self.chord_intersect = self._chord_cross
        self.separation_float = self._separation_np

    def _separation_np(self, x):
        x = np.asarray(x, dtype=float)
        if self.gauge_value_np(x) <= 1.0:
            return True, None
        p = self.p
        if p == math.inf:
            i = int(np.argmax(np.abs(x)))
            d = np.zeros(len(x))
            d[i] = 1.0 if x[i] > 0 else -1.0
            return False, d
        if p == 1:
            return False, np.sign(x)
        if p == 2:
            return False, x
        return False, np.sign(x) * np.abs(x) ** (float(p) - 1)

    def _chord_ball(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        s2 = float(self.scale) ** 2
        a = float(u @ u)
        b = float(x @ u)
        c = float(x @ x) - s2
        disc = max(b * b - a * c, 0.0)
        root = math.sqrt(disc)
        return (-b - root) / a, (-b + root) / a

    def _chord_box(self, x, u):
        s = float(self.scale)
        lo, hi = -math.inf, math.inf
        for xi, ui in zip(x, u):
            xi, ui = float(xi), float(ui)
            if abs(ui) < 1e-14:
                continue
            t1, t2 = (-s - xi) / ui, (s - xi) / ui
            if t1 > t2:
                t1, t2 = t2, t1
            lo, hi = max(lo, t1), min(hi, t2)
        return lo, hi

    def _chord_cross(self, x, u):
        """g(t) = sum |x_i + t u_i| / s is piecewise linear; walk the
        breakpoints outward from t = 0 until g crosses 1 on each side."""
        s = float(self.scale)
        xf = [float(v) for v in x]
        uf = [float(v) for v in u]

        def crossing(sign):
            breaks = sorted(sign * (-xi / ui) for xi, ui in zip(xf, uf)
                            if abs(ui) > 1e-14 and sign * (-xi / ui) > 0)
            t_prev = 0.0
            g_prev = sum(abs(v) for v in xf) / s
            for tb in breaks + [None]:
                t_next = tb if tb is not None else t_prev + 2 * float(self.centering.R) + 1
                g_next = sum(abs(xi + sign * t_next * ui) for xi, ui in zip(xf, uf)) / s
                if g_next >= 1.0:
                    if g_next == g_prev:
                        return sign * t_next
                    frac_ = (1.0 - g_prev) / (g_next - g_prev)
                    return sign * (t_prev + frac_ * (t_next - t_prev))
                t_prev, g_prev = t_next, g_next
            return sign * t_prev

        return crossing(-1.0), crossing(1.0)

    def _polar(self) -> "LpBall":
        if self.p == math.inf:
            q = la.frac(1)
        elif self.p == 1:
            q = math.inf
        else:
            q = self.p / (self.p - 1)
        return LpBall(self.dimension, q, 1 / self.scale)

    def gauge_cmp(self, x, c):
        if c < 0:
            return 1
        s = self.scale
        if self.p == math.inf:
            g = max((abs(v) for v in x), default=la.ZERO) / s
            return (g > c) - (g < c)
        if self.p == 1:
            g = sum(abs(v) for v in x) / s
            return (g > c) - (g < c)
        if self.p == 2:
            gsq = la.norm_sq(x) / (s * s)
            csq = c * c
            return (gsq > csq) - (gsq < csq)
        # general p: compare sum |x_i/(c s)|^p with 1 in floats with margin
        if c == 0:
            return 1 if any(x) else 0
        val = sum(abs(float(v / (c * s))) ** float(self.p) for v in x)
        if val > 1 + 1e-12:
            return 1
        if val < 1 - 1e-12:
            return -1
        return 0

    def gauge_value(self, x):
        s = float(self.scale)
        fx = [abs(float(v)) for v in x]
        if self.p == math.inf:
            return max(fx, default=0.0) / s
        if self.p == 1:
            return sum(fx) / s
        if self.p == 2:
            return math.sqrt(sum(v * v for v in fx)) / s
        return sum(v ** float(self.p) for v in fx) ** (1 / float(self.p)) / s

    def gauge_value_np(self, xs):
        return self.gauge_value(xs)

    def gauge_rational(self, x, eps):
        x = la.vec(x)
        s = self.scale
        if self.p == math.inf:
            return max((abs(v) for v in x), default=la.ZERO) / s
        if self.p == 1:
            return sum(abs(v) for v in x) / s
        if self.p == 2:
            lo, hi = la.sqrt_bounds(la.norm_sq(x))
            return (lo + hi) / 2 / s
        return super().gauge_rational(x, eps)

    def gauge_key(self, x):
        x = la.vec(x)
        s = self.scale
        if self.p == math.inf:
            return max((abs(v) for v in x), default=la.ZERO) / s
        if self.p == 1:
            return sum(abs(v) for v in x) / s
        if self.p == 2:
            return la.norm_sq(x) / (s * s)
        return self.gauge_value(x)

    def support_argmax(self, direction):
        d = la.vec(direction)
        if all(v == 0 for v in d):
            return la.zeros(self.dimension)
        s = self.scale
        if self.p == math.inf:
            return tuple(s if v >= 0 else -s for v in d)
        if self.p == 1:
            i = max(range(len(d)), key=lambda j: abs(d[j]))
            out = [la.ZERO] * len(d)
            out[i] = s if d[i] >= 0 else -s
            return tuple(out)
        if self.p == 2:
            lo, hi = la.sqrt_bounds(la.norm_sq(d))
            return la.scale(d, s / hi)  # slightly inside, gauge <= 1
        # general p: x_i proportional to sign(d_i) |d_i|^{1/(p-1)}
        q = 1 / (float(self.p) - 1)
        raw = [math.copysign(abs(float(v)) ** q, float(v)) for v in d]
        g = self.gauge_value(la.vec(raw))
        pt = la.vec(v / g * (1 - 1e-9) for v in la.vec(raw))
        return la.scale(pt, s)

    def _separation(self, x):
        x = la.vec(x)
        if self.gauge_cmp(x, la.ONE) <= 0:
            return Separation(True)
        # subgradient of the gauge at x separates
        if self.p == math.inf:
            i = max(range(len(x)), key=lambda j: abs(x[j]))
            c = [la.ZERO] * len(x)
            c[i] = la.ONE if x[i] > 0 else -la.ONE
            return Separation(False, tuple(c))
        if self.p == 1:
            return Separation(False, tuple(la.ONE if v > 0 else (-la.ONE if v < 0 else la.ZERO) for v in x))
        if self.p == 2:
            return Separation(False, x)
        c = tuple(la.frac(math.copysign(abs(float(v)) ** (float(self.p) - 1), float(v))) for v in x)
        return Separation(False, c)


class PolytopeBody(ConcreteBody):
    """{x : A x <= b} with 0 strictly interior (all b_i > 0).

    Gauge is max_i <a_i, x>/b_i, exact. The circumradius comes from
    exact vertex enumeration, so unbounded polytopes are rejected.
    """

    def __init__(self, a_rows: la.Mat, b: la.Vec, symmetric: Optional[bool] = None):
        self.a_rows = la.mat(a_rows)
        self.b = la.vec(b)
        if len(self.a_rows) != len(self.b):
            raise SchemaError("A and b sizes differ", "polytope")
        if any(bi <= 0 for bi in self.b):
            raise SchemaError("0 must be strictly interior: all b_i > 0", "polytope")
        n = len(self.a_rows[0])
        if la.rank(self.a_rows) < n:
            raise RankDeficient("polytope is unbounded (constraint rows do not span)")
        verts = _vertices(self.a_rows, self.b)
        if not verts:
            raise RankDeficient("polytope has no vertices; unbounded or degenerate")
        self.vertices = verts
        r_sq = min(bi * bi / la.norm_sq(ai) for ai, bi in zip(self.a_rows, self.b))
        big_r_sq = max(la.norm_sq(v) for v in verts)
        r = la.sqrt_bounds(r_sq)[0]
        big_r = la.sqrt_bounds(big_r_sq)[1]
        if symmetric is None:
            symmetric = all(any(w == la.neg(v) for w in verts) for v in verts)
        centering = CenteringCertificate(la.zeros(n), r, big_r)
        self._af = np.array(la.to_float_mat(self.a_rows))
        self._bf = np.array(la.to_float_vec(self.b))
        super().__init__(centering, n, symmetric=symmetric, polar_body=None)
        self.chord_intersect = self._chord_polytope
        self.separation_float = self._separation_np

    def _separation_np(self, x):
        slack = self._af @ np.asarray(x, dtype=float) - self._bf
        worst = int(np.argmax(slack / np.linalg.norm(self._af, axis=1)))
        if slack[worst] <= 0:
            return True, None
        return False, self._af[worst]

    def _chord_polytope(self, x, u):
        ax = self._af @ np.asarray(x, dtype=float)
        au = self._af @ np.asarray(u, dtype=float)
        lo, hi = -math.inf, math.inf
        for i in range(len(self._bf)):
            if au[i] > 1e-14:
                hi = min(hi, (self._bf[i] - ax[i]) / au[i])
            elif au[i] < -1e-14:
                lo = max(lo, (self._bf[i] - ax[i]) / au[i])
        return lo, hi

    def gauge_exact(self, x: la.Vec) -> Fraction:
        return max(la.dot(ai, x) / bi for ai, bi in zip(self.a_rows, self.b))

    def gauge_cmp(self, x, c):
        g = self.gauge_exact(la.vec(x))
        g = max(g, la.ZERO)
        return (g > c) - (g < c)

    def gauge_value(self, x):
        return float(max(self.gauge_exact(la.vec(x)), la.ZERO))

    def gauge_rational(self, x, eps):
        del eps
        return max(self.gauge_exact(la.vec(x)), la.ZERO)

    def gauge_key(self, x):
        return max(self.gauge_exact(la.vec(x)), la.ZERO)

    def gauge_value_np(self, xs):
        ratios = (self._af @ np.asarray(xs, dtype=float)) / self._bf
        return max(float(np.max(ratios)), 0.0)

    def support_argmax(self, direction):
        d = la.vec(direction)
        return max(self.vertices, key=lambda v: la.dot(d, v))

    def _separation(self, x):
        x = la.vec(x)
        ratios = [la.dot(ai, x) - bi for ai, bi in zip(self.a_rows, self.b)]
        worst = max(range(len(ratios)), key=lambda i: ratios[i] / la.norm_sq(self.a_rows[i]))
        if ratios[worst] <= 0:
            return Separation(True)
        return Separation(False, self.a_rows[worst])


class EllipsoidBody(ConcreteBody):
    """The ellipsoid E(A, 0) as a convex body; gauge^2 = x^t A x exact."""

    def __init__(self, ellipsoid: Ellipsoid):
        if any(c != 0 for c in ellipsoid.center):
            raise SchemaError("ellipsoid body must be origin-centered", "ellipsoid")
        self.ellipsoid = ellipsoid
        self._shape_f = np.array(la.to_float_mat(ellipsoid.shape))
        n = ellipsoid.dimension
        axes = ellipsoid.semi_axes()
        r = la.frac(axes[-1] * (1 - 1e-12))
        big_r = la.frac(axes[0] * (1 + 1e-12))
        centering = CenteringCertificate(la.zeros(n), r, big_r)
        super().__init__(centering, n, symmetric=True,
                         polar_body=lambda: EllipsoidBody(Ellipsoid(la.inverse(ellipsoid.shape))),
                         m_ellipsoid_hint=ellipsoid)
        self.chord_intersect = self._chord_quadric
        self.separation_float = self._separation_np

    def _separation_np(self, x):
        x = np.asarray(x, dtype=float)
        if float(x @ self._shape_f @ x) <= 1.0:
            return True, None
        return False, self._shape_f @ x

    def _chord_quadric(self, x, u):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        a = float(u @ self._shape_f @ u)
        b = float(x @ self._shape_f @ u)
        c = float(x @ self._shape_f @ x) - 1.0
        disc = max(b * b - a * c, 0.0)
        root = math.sqrt(disc)
        return (-b - root) / a, (-b + root) / a

    def gauge_cmp(self, x, c):
        if c < 0:
            return 1
        gsq = self.ellipsoid.gauge_sq(la.vec(x))
        csq = c * c
        return (gsq > csq) - (gsq < csq)

    def gauge_value(self, x):
        return math.sqrt(float(self.ellipsoid.gauge_sq(la.vec(x))))

    def gauge_rational(self, x, eps):
        del eps
        lo, hi = la.sqrt_bounds(self.ellipsoid.gauge_sq(la.vec(x)))
        return (lo + hi) / 2

    def gauge_key(self, x):
        return self.ellipsoid.gauge_sq(la.vec(x))

    def gauge_value_np(self, xs):
        v = np.asarray(xs, dtype=float)
        return math.sqrt(max(float(v @ self._shape_f @ v), 0.0))

    def support_argmax(self, direction):
        d = la.vec(direction)
        if all(v == 0 for v in d):
            return la.zeros(self.dimension)
        w = la.matvec(la.inverse(self.ellipsoid.shape), d)
        lo, hi = la.sqrt_bounds(la.dot(d, w))
        return la.scale(w, 1 / hi)

    def _separation(self, x):
        x = la.vec(x)
        if self.ellipsoid.gauge_sq(x) <= 1:
            return Separation(True)
        return Separation(False, la.matvec(self.ellipsoid.shape, x))


def shifted_body(body: BodyOracle, shift: la.Vec) -> BodyOracle:
    """Oracle for K - shift. Gauge data is dropped (0 may not be interior)."""
    shift = la.vec(shift)
    shift_f = np.array(la.to_float_vec(shift))
    cert = CenteringCertificate(la.sub(body.centering.a0, shift),
                                body.centering.r, body.centering.R)

    def membership(x, eps):
        return body.membership(la.add(la.vec(x), shift), eps)

    def membership_float(xs):
        return body.membership_float(np.asarray(xs, dtype=float) + shift_f)

    separation = None
    if body.separation is not None:
        def separation(x):  # noqa: F811 - deliberate rebind
            return body.separation(la.add(la.vec(x), shift))

    oracle = BodyOracle(cert, membership, None, separation,
                        body.dimension, symmetric=False,
                        membership_float=membership_float)
    if body.chord_intersect is not None:
        parent_chord = body.chord_intersect
        oracle.chord_intersect = lambda x, u: parent_chord(
            np.asarray(x, dtype=float) + shift_f, u)
    return oracle


def _vertices(a_rows: la.Mat, b: la.Vec):
    """All vertices of {Ax <= b} by enumerating n-subsets of tight rows."""
    m, n = len(a_rows), len(a_rows[0])
    verts = []
    seen = set()
    for idx in itertools.combinations(range(m), n):
        sub_a = tuple(a_rows[i] for i in idx)
        if la.det(sub_a) == 0:
            continue
        v = la.solve(sub_a, tuple(b[i] for i in idx))
        if v in seen:
            continue
        if all(la.dot(a_rows[i], v) <= b[i] for i in range(m)):
            seen.add(v)
            verts.append(v)
    return verts


def _sqrt_upper(n: int) -> Fraction:
    return la.sqrt_bounds(la.frac(n))[1]


def _pow_upper(n: int, e: float) -> Fraction:
    return la.frac(float(n) ** e * (1 + 1e-12))


def _pow_lower(n: int, e: float) -> Fraction:
    return la.frac(float(n) ** e * (1 - 1e-12))


def _lp_hint(n: int, p, s: Fraction) -> Ellipsoid:
    """Scaled euclidean ball that is an M-ellipsoid of s*B_p^n:
    radius s * n^{1/2 - 1/p} (inscribed for p <= 2, circumscribed for p >= 2)."""
    if p == math.inf:
        radius_sq = s * s * n
    elif p == 2:
        radius_sq = s * s
    else:
        radius_sq = s * s * la.frac(float(n) ** (1.0 - 2.0 / float(p)))
    return Ellipsoid(la.mat_scale(la.identity(n), 1 / radius_sq))
