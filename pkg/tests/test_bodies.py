import math
import random
from fractions import Fraction

import pytest

from latcover import linalg as la
from latcover.bodies import EllipsoidBody, LpBall, PolytopeBody, shifted_body
from latcover.ellipsoid import Ellipsoid
from latcover.errors import RankDeficient, SchemaError


def cube(n, half=1):
    rows, rhs = [], []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        rows.append(tuple(e))
        rows.append(tuple(-x for x in e))
        rhs += [half, half]
    return PolytopeBody(la.mat(rows), la.vec(rhs))


BODIES = [
    LpBall(2, 1),
    LpBall(2, 2),
    LpBall(2, "inf"),
    LpBall(3, 1, scale=Fraction(3, 2)),
    cube(2),
    EllipsoidBody(Ellipsoid(la.mat([[1, Fraction(1, 2)], [Fraction(1, 2), 1]]))),
]


@pytest.mark.parametrize("body", BODIES, ids=lambda b: type(b).__name__ + str(id(b) % 97))
def test_gauge_homogeneity_exact(body):
    rng = random.Random(5)
    n = body.dimension
    for _ in range(20):
        x = la.vec([Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(n)])
        t = Fraction(rng.randint(1, 12), rng.randint(1, 5))
        assert body.gauge_key(la.scale(x, t)) == _scale_key(body, t) * body.gauge_key(x)


def _scale_key(body, t):
    # keys are squared for l2/ellipsoid gauges, linear otherwise
    if isinstance(body, EllipsoidBody) or (isinstance(body, LpBall) and body.p == 2):
        return t * t
    return t


@pytest.mark.parametrize("body", BODIES, ids=lambda b: type(b).__name__ + str(id(b) % 97))
def test_gauge_triangle_inequality(body):
    rng = random.Random(6)
    n = body.dimension
    for _ in range(30):
        x = la.vec([Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)])
        y = la.vec([Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)])
        eps = la.frac(1, 10**9)
        gx = body.gauge_rational(x, eps)
        gy = body.gauge_rational(y, eps)
        gxy = body.gauge_rational(la.add(x, y), eps)
        assert gxy <= gx + gy + 3 * eps


@pytest.mark.parametrize("body", BODIES, ids=lambda b: type(b).__name__ + str(id(b) % 97))
def test_centering_sandwich_probes(body):
    n = body.dimension
    cert = body.centering
    delta = la.frac(1, 1000)
    for i in range(n):
        u = [la.ZERO] * n
        u[i] = la.ONE
        inside = la.add(cert.a0, la.scale(la.vec(u), cert.r * (1 - delta)))
        assert body.membership(inside, delta) == 1
        outside = la.add(cert.a0, la.scale(la.vec(u), cert.R * (1 + delta)))
        assert body.membership(outside, delta) == 0


def test_lp_gauges_exact_values():
    b1 = LpBall(2, 1)
    assert b1.gauge_rational(la.vec([1, 1]), la.frac(1, 100)) == 2
    binf = LpBall(2, "inf")
    assert binf.gauge_rational(la.vec([Fraction(1, 2), Fraction(-3, 2)]), la.frac(1, 100)) == Fraction(3, 2)
    b2 = LpBall(2, 2)
    g = b2.gauge_rational(la.vec([3, 4]), la.frac(1, 10**9))
    assert abs(g - 5) < Fraction(1, 10**9)


def test_lp_general_p_enclosure():
    b = LpBall(2, 3)
    g = b.gauge_rational(la.vec([1, 1]), la.frac(1, 10**6))
    assert abs(float(g) - 2 ** (1 / 3)) < 1e-6


def test_polytope_gauge_and_separation():
    body = cube(2)
    assert body.gauge_exact(la.vec([Fraction(1, 2), Fraction(3, 4)])) == Fraction(3, 4)
    sep = body.separation(la.vec([2, 0]))
    assert not sep.inside
    c = sep.direction
    # separator must put all of K strictly below the queried point
    assert la.dot(c, la.vec([2, 0])) > max(la.dot(c, v) for v in body.vertices)


def test_polytope_requires_interior_zero():
    with pytest.raises(SchemaError):
        PolytopeBody(la.mat([[1, 0], [-1, 0], [0, 1], [0, -1]]), la.vec([1, 0, 1, 1]))


def test_polytope_unbounded_rejected():
    with pytest.raises(RankDeficient):
        PolytopeBody(la.mat([[1, 0], [-1, 0]]), la.vec([1, 1]))


def test_polytope_symmetry_detection():
    assert cube(2).symmetric
    tri = PolytopeBody(la.mat([[1, 0], [0, 1], [-1, -1]]), la.vec([1, 1, 1]))
    assert not tri.symmetric


def test_lp_polar_roundtrip():
    b = LpBall(3, 1, scale=2)
    p = b.polar()
    assert p.p == math.inf and p.scale == Fraction(1, 2)


def test_shifted_body_membership():
    body = cube(2)
    s = shifted_body(body, la.vec([Fraction(1, 2), 0]))
    assert s.membership(la.vec([Fraction(1, 2), 0]), la.frac(1, 100)) == 1
    assert s.membership(la.vec([1, 0]), la.frac(1, 100)) == 0
    sep = s.separation(la.vec([1, 0]))
    assert not sep.inside


def test_support_argmax_inside_body():
    for body in BODIES:
        rng = random.Random(9)
        for _ in range(5):
            d = la.vec([Fraction(rng.randint(-5, 5)) for _ in range(body.dimension)])
            x = body.support_argmax(d)
            assert body.gauge_cmp(x, la.ONE) <= 0
