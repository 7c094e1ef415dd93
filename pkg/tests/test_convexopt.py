import math
from fractions import Fraction

import pytest

from latcover import linalg as la
from latcover.bodies import EllipsoidBody, LpBall, PolytopeBody
from latcover.convexopt import (AffineMax, gls_round, linear_objective,
                                slice_separation, weak_optimize_linear)
from latcover.ellipsoid import Ellipsoid, ellipsoid_volume
from latcover.errors import EmptySlice, IterationBudgetExceeded


def cube(n, half=1):
    rows, rhs = [], []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        rows.append(tuple(e))
        rows.append(tuple(-x for x in e))
        rhs += [half, half]
    return PolytopeBody(la.mat(rows), la.vec(rhs))


def test_weak_opt_unit_disk_linear():
    body = LpBall(2, 2)
    res = weak_optimize_linear(body, linear_objective([1, 0]), Fraction(1, 10**6))
    assert abs(float(res.value) + 1) <= 1e-6 + 1e-9


def test_weak_opt_cube_vertex_optimum():
    body = cube(2)
    res = weak_optimize_linear(body, linear_objective([1, 1]), Fraction(1, 1000))
    assert abs(float(res.value) + 2) <= 1e-3 + 1e-9


def test_weak_opt_triangle_matches_lp():
    # conv{(0,0),(2,0),(0,2)} shifted by (-1/2,-1/2) to contain 0 interior:
    # constraints x >= -1/2, y >= -1/2, x + y <= 1
    body = PolytopeBody(la.mat([[-1, 0], [0, -1], [1, 1]]),
                        la.vec([Fraction(1, 2), Fraction(1, 2), 1]))
    res = weak_optimize_linear(body, linear_objective([1, 1]), Fraction(1, 1000))
    assert abs(float(res.value) + 1) <= 1e-3 + 1e-9  # min of x+y is -1 at corner


def test_weak_opt_affine_max_objective():
    # f(x) = max(x1, -x1) = |x1| has minimum 0 over the disk
    body = LpBall(2, 2)
    obj = AffineMax(rows=la.mat([[1, 0], [-1, 0]]), consts=la.vec([0, 0]))
    res = weak_optimize_linear(body, obj, Fraction(1, 10**4))
    assert abs(float(res.value)) <= 1e-4 + 1e-9


def test_weak_opt_monotone_in_eps():
    body = cube(2)
    obj = linear_objective([2, -1])
    loose = weak_optimize_linear(body, obj, Fraction(1, 10))
    tight = weak_optimize_linear(body, obj, Fraction(1, 10**5))
    assert abs(float(tight.value) + 3) <= 1e-5 + 1e-9
    assert abs(float(loose.value) + 3) <= 0.1 + 1e-9


def test_weak_opt_iteration_budget():
    body = LpBall(3, 2)
    with pytest.raises(IterationBudgetExceeded):
        weak_optimize_linear(body, linear_objective([1, 0, 0]), Fraction(1, 10**6),
                             max_iterations=3)


def test_weak_opt_witness_feasible():
    body = LpBall(2, 2)
    res = weak_optimize_linear(body, linear_objective([0, 1]), Fraction(1, 10**4))
    assert body.gauge_value(la.vec([la.frac(w) for w in res.witness])) <= 1 + 1e-6


def test_gls_round_on_ellipsoid_body():
    e0 = Ellipsoid(la.mat([[1, 0], [0, 4]]))
    body = EllipsoidBody(e0)
    out = gls_round(body, Fraction(1, 10**6))
    assert out.kind == "sandwich"
    n = 2
    kappa = (n + 1) * math.sqrt(n)
    # outer containment: boundary points of K inside E + t
    for ang in range(12):
        t = 2 * math.pi * ang / 12
        x = [math.cos(t), math.sin(t) / 2]
        assert float(out.ellipsoid.gauge_sq(la.vec([la.frac(v) for v in x]))) <= 1 + 1e-6
    # inner containment along axes: center +- axis/kappa inside K
    import numpy as np
    qinv = np.array(la.to_float_mat(out.ellipsoid.shape))
    w, v = np.linalg.eigh(np.linalg.inv(qinv))
    c = np.array(la.to_float_vec(out.ellipsoid.center))
    for i in range(n):
        p = c + math.sqrt(w[i]) * v[:, i] / kappa
        assert body.gauge_value(la.vec([la.frac(x) for x in p])) <= 1 + 1e-6


def test_gls_round_small_volume_on_thin_box():
    delta = Fraction(1, 1000)
    body = PolytopeBody(la.mat([[1, 0], [-1, 0], [0, 1], [0, -1]]),
                        la.vec([1, 1, delta, delta]))
    out = gls_round(body, Fraction(1, 100))
    assert out.kind == "small_volume"
    assert out.volume <= 0.01


def test_gls_round_cube_outer_containment():
    body = cube(2)
    out = gls_round(body, Fraction(1, 10**6))
    assert out.kind == "sandwich"
    for sx in (1, -1):
        for sy in (1, -1):
            assert float(out.ellipsoid.gauge_sq(la.vec([sx, sy]))) <= 1 + 1e-6


def test_slice_disk_to_segment():
    body = LpBall(3, 2)
    oracle, frame = slice_separation(body, la.mat([[0, 0, 1]]), la.vec([0]))
    assert oracle.dimension == 2
    # the slice is the unit disk in its own coordinates
    assert oracle.membership(la.vec([Fraction(1, 2), 0]), Fraction(1, 1000)) == 1
    assert oracle.membership(la.vec([2, 0]), Fraction(1, 1000)) == 0
    emb = frame.embed(la.vec([1, 0]))
    assert abs(float(la.norm_sq(emb)) - 1) < 1e-9


def test_slice_misses_body():
    body = LpBall(2, 2)
    with pytest.raises(EmptySlice):
        slice_separation(body, la.mat([[1, 0]]), la.vec([2]))


def test_slice_hexagonal_section_of_cube():
    body = cube(3)
    oracle, frame = slice_separation(body, la.mat([[1, 1, 1]]), la.vec([0]))
    inside = frame.project(la.vec([Fraction(1, 2), Fraction(-1, 2), 0]))
    assert oracle.membership(inside, Fraction(1, 1000)) == 1
    outside = frame.project(la.vec([1, -1, 0]))
    # (1,-1,0) is on the cube boundary; 1.5x it leaves the cube
    assert oracle.membership(la.scale(outside, Fraction(3, 2)), Fraction(1, 1000)) == 0


def test_slice_composition_matches_double_slice():
    body = cube(3)
    once, frame1 = slice_separation(body, la.mat([[0, 0, 1]]), la.vec([0]))
    # slice the slice by (the image of) {x1 = 0}: direction in slice coords
    d = frame1.pull_direction(la.vec([1, 0, 0]))
    twice, frame2 = slice_separation(once, la.mat([d]), la.vec([0]))
    direct, frame_d = slice_separation(body, la.mat([[0, 0, 1], [1, 0, 0]]), la.vec([0, 0]))
    for t in range(-6, 7):
        c = la.vec([Fraction(t, 4)])
        assert twice.membership(c, Fraction(1, 1000)) == direct.membership(c, Fraction(1, 1000))
    del frame2, frame_d


def test_gls_volume_of_interval_body():
    body = LpBall(1, 2, scale=Fraction(1, 4))
    out = gls_round(body, Fraction(1, 10))
    assert out.volume <= 0.6
    assert ellipsoid_volume(out.ellipsoid) == pytest.approx(out.volume, rel=1e-6)
