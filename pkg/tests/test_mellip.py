import math
from fractions import Fraction

import numpy as np
import pytest

from latcover import linalg as la
from latcover.bodies import EllipsoidBody, LpBall, PolytopeBody
from latcover.ellipsoid import Ellipsoid, ball
from latcover.mellip import (CoverBudget, MEllipsoidConfig, build_cover,
                             covering_for_body, estimate_centroid,
                             estimate_inertial_ellipsoid, lp_m_ellipsoid,
                             m_ellipsoid, m_gen, scaled_polar_oracle,
                             width_norm_body)
from latcover.sampling import RngState, uniform_density
from latcover.voronoi import euclidean


def cube(n, half=1):
    rows, rhs = [], []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        rows.append(tuple(e))
        rows.append(tuple(-x for x in e))
        rhs += [half, half]
    return PolytopeBody(la.mat(rows), la.vec(rhs))


def test_lp_m_ellipsoid_p2_is_unit_ball():
    e = lp_m_ellipsoid(4, 2)
    assert e.shape == la.identity(4)


def test_lp_m_ellipsoid_pinf_contains_cube():
    e = lp_m_ellipsoid(4, "inf")  # 2 B_2^4
    for signs in [(1, 1, 1, 1), (1, -1, 1, -1)]:
        assert e.gauge_sq(la.vec(signs)) <= 1


def test_lp_m_ellipsoid_p1_inscribed():
    e = lp_m_ellipsoid(4, 1)  # (1/2) B_2^4: boundary has l1 norm <= 1
    body = LpBall(4, 1)
    for i in range(4):
        x = [0] * 4
        x[i] = Fraction(1, 2)
        assert body.gauge_cmp(la.vec(x), la.ONE) <= 0
        assert e.gauge_sq(la.vec(x)) == 1


def test_build_cover_cube_with_scaled_ball():
    n = 3
    body = cube(n)
    e = lp_m_ellipsoid(n, "inf")  # sqrt(3) B_2^3, inscribed box = cube itself
    result = build_cover(body, e, CoverBudget(13 * math.e, n))
    assert not result.exceeded
    assert 1 <= result.covering.size <= 3**n


def test_build_cover_b1_with_analytic_ellipsoid():
    n = 3
    body = LpBall(n, 1)
    e = lp_m_ellipsoid(n, 1)
    result = build_cover(body, e, CoverBudget(13 * math.e, n))
    assert not result.exceeded
    assert result.covering.size <= CoverBudget(13 * math.e, n).hard_cap


def test_build_cover_exceeds_budget_on_area_bound():
    # 10 B_2^2 cannot be covered by ~69 unit-disk boxes
    body = LpBall(2, 2, scale=10)
    result = build_cover(body, ball(2), CoverBudget(1.0, 2))
    assert result.exceeded
    assert result.tiles_seen > result.budget.hard_cap


def test_build_cover_monotone_in_h():
    body = LpBall(2, 2, scale=3)
    small = build_cover(body, ball(2), CoverBudget(1.0, 2))
    large = build_cover(body, ball(2), CoverBudget(4.0, 2))
    assert not large.exceeded
    if not small.exceeded:
        assert small.covering.size == large.covering.size


def test_covering_validates_samples():
    n = 2
    body = LpBall(n, 2, scale=2)
    cover = covering_for_body(body)
    pts = __import__("latcover.sampling", fromlist=["hit_and_run_sample"]).hit_and_run_sample(
        uniform_density(body), RngState(5), burn_in=200, count=500, thinning=2)
    misses = [p for p in pts if not cover.covers_point(p)]
    assert misses == []


def test_covering_tiles_have_distinct_coords():
    body = cube(2)
    cover = covering_for_body(body, h=13 * math.e)
    assert len(set(cover.translate_coords)) == cover.size


def test_width_norm_bodies_exact():
    w_inf = width_norm_body(LpBall(3, "inf"))
    assert w_inf.p == 1 and w_inf.scale == Fraction(1, 2)
    w_ball = width_norm_body(LpBall(2, 2, scale=2))
    assert w_ball.scale == Fraction(1, 4)
    w_cube = width_norm_body(cube(2))
    # cube [-1,1]^2 width along e1 is 2, so gauge of e1 in (K-K)* is 2
    assert w_cube.gauge_key(la.vec([1, 0])) == 2


def test_width_norm_ellipsoid():
    e = Ellipsoid(la.mat([[4, 0], [0, 1]]))  # semi-axes 1/2 and 1
    w = width_norm_body(EllipsoidBody(e))
    # width of K along e1 = 2 * (1/2) = 1 -> gauge of e1 in (K-K)* is 1
    assert w.gauge_key(la.vec([1, 0])) == 1


def test_scaled_polar_oracle_lp():
    s = scaled_polar_oracle(LpBall(3, "inf"), 3)
    assert s.p == 1 and s.scale == 3
    assert s.membership(la.zeros(3), la.frac(1, 100)) == 1


def test_estimate_centroid_symmetric_bodies():
    for body in (LpBall(2, 2), cube(2)):
        est = estimate_centroid(body, RngState(3), samples=400, burn_in=300, thinning=3)
        assert est.ok
        assert max(abs(float(v)) for v in est.point) < 0.15


def test_estimate_centroid_shifted_cube():
    # [0,2]^2 presented centered at (1,1)
    body = PolytopeBody(la.mat([[1, 0], [-1, 0], [0, 1], [0, -1]]),
                        la.vec([2, 0.0001, 2, 0.0001]))
    est = estimate_centroid(body, RngState(4), samples=400, burn_in=300, thinning=3)
    assert est.ok
    assert abs(float(est.point[0]) - 1) < 0.25
    assert abs(float(est.point[1]) - 1) < 0.25


def test_estimate_inertial_square():
    e = estimate_inertial_ellipsoid(uniform_density(cube(2)), RngState(6),
                                    count=10000, burn_in=400, thinning=3)
    shape = np.array(la.to_float_mat(e.shape))
    assert abs(shape[0, 0] - 3) < 0.5
    assert abs(shape[1, 1] - 3) < 0.5


def test_estimate_inertial_disk():
    e = estimate_inertial_ellipsoid(uniform_density(LpBall(2, 2)), RngState(7),
                                    count=8000, burn_in=400, thinning=3)
    shape = np.array(la.to_float_mat(e.shape))
    assert abs(shape[0, 0] - 4) < 0.6
    assert abs(shape[1, 1] - 4) < 0.6


def test_m_gen_ball_roundish():
    body = LpBall(3, 2)
    e = m_gen(body, RngState(11), moment_count=3000, burn_in=300, thinning=3)
    axes = e.semi_axes()
    assert axes[0] / axes[-1] < 3.0


def test_m_ellipsoid_cube_certifies():
    body = cube(3)
    cfg = MEllipsoidConfig(moment_count=2500, burn_in=300, thinning=3,
                           centroid_samples=200)
    result = m_ellipsoid(body, RngState(13), cfg)
    assert result.covering.size <= result.budgets["primal_hard_cap"]
    assert result.dual_covering.size <= result.budgets["dual_hard_cap"]
    assert result.attempts <= 20


def test_m_ellipsoid_with_forced_unit_ball():
    # E = K case: covering of B_2^2 by B_2^2 must admit few tiles
    body = LpBall(2, 2)
    result = build_cover(body, ball(2), CoverBudget(13 * math.e, 2))
    assert not result.exceeded
    assert result.covering.size <= 9
    assert result.covering.covers_point((0.5, 0.5))
