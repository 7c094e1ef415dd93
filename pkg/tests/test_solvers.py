import random
from fractions import Fraction

import pytest

from latcover import linalg as la
from latcover.bodies import LpBall, PolytopeBody
from latcover.bruteforce import brute_cvp, brute_enum, brute_svp
from latcover.lattice import LatticeBasis, lll_reduce
from latcover.mellip import covering_for_body
from latcover.solvers import (EnumRequest, EnumSession, closest_vectors,
                              count_G, lattice_enum, shortest_vectors)

Z2 = LatticeBasis(la.identity(2))
Z3 = LatticeBasis(la.identity(3))


def pts_set(points):
    return {tuple(p) for p in points}


def hexagon(scale=1):
    # centrally symmetric hexagon: |x| <= s, |y| <= s, |x + y| <= s
    rows = la.mat([[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [-1, -1]])
    s = la.frac(scale)
    return PolytopeBody(rows, la.vec([s] * 6))


def sandwich_ok(result_pts, lattice, body, center, d, eps):
    inner = pts_set(brute_enum(lattice, body, center, d))
    outer = pts_set(brute_enum(lattice, body, center, la.frac(d) + la.frac(eps)))
    got = pts_set(result_pts)
    return inner <= got <= outer


def test_enum_linf_nine_points():
    body = LpBall(2, "inf")
    cover = covering_for_body(body)
    req = EnumRequest(body, Z2, la.zeros(2), Fraction(3, 2), Fraction(1, 10))
    pts = lattice_enum(req, cover)
    assert len(pts) == 9
    assert sandwich_ok(pts, Z2, body, la.zeros(2), Fraction(3, 2), Fraction(1, 10))


def test_enum_disk_five_points():
    body = LpBall(2, 2)
    cover = covering_for_body(body)
    req = EnumRequest(body, Z2, la.zeros(2), la.ONE, Fraction(1, 100))
    pts = lattice_enum(req, cover)
    assert len(pts) == 5


def test_enum_b1_shifted_sandwich():
    body = LpBall(3, 1)
    cover = covering_for_body(body)
    center = la.vec([Fraction(1, 5), 0, 0])
    req = EnumRequest(body, Z3, center, la.ONE, Fraction(1, 20))
    pts = lattice_enum(req, cover)
    assert sandwich_ok(pts, Z3, body, center, la.ONE, Fraction(1, 20))


def test_svp_z2_ball():
    report = shortest_vectors(LpBall(2, 2), Z2, Fraction(1, 10))
    assert pts_set(report.result_set) == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_svp_z2_l1():
    report = shortest_vectors(LpBall(2, 1), Z2, Fraction(1, 10))
    assert pts_set(report.result_set) == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_svp_zero_never_included():
    report = shortest_vectors(LpBall(2, "inf"), Z2, Fraction(1, 2))
    assert (0, 0) not in pts_set(report.result_set)


def test_svp_scaling_equivariance():
    lat = LatticeBasis(la.mat([[2, 1], [0, 3]]))
    a = shortest_vectors(LpBall(2, 1), lat, Fraction(1, 10))
    b = shortest_vectors(LpBall(2, 1, scale=Fraction(7, 3)), lat, Fraction(1, 10))
    assert pts_set(a.result_set) == pts_set(b.result_set)


@pytest.mark.parametrize("body_factory", [
    lambda: LpBall(3, 1), lambda: LpBall(3, "inf")], ids=["b1", "binf"])
def test_svp_random_bases_sandwich(body_factory):
    rng = random.Random(71)
    body = body_factory()
    cover = covering_for_body(body)
    done = 0
    while done < 8:
        m = la.mat([[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)])
        if la.det(m) == 0:
            continue
        done += 1
        lat, _ = lll_reduce(LatticeBasis(m))
        eps = Fraction(1, 10)
        report = shortest_vectors(body, lat, eps, cover=cover)
        lam, exact = brute_svp(lat, body)
        got = pts_set(report.result_set)
        assert pts_set(exact) <= got
        # nothing beyond (1+eps) lambda1, and runtime-proof invariants
        for p in report.result_set:
            assert body.gauge_cmp(la.vec(p), (1 + eps) * lam + la.frac(1, 10**6)) <= 0
        assert report.final_distance <= 2 * lam + la.frac(1, 10**6)
        assert report.final_distance + report.seed_distance <= 3 * lam + la.frac(1, 10**6)


def test_svp_hexagon_body():
    body = hexagon()
    report = shortest_vectors(body, Z2, Fraction(1, 10))
    lam, exact = brute_svp(Z2, body)
    assert pts_set(exact) <= pts_set(report.result_set)
    assert lam == 1


def test_cvp_midpoint():
    report = closest_vectors(LpBall(2, 2), Z2, la.vec([Fraction(1, 2), 0]), Fraction(1, 100))
    assert pts_set(report.result_set) == {(0, 0), (1, 0)}


def test_cvp_linf_four_corners():
    report = closest_vectors(LpBall(2, "inf"), Z2,
                             la.vec([Fraction(1, 2), Fraction(1, 2)]), Fraction(1, 100))
    assert pts_set(report.result_set) == {(0, 0), (1, 0), (0, 1), (1, 1)}


def test_cvp_lattice_point_short_circuit():
    report = closest_vectors(LpBall(2, 1), Z2, la.vec([3, -1]), Fraction(1, 10))
    assert report.result_set == [la.vec([3, -1])]
    assert report.enumeration_calls == 0


def test_cvp_translation_equivariance():
    lat = LatticeBasis(la.mat([[2, 1], [0, 1]]))
    body = LpBall(2, 1)
    cover = covering_for_body(body)
    x = la.vec([Fraction(2, 7), Fraction(3, 5)])
    w = lat.point([1, -2])
    a = closest_vectors(body, lat, x, Fraction(1, 20), cover=cover)
    b = closest_vectors(body, lat, la.add(x, w), Fraction(1, 20), cover=cover)
    assert pts_set(la.add(p, w) for p in a.result_set) == pts_set(b.result_set)


def test_cvp_random_near_lattice_matches_brute():
    rng = random.Random(73)
    body = LpBall(3, "inf")
    cover = covering_for_body(body)
    done = 0
    while done < 6:
        m = la.mat([[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)])
        if la.det(m) == 0:
            continue
        done += 1
        lat, _ = lll_reduce(LatticeBasis(m))
        noise = la.vec([Fraction(rng.randint(-2, 2), 10) for _ in range(3)])
        x = la.add(lat.point([rng.randint(-2, 2) for _ in range(3)]), noise)
        eps = Fraction(1, 20)
        report = closest_vectors(body, lat, x, eps, cover=cover)
        _, exact = brute_cvp(lat, body, x)
        assert pts_set(exact) <= pts_set(report.result_set)


def test_count_g_scaled_cube():
    body = LpBall(2, "inf", scale=Fraction(6, 5))
    shifts = [la.zeros(2), la.vec([Fraction(1, 5), Fraction(1, 5)]),
              la.vec([Fraction(1, 2), Fraction(1, 2)])]
    report = count_G(body, Z2, shifts)
    assert report.g_lower == 9  # (floor(2*1.2) + 1)^2 at a suitable shift


def test_count_g_disk_bounds():
    import math
    body = LpBall(2, 2)
    report = count_G(body, Z2, [la.zeros(2)], vol=math.pi,
                     mu=math.sqrt(0.5) + 1e-9, lambda1=la.ONE,
                     scale_check=la.frac(2))
    assert report.g_lower == 5
    assert report.checks["volume"]["lower_ok"]
    assert report.checks["volume"]["upper_ok"]
    assert report.checks["lambda1"]["ok"]
    assert report.checks["gkl_smooth"]["ok"]


def test_enum_session_reuses_covering():
    body = LpBall(2, 2)
    session = EnumSession(body, Z2)
    a, _ = session.enum(la.zeros(2), la.ONE, Fraction(1, 100))
    calls_after_first = session.enumeration_calls
    session.enum(la.zeros(2), la.frac(2), Fraction(1, 100))
    assert session.enumeration_calls == 2 * calls_after_first
    assert len(a) == 5
