import math
import random
from fractions import Fraction

import pytest

from latcover import linalg as la
from latcover.ellipsoid import (Ellipsoid, ball, cholesky, ellipsoid_volume,
                                inscribed_parallelepiped, polar_ellipsoid,
                                unit_ball_volume)
from latcover.errors import NonCentered, NotPositiveDefinite


def random_pd(n, rng):
    m = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        m[i][i] += n * 5
    mm = la.mat(m)
    return la.matmul(la.transpose(mm), mm)


def test_cholesky_identity():
    v, (lower, diag) = cholesky(la.identity(3))
    assert all(abs(v[i][j] - (1.0 if i == j else 0.0)) < 1e-12 for i in range(3) for j in range(3))
    assert lower == la.identity(3)
    assert diag == (1, 1, 1)


def test_cholesky_diagonal():
    v, _ = cholesky(la.mat([[4, 0], [0, 9]]))
    assert abs(v[0][0] - 2) < 1e-12 and abs(v[1][1] - 3) < 1e-12


def test_cholesky_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        cholesky(la.mat([[0, 0], [0, 1]]))


def test_volume_disk():
    assert ellipsoid_volume(ball(2)) == pytest.approx(math.pi)


def test_volume_radius_two_disk():
    e = Ellipsoid(la.mat([[Fraction(1, 4), 0], [0, Fraction(1, 4)]]))
    assert ellipsoid_volume(e) == pytest.approx(4 * math.pi)


def test_volume_axes_product():
    e = Ellipsoid(la.mat([[1, 0, 0], [0, 4, 0], [0, 0, 9]]))
    assert ellipsoid_volume(e) == pytest.approx(unit_ball_volume(3) / 6)


def test_volume_scaling_law():
    rng = random.Random(7)
    e = Ellipsoid(random_pd(3, rng))
    c = Fraction(5, 3)
    assert ellipsoid_volume(e.scaled(c)) == pytest.approx(
        float(c) ** 3 * ellipsoid_volume(e), rel=1e-12)


def test_polar_diagonal():
    e = Ellipsoid(la.mat([[4, 0], [0, 1]]))
    assert polar_ellipsoid(e).shape == la.mat([[Fraction(1, 4), 0], [0, 1]])


def test_polar_involution_exact():
    rng = random.Random(3)
    for _ in range(5):
        a = random_pd(3, rng)
        e = Ellipsoid(a)
        assert polar_ellipsoid(polar_ellipsoid(e)).shape == a


def test_polar_requires_centered():
    e = Ellipsoid(la.identity(2), la.vec([1, 0]))
    with pytest.raises(NonCentered):
        polar_ellipsoid(e)


def test_inscribed_box_of_disk():
    # unit disk -> square with half-width 1/sqrt(2)
    par = inscribed_parallelepiped(ball(2))
    w = 1 / math.sqrt(2)
    verts = sorted(tuple(round(x, 9) for x in par.box.vertex(s))
                   for s in [(1, 1), (1, -1), (-1, 1), (-1, -1)])
    expect = sorted(tuple(round(x, 9) for x in (sx * w, sy * w))
                    for sx in (1, -1) for sy in (1, -1))
    assert verts == expect


def test_inscribed_box_of_scaled_ball_is_unit_cube():
    n = 3
    e = ball(n, la.sqrt_bounds(la.frac(n))[1])  # ~sqrt(n) B_2
    par = inscribed_parallelepiped(e)
    for bvec in par.box.basis_vectors:
        assert max(abs(x) for x in bvec) == pytest.approx(1.0, rel=1e-9)


def test_inscribed_box_halfwidths_anisotropic():
    e = Ellipsoid(la.mat([[1, 0], [0, Fraction(1, 4)]]))
    par = inscribed_parallelepiped(e)
    widths = sorted(max(abs(x) for x in bvec) for bvec in par.box.basis_vectors)
    assert widths[0] == pytest.approx(1 / math.sqrt(2), rel=1e-9)
    assert widths[1] == pytest.approx(2 / math.sqrt(2), rel=1e-9)


def test_box_sandwich_p_in_e_in_sqrt_n_p():
    rng = random.Random(11)
    for n in (2, 3):
        e = Ellipsoid(random_pd(n, rng))
        par = inscribed_parallelepiped(e)
        for signs in [(1,) * n, (-1,) + (1,) * (n - 1)]:
            v = par.box.vertex(signs)
            assert float(e.gauge_sq(la.vec(v))) <= 1 + 1e-9  # P inside E
        # E inside sqrt(n) P: box gauge of any E-boundary point <= sqrt(n)
        for _ in range(10):
            d = [rng.gauss(0, 1) for _ in range(n)]
            gv = math.sqrt(float(e.gauge_sq(la.vec(d))))
            x = [di / gv for di in d]
            assert par.gauge_inf(x) <= math.sqrt(n) * (1 + 1e-9)
