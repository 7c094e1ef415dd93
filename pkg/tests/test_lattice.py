from fractions import Fraction

import pytest

from latcover import linalg as la
from latcover.errors import RankDeficient
from latcover.lattice import LatticeBasis, lll_reduce


def test_rank_deficient_rejected():
    with pytest.raises(RankDeficient):
        LatticeBasis(la.mat([[1, 2], [2, 4]]))


def test_determinant_sq():
    b = LatticeBasis(la.mat([[2, 0], [0, 3]]))
    assert b.determinant_sq() == 36


def test_contains_exact():
    b = LatticeBasis(la.mat([[2, 1], [0, 1]]))
    assert b.contains(la.vec([3, 1]))
    assert not b.contains(la.vec([Fraction(1, 2), 0]))


def test_dual_of_square_basis():
    b = LatticeBasis(la.mat([[2, 0], [0, 4]]))
    d = b.dual()
    assert d.matrix == la.mat([[Fraction(1, 2), 0], [0, Fraction(1, 4)]])


def test_lll_identity_fixed_point():
    b = LatticeBasis(la.identity(3))
    red, u = lll_reduce(b)
    assert red.matrix == la.identity(3)
    assert u == la.identity(3)


def test_lll_reduces_skewed_basis():
    # columns (1,0) and (100,1): reduced max column norm <= sqrt(2)
    b = LatticeBasis(la.mat([[1, 100], [0, 1]]))
    red, u = lll_reduce(b)
    assert max(la.norm_sq(c) for c in red.columns) <= 2
    # unimodular: |det U| = 1 and B_new = B_old U
    assert abs(la.det(u)) == 1
    assert la.matmul(b.matrix, u) == red.matrix


def test_lll_preserves_determinant():
    b = LatticeBasis(la.mat([[3, 1, 4], [1, 5, 9], [2, 6, 5]]))
    red, _ = lll_reduce(b)
    assert red.determinant_sq() == b.determinant_sq()


def test_lll_with_inner_product():
    a = la.mat([[1, 0], [0, 100]])
    b = LatticeBasis(la.mat([[1, 0], [5, 1]]))
    red, _ = lll_reduce(b, inner=a)
    # under diag(1,100), short vectors avoid the second coordinate
    norms = sorted(la.quadratic_form(a, c) for c in red.columns)
    assert norms[0] == 1
