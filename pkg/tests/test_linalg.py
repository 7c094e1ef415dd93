from fractions import Fraction

import pytest

from latcover import linalg as la
from latcover.errors import NotPositiveDefinite, RankDeficient


def test_frac_parses_strings_and_floats_exactly():
    assert la.frac("355/113") == Fraction(355, 113)
    assert la.frac(0.5) == Fraction(1, 2)
    assert la.frac(3) == 3


def test_det_and_inverse_roundtrip():
    m = la.mat([[2, 1], [1, 2]])
    assert la.det(m) == 3
    inv = la.inverse(m)
    assert la.matmul(m, inv) == la.identity(2)


def test_solve_exact():
    m = la.mat([[1, 2], [3, 5]])
    x = la.solve(m, la.vec([5, 13]))
    assert la.matvec(m, x) == la.vec([5, 13])


def test_solve_singular_raises():
    with pytest.raises(RankDeficient):
        la.solve(la.mat([[1, 2], [2, 4]]), la.vec([1, 1]))


def test_ldlt_hand_elimination():
    # [[2,1],[1,2]] eliminates to D = (2, 3/2); verify by reconstruction
    a = la.mat([[2, 1], [1, 2]])
    lower, diag = la.ldlt(a)
    assert diag == (Fraction(2), Fraction(3, 2))
    n = 2
    rebuilt = tuple(
        tuple(sum(lower[i][k] * diag[k] * lower[j][k] for k in range(n)) for j in range(n))
        for i in range(n)
    )
    assert rebuilt == a


def test_ldlt_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        la.ldlt(la.mat([[1, 2], [2, 1]]))


def test_sqrt_bounds_encloses():
    for x in [Fraction(2), Fraction(9), Fraction(1, 3), Fraction(10**8, 7)]:
        lo, hi = la.sqrt_bounds(x)
        assert lo * lo <= x <= hi * hi
        assert hi - lo <= Fraction(1, 10**12) * max(hi, 1)


def test_gram_schmidt_orthogonal():
    cols = [la.vec([1, 1, 0]), la.vec([1, 0, 1]), la.vec([0, 1, 1])]
    ortho, _ = la.gram_schmidt(cols)
    for i in range(3):
        for j in range(i):
            assert la.dot(ortho[i], ortho[j]) == 0


def test_rank():
    assert la.rank(la.mat([[1, 2], [2, 4]])) == 1
    assert la.rank(la.identity(3)) == 3
