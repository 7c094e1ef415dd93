"""Lattice bases: construction, exact LLL reduction, duals.

A lattice is represented by an n x k rational matrix whose columns
generate it. Rank-deficient input is rejected at construction; nothing
here projects silently.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .errors import RankDeficient


@dataclass(frozen=True)
class LatticeBasis:
    """Columns of `matrix` generate the lattice; rank k = number of columns."""

    matrix: la.Mat  # n x k

    def __post_init__(self):
        cols = la.columns(self.matrix)
        if not cols:
            raise RankDeficient("empty basis")
        if la.det(la.gram(cols)) == 0:
            raise RankDeficient("basis columns are linearly dependent")

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    @property
    def rank(self) -> int:
        return len(self.matrix[0])

    @property
    def columns(self) -> list:
        return la.columns(self.matrix)

    def determinant_sq(self) -> Fraction:
        """det(L)^2 = det(B^t B), exact."""
        return la.det(la.gram(self.columns))

    def determinant(self) -> float:
        return float(self.determinant_sq()) ** 0.5

    def point(self, coeffs) -> la.Vec:
        """Lattice point for integer coefficients."""
        return la.matvec(self.matrix, la.vec(coeffs))

    def coefficients(self, point: la.Vec) -> la.Vec:
        """Exact coordinates of an ambient point in this basis (rank = dim only)."""
        if self.rank != self.dimension:
            raise RankDeficient("coefficient solve needs a square basis")
        return la.solve(self.matrix, point)

    def contains(self, point: la.Vec) -> bool:
        """Exact lattice membership via integrality of basis coordinates."""
        try:
            coeffs = self.coefficients(la.vec(point))
        except RankDeficient:
            return False
        return all(c.denominator == 1 for c in coeffs)

    def dual(self) -> "LatticeBasis":
        """Dual basis B (B^t B)^{-1}; for square B this is B^{-t}."""
        bt = la.transpose(self.matrix)
        g_inv = la.inverse(la.matmul(bt, self.matrix))
        return LatticeBasis(la.matmul(self.matrix, g_inv))


def lll_reduce(basis: LatticeBasis, delta: Fraction = Fraction(3, 4),
               inner: la.Mat | None = None):
    """Exact LLL reduction of the basis columns.

    `inner` optionally supplies a positive-definite matrix A so the
    reduction happens with respect to <x,y> = x^t A y. Returns
    (reduced LatticeBasis, unimodular transform U) with B_new = B_old U.
    """
    cols = [la.vec(c) for c in basis.columns]
    k = len(cols)
    n = basis.dimension
    unimod = [[Fraction(1) if i == j else Fraction(0) for j in range(k)] for i in range(k)]

    def ip(u, v):
        if inner is None:
            return la.dot(u, v)
        return la.quadratic_form(inner, u, v)

    def gso():
        ortho = []
        mu = [[Fraction(0)] * k for _ in range(k)]
        for i in range(k):
            g = cols[i]
            for j in range(i):
                mu[i][j] = ip(cols[i], ortho[j]) / ip(ortho[j], ortho[j])
                g = la.sub(g, la.scale(ortho[j], mu[i][j]))
            ortho.append(g)
        return ortho, mu

    ortho, mu = gso()
    i = 1
    while i < k:
        for j in range(i - 1, -1, -1):
            q = round(mu[i][j])
            if q:
                cols[i] = la.sub(cols[i], la.scale(cols[j], q))
                for r in range(k):
                    unimod[r][i] -= q * unimod[r][j]
                ortho, mu = gso()
        if ip(ortho[i], ortho[i]) >= (delta - mu[i][i - 1] ** 2) * ip(ortho[i - 1], ortho[i - 1]):
            i += 1
        else:
            cols[i], cols[i - 1] = cols[i - 1], cols[i]
            for r in range(k):
                unimod[r][i], unimod[r][i - 1] = unimod[r][i - 1], unimod[r][i]
            ortho, mu = gso()
            i = max(i - 1, 1)
    del n
    reduced = LatticeBasis(la.from_columns(cols))
    return reduced, tuple(tuple(row) for row in unimod)
