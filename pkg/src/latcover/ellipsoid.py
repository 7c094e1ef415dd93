"""Ellipsoids E(A, a) = {x : (x-a)^t A (x-a) <= 1} and their parallelepipeds.

The shape matrix is exact rational and PD-certified by exact LDL^t.
The Cholesky factor used for tilings is 64-bit floating point; only the
PD certificate and gauge evaluations stay exact.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg as la
from .errors import NonCentered, NotPositiveDefinite


def cholesky(a: la.Mat):
    """Factor a symmetric rational matrix as A = V^t V.

    Returns (V_float, (L, D)) where V is an upper-triangular float factor
    and (L, D) the exact rational LDL^t decomposition certifying positive
    definiteness. Raises NotPositiveDefinite when a pivot is <= 0.
    """
    lower, diag = la.ldlt(a)  # raises on bad pivot
    lf = np.array(la.to_float_mat(lower))
    df = np.sqrt(np.array([float(d) for d in diag]))
    v = (lf * df).T  # A = (L sqrt(D)) (L sqrt(D))^t = V^t V
    return v, (lower, diag)


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


@dataclass(frozen=True)
class Ellipsoid:
    shape: la.Mat
    center: la.Vec = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.center is None:
            object.__setattr__(self, "center", la.zeros(len(self.shape)))
        if not la.is_symmetric(self.shape):
            raise NotPositiveDefinite("shape matrix must be symmetric")
        la.ldlt(self.shape)  # PD certificate

    @property
    def dimension(self) -> int:
        return len(self.shape)

    def gauge_sq(self, x: la.Vec) -> Fraction:
        """Exact squared gauge (x-a)^t A (x-a)."""
        d = la.sub(la.vec(x), self.center)
        return la.quadratic_form(self.shape, d)

    def contains(self, x: la.Vec) -> bool:
        return self.gauge_sq(x) <= 1

    def scaled(self, c) -> "Ellipsoid":
        """c * E(A, a) about the center: shape scales by 1/c^2."""
        c = la.frac(c)
        return Ellipsoid(la.mat_scale(self.shape, 1 / (c * c)), self.center)

    def translated(self, t: la.Vec) -> "Ellipsoid":
        return Ellipsoid(self.shape, la.add(self.center, la.vec(t)))

    def semi_axes(self):
        """Float semi-axis lengths (1/sqrt of eigenvalues of A), descending."""
        w = np.linalg.eigvalsh(np.array(la.to_float_mat(self.shape)))
        return sorted((1.0 / math.sqrt(x) for x in w), reverse=True)


def ball(n: int, radius=1) -> Ellipsoid:
    r = la.frac(radius)
    return Ellipsoid(la.mat_scale(la.identity(n), 1 / (r * r)))


def ellipsoid_volume(e: Ellipsoid) -> float:
    """vol(B_2^n) * det(A)^{-1/2}."""
    n = e.dimension
    d = la.det(e.shape)
    return unit_ball_volume(n) / math.sqrt(float(d))


def polar_ellipsoid(e: Ellipsoid) -> Ellipsoid:
    """Polar of an origin-centered ellipsoid: E(A)* = E(A^{-1}), exact."""
    if any(c != 0 for c in e.center):
        raise NonCentered("polar is defined for origin-centered ellipsoids")
    return Ellipsoid(la.inverse(e.shape))


@dataclass(frozen=True)
class Parallelepiped:
    """Box spanned by +-basis_vectors around `center`.

    The box tiles space under the lattice stepping by twice each edge
    vector (tiling_point). For the box inscribed in E(A) the edges are
    (1/sqrt(n)) b_i with b_i the columns of V^{-1}.
    """

    basis_vectors: tuple  # n float vectors, the half-width edges
    center: tuple = field(default=())

    def __post_init__(self):
        if not self.center:
            object.__setattr__(self, "center", (0.0,) * len(self.basis_vectors[0]))

    @property
    def dimension(self) -> int:
        return len(self.basis_vectors[0])

    def vertex(self, signs) -> tuple:
        v = np.array(self.center, dtype=float)
        for s, b in zip(signs, self.basis_vectors, strict=True):
            v = v + s * np.array(b)
        return tuple(v)

    def tiling_point(self, z) -> tuple:
        """Center of tile with integer coordinates z (steps of 2x each edge)."""
        v = np.array(self.center, dtype=float)
        for zi, b in zip(z, self.basis_vectors, strict=True):
            v = v + 2.0 * zi * np.array(b)
        return tuple(v)


@dataclass(frozen=True)
class InscribedParallelepiped:
    """Inscribed box of an ellipsoid plus the data needed for tilings."""

    box: Parallelepiped
    ellipsoid: Ellipsoid
    v_rows: tuple  # rows of the float Cholesky factor V (A = V^t V)

    def gauge_inf(self, x) -> float:
        """Box gauge: sqrt(n) * max_i |<b_i, x - c>_A| evaluated in floats."""
        n = self.box.dimension
        d = np.array(x, dtype=float) - np.array(self.box.center, dtype=float)
        return math.sqrt(n) * float(np.max(np.abs(np.array(self.v_rows) @ d)))


def inscribed_parallelepiped(e: Ellipsoid) -> InscribedParallelepiped:
    """Maximum-volume inscribed box of an origin-centered ellipsoid.

    The box is {x : |<b_i, x>_A| <= 1/sqrt(n)} for b_i the columns of
    V^{-1}; it satisfies P subseteq E subseteq sqrt(n) P and
    vol(P) = (2/sqrt(n))^n det(A)^{-1/2}.
    """
    if any(c != 0 for c in e.center):
        raise NonCentered("inscribed parallelepiped needs an origin-centered ellipsoid")
    v, _ = cholesky(e.shape)
    n = e.dimension
    b = np.linalg.inv(v)  # columns b_i
    edges = tuple(tuple(b[:, i] / math.sqrt(n)) for i in range(n))
    box = Parallelepiped(basis_vectors=edges)
    return InscribedParallelepiped(box=box, ellipsoid=e, v_rows=tuple(map(tuple, v)))
