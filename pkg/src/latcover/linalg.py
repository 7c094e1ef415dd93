"""Exact rational vectors and matrices on top of fractions.Fraction.

Vectors are tuples of Fraction, matrices are tuples of row tuples.
Everything here is pure and exact; float conversion happens only at the
boundary (to_float). Exactness is what makes enumeration certificates
trustworthy, so none of these helpers may fall back to floats.
"""

from fractions import Fraction
from math import isqrt

from .errors import NotPositiveDefinite, RankDeficient

Vec = tuple
Mat = tuple

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x, den=None) -> Fraction:
    """Coerce ints, strings like '3/4', and floats (exactly) to Fraction."""
    if den is not None:
        return Fraction(x, den)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)  # exact binary expansion
    return Fraction(x)


def vec(xs) -> Vec:
    return tuple(frac(x) for x in xs)


def mat(rows) -> Mat:
    m = tuple(vec(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def zeros(n: int) -> Vec:
    return (ZERO,) * n


def identity(n: int) -> Mat:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def neg(u: Vec) -> Vec:
    return tuple(-a for a in u)


def scale(u: Vec, c) -> Vec:
    c = frac(c)
    return tuple(c * a for a in u)


def dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), ZERO)


def norm_sq(u: Vec) -> Fraction:
    return dot(u, u)


def matvec(m: Mat, v: Vec) -> Vec:
    return tuple(dot(row, v) for row in m)


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m)) if m else ()


def matmul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def mat_scale(m: Mat, c) -> Mat:
    c = frac(c)
    return tuple(tuple(c * x for x in row) for row in m)


def columns(m: Mat) -> list:
    return [tuple(row[j] for row in m) for j in range(len(m[0]))] if m else []


def from_columns(cols) -> Mat:
    return tuple(tuple(col[i] for col in cols) for i in range(len(cols[0])))


def quadratic_form(a: Mat, u: Vec, v: Vec | None = None) -> Fraction:
    """u^t A v (v defaults to u)."""
    return dot(u, matvec(a, v if v is not None else u))


def is_symmetric(m: Mat) -> bool:
    n = len(m)
    return all(m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))


def det(m: Mat) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination."""
    n = len(m)
    a = [list(row) for row in m]
    sign = 1
    result = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return ZERO
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        result *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return sign * result


def solve(m: Mat, rhs: Vec) -> Vec:
    """Solve m x = rhs exactly; raises RankDeficient when singular."""
    n = len(m)
    a = [list(row) + [r] for row, r in zip(m, rhs, strict=True)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise RankDeficient("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(a[r][n] for r in range(n))


def inverse(m: Mat) -> Mat:
    n = len(m)
    cols = [solve(m, tuple(ONE if i == j else ZERO for i in range(n))) for j in range(n)]
    return from_columns(cols)


def rank(m: Mat) -> int:
    rows = [list(r) for r in m]
    rk = 0
    ncols = len(rows[0]) if rows else 0
    col = 0
    for col in range(ncols):
        piv = next((r for r in range(rk, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = 1 / rows[rk][col]
        rows[rk] = [x * inv for x in rows[rk]]
        for r in range(len(rows)):
            if r != rk and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rk])]
        rk += 1
    return rk


def ldlt(a: Mat):
    """Exact LDL^t decomposition of a symmetric matrix.

    Returns (L, D) with L unit lower triangular and D the diagonal as a
    vector, such that A = L diag(D) L^t. Raises NotPositiveDefinite if
    any pivot is <= 0; this is the positive-definiteness certificate used
    everywhere exact PD certification is required.
    """
    n = len(a)
    if not is_symmetric(a):
        raise ValueError("ldlt needs a symmetric matrix")
    lower = [[ZERO] * n for _ in range(n)]
    diag = [ZERO] * n
    for j in range(n):
        s = a[j][j] - sum((lower[j][k] * lower[j][k] * diag[k] for k in range(j)), ZERO)
        if s <= 0:
            raise NotPositiveDefinite(f"pivot {j} is {s}")
        diag[j] = s
        lower[j][j] = ONE
        for i in range(j + 1, n):
            lower[i][j] = (a[i][j] - sum((lower[i][k] * lower[j][k] * diag[k] for k in range(j)), ZERO)) / s
    return tuple(tuple(row) for row in lower), tuple(diag)


def is_positive_definite(a: Mat) -> bool:
    try:
        ldlt(a)
        return True
    except NotPositiveDefinite:
        return False


def gram(b_columns) -> Mat:
    """Gram matrix of a list of column vectors."""
    return tuple(tuple(dot(u, v) for v in b_columns) for u in b_columns)


def sqrt_bounds(x: Fraction, rel: Fraction = Fraction(1, 10**15)):
    """Exact two-sided enclosure of sqrt(x): lo <= sqrt(x) <= hi, hi - lo <= rel*hi.

    Works through integer square roots of scaled numerators, so the bounds
    are certified rationals even when sqrt(x) is irrational.
    """
    x = frac(x)
    if x < 0:
        raise ValueError("sqrt of negative rational")
    if x == 0:
        return ZERO, ZERO
    # Scale so that the integer sqrt is large enough for the target precision.
    k = max(1, (10**16 * x.denominator) // max(1, x.numerator))
    scaled = x * k * k
    root = isqrt(scaled.numerator // scaled.denominator)
    lo = Fraction(root, k)
    while lo * lo > x:
        root -= 1
        lo = Fraction(root, k)
    hi = Fraction(root + 1, k)
    while hi * hi < x:
        root += 1
        hi = Fraction(root + 1, k)
    return lo, hi


def sqrt_approx(x, eps=Fraction(1, 10**12)) -> Fraction:
    """A rational within eps of sqrt(x)."""
    lo, hi = sqrt_bounds(frac(x))
    mid = (lo + hi) / 2
    # enclosure from sqrt_bounds is far tighter than any eps we use
    del eps
    return mid


def snap(x, bits: int = 24) -> Fraction:
    """Nearest fraction with denominator <= 2^bits; keeps downstream exact
    arithmetic cheap when values originate from floats."""
    return frac(x).limit_denominator(1 << bits)


def snap_vec(v, bits: int = 24) -> Vec:
    return tuple(snap(x, bits) for x in v)


def snap_mat(m, bits: int = 24) -> Mat:
    return tuple(tuple(snap(x, bits) for x in row) for row in m)


def to_float_vec(v: Vec):
    return [float(x) for x in v]


def to_float_mat(m: Mat):
    return [[float(x) for x in row] for row in m]


def integer_row_reduce(w):
    """Unimodular U with w^t U = (g, 0, ..., 0) for an integer vector w.

    Returns (g, U_columns) where g = gcd(w) (0 when w = 0). The first
    column of U certifies w^t u0 = g; the rest span the full integer
    kernel of w^t (they generate it, not just a finite-index sublattice,
    because U is unimodular).
    """
    k = len(w)
    w = [int(x) for x in w]
    cur = list(w)
    ucols = [[1 if i == j else 0 for i in range(k)] for j in range(k)]
    # gcd-eliminate entries 1..k-1 into entry 0 by unimodular column ops
    for j in range(1, k):
        a, b = cur[0], cur[j]
        if b == 0:
            continue
        g, x, y = _xgcd(a, b)
        # new col0 = x*col0 + y*colj ; new colj = -(b/g)*col0 + (a/g)*colj
        c0 = [x * ucols[0][i] + y * ucols[j][i] for i in range(k)]
        cj = [(-b // g) * ucols[0][i] + (a // g) * ucols[j][i] for i in range(k)]
        ucols[0], ucols[j] = c0, cj
        cur[0], cur[j] = g, 0
    g = cur[0]
    if g < 0:
        g = -g
        ucols[0] = [-x for x in ucols[0]]
    return g, [tuple(Fraction(x) for x in col) for col in ucols]


def _xgcd(a, b):
    if a == 0 and b == 0:
        return 0, 0, 0
    x0, x1, y0, y1 = 1, 0, 0, 1
    r0, r1 = a, b
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return r0, x0, y0


def gram_schmidt(cols):
    """Orthogonal (not normalized) rational Gram-Schmidt of column vectors.

    Returns (orthogonal columns, mu) with mu[i][j] = <b_i, g_j>/<g_j, g_j>
    for j < i. Zero columns are rejected.
    """
    ortho = []
    mu = []
    for b in cols:
        coeffs = []
        g = b
        for q in ortho:
            c = dot(b, q) / dot(q, q)
            coeffs.append(c)
            g = sub(g, scale(q, c))
        if all(x == 0 for x in g):
            raise RankDeficient("dependent column in gram_schmidt")
        ortho.append(g)
        mu.append(coeffs)
    return ortho, mu
