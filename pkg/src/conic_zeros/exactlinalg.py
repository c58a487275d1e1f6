"""Exact integer linear algebra on small matrices.

Matrices are tuples of row tuples of Python ints, vectors are tuples of ints.
Nothing here touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

IntVec = tuple
IntMat = tuple


def as_matrix(rows) -> IntMat:
    return tuple(tuple(int(v) for v in row) for row in rows)


def identity(n: int = 3) -> IntMat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def diag(*entries) -> IntMat:
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: IntMat) -> IntMat:
    return tuple(zip(*m))


def matmul(a: IntMat, b: IntMat) -> IntMat:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(m: IntMat, v: IntVec) -> IntVec:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def norm_sq(v) -> int:
    return sum(x * x for x in v)


def scale(m: IntMat, c) -> IntMat:
    return tuple(tuple(c * x for x in row) for row in m)


def det(m: IntMat) -> int:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = m
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    raise ValueError("only sizes up to 3 are supported")


def adjugate(m: IntMat) -> IntMat:
    """Classical adjoint, so that m @ adj(m) == det(m) * I."""
    n = len(m)
    if n == 2:
        (a, b), (c, d) = m
        return ((d, -b), (-c, a))
    if n != 3:
        raise ValueError("only sizes 2 and 3 are supported")
    cof = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            minor = [[m[r][c] for c in range(3) if c != j] for r in range(3) if r != i]
            cof[i][j] = (-1) ** (i + j) * (minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0])
    return transpose(tuple(tuple(r) for r in cof))


def column(m: IntMat, j: int) -> IntVec:
    return tuple(row[j] for row in m)


def content(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v) -> IntVec:
    g = content(v)
    if g == 0:
        raise ValueError("zero vector has no primitive part")
    return tuple(x // g for x in v)


def canonical_sign(v) -> IntVec:
    """Choose the sign making the first nonzero coordinate positive."""
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def egcd(a: int, b: int):
    """Return (g, x, y) with a*x + b*y == g == gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def inverse_mod(a: int, m: int) -> int:
    return pow(a, -1, m)


def inverse_unimodular(m: IntMat) -> IntMat:
    d = det(m)
    if d not in (1, -1):
        raise ValueError("matrix is not unimodular")
    return scale(adjugate(m), d)


def mod_matrix(m: IntMat, r: int, centered: bool = True) -> IntMat:
    def red(x):
        x %= r
        if centered and 2 * x > r:
            x -= r
        return x
    return tuple(tuple(red(x) for x in row) for row in m)


def smith_normal_form(m: IntMat):
    """Return (U, D, V) with m == U @ D @ V, U and V unimodular, D diagonal.

    The diagonal is non-negative with d1 | d2 | ... and zeros at the end.
    """
    n = len(m)
    D = [list(row) for row in m]
    U = [list(row) for row in identity(n)]
    V = [list(row) for row in identity(n)]

    # D <- E D  ==>  U <- U E^-1 ;  D <- D F  ==>  V <- F^-1 V
    def row_add(i, j, k):  # row_i += k row_j
        for c in range(n):
            D[i][c] += k * D[j][c]
        for r in range(n):
            U[r][j] -= k * U[r][i]

    def col_add(i, j, k):  # col_i += k col_j
        for r in range(n):
            D[r][i] += k * D[r][j]
        for c in range(n):
            V[j][c] -= k * V[i][c]

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        for r in range(n):
            U[r][i], U[r][j] = U[r][j], U[r][i]

    def col_swap(i, j):
        for r in range(n):
            D[r][i], D[r][j] = D[r][j], D[r][i]
        V[i], V[j] = V[j], V[i]

    def row_neg(i):
        D[i] = [-x for x in D[i]]
        for r in range(n):
            U[r][i] = -U[r][i]

    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            if best[0] != t:
                row_swap(t, best[0])
            if best[1] != t:
                col_swap(t, best[1])
            p = D[t][t]
            dirty = False
            for i in range(t + 1, n):
                if D[i][t]:
                    row_add(i, t, -(D[i][t] // p))
                    dirty = dirty or D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    col_add(j, t, -(D[t][j] // p))
                    dirty = dirty or D[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n)
                        if D[i][j] % p), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if D[t][t] < 0:
            row_neg(t)
    return as_matrix(U), as_matrix(D), as_matrix(V)


def _sl_snf(m: IntMat):
    """Smith form with U, V in SL_n; any sign goes into the first diagonal entry."""
    U, D, V = smith_normal_form(m)
    n = len(m)
    flip = tuple(tuple((-1 if i == j == 0 else (1 if i == j else 0)) for j in range(n))
                 for i in range(n))
    if det(U) < 0:
        U, D = matmul(U, flip), matmul(flip, D)
    if det(V) < 0:
        V, D = matmul(flip, V), matmul(D, flip)
    return U, D, V


def sl3_lift(m: IntMat, r: int) -> IntMat:
    """Return an integer matrix of determinant 1 congruent to m modulo r.

    Requires det(m) == 1 mod r.
    """
    if r < 1:
        raise ValueError("modulus must be positive")
    if r == 1:
        return identity(3)
    if (det(m) - 1) % r:
        raise ValueError("determinant is not 1 modulo r")
    m = mod_matrix(m, r)
    U, D, V = _sl_snf(m)
    m1, m2, m3 = D[0][0], D[1][1], D[2][2]
    U0, D0, V0 = _sl_snf(((m1, 0), (r, m2)))
    if abs(D0[0][0]) != 1:
        raise AssertionError("unexpected invariant factor in lift")
    if D0[0][0] == -1:
        U0 = scale(U0, -1)
        D0 = scale(D0, -1)
    dp = D0[1][1]
    k = (dp * m3 - 1) // r
    assert dp * m3 - 1 == k * r
    g, x, y = egcd(dp, r)
    assert g == 1
    t, s = -k * x, k * y
    W = ((dp, s * r), (r, m3 + t * r))
    assert det(W) == 1

    def embed_top(b):
        return ((b[0][0], b[0][1], 0), (b[1][0], b[1][1], 0), (0, 0, 1))

    middle = matmul(matmul(embed_top(U0),
                           ((1, 0, 0), (0, W[0][0], W[0][1]), (0, W[1][0], W[1][1]))),
                    embed_top(V0))
    out = matmul(matmul(U, middle), V)
    assert det(out) == 1
    assert mod_matrix(out, r, False) == mod_matrix(m, r, False)
    small = _column_lift(m, r)
    if small is not None and _height(small) < _height(out):
        return small
    return out


def _height(m: IntMat) -> int:
    return max(abs(x) for row in m for x in row)


def cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _column_lift(m: IntMat, r: int):
    """Size-conscious lift: fix the determinant by moving the third column by r*y.

    det(c1, c2, c3 + r y) = det(m) + r (c1 x c2).y, so we need (c1 x c2).y = -k
    where det(m) = 1 + k r; y is then shortened modulo the kernel of c1 x c2.
    """
    c1, c2, c3 = column(m, 0), column(m, 1), column(m, 2)
    small = [(0, 0, 0)] + [v for v in ((i, j, k) for i in (-1, 0, 1) for j in (-1, 0, 1)
                                       for k in (-1, 0, 1)) if v != (0, 0, 0)]
    for a in small:
        for b in small:
            d1 = tuple(x + r * y for x, y in zip(c1, a))
            d2 = tuple(x + r * y for x, y in zip(c2, b))
            w = cross(d1, d2)
            if content(w) == 1:
                break
        else:
            continue
        break
    else:
        return None
    k, rem = divmod(dot(w, c3) - 1, r)
    assert rem == 0
    Ui = transpose(inverse_unimodular(complete_to_unimodular(w)))
    f1, f2, f3 = column(Ui, 0), column(Ui, 1), column(Ui, 2)
    assert dot(w, f1) == 1 and dot(w, f2) == 0 and dot(w, f3) == 0
    y = tuple(-k * x for x in f1)
    g1, g2 = _gauss3(f2, f3)
    y = _babai(y, g1, g2)
    c3n = tuple(x + r * t for x, t in zip(c3, y))
    out = transpose((d1, d2, c3n))
    assert det(out) == 1
    return out


def _gauss3(b1, b2):
    """Lagrange-Gauss reduction of a rank-2 lattice in Z^3."""
    if norm_sq(b1) > norm_sq(b2):
        b1, b2 = b2, b1
    while True:
        n1 = norm_sq(b1)
        k = (2 * dot(b1, b2) + n1) // (2 * n1)
        if k:
            b2 = tuple(x - k * y for x, y in zip(b2, b1))
        if norm_sq(b2) < n1:
            b1, b2 = b2, b1
            continue
        return b1, b2


def _babai(y, b1, b2):
    """Subtract from y a nearby vector of the lattice spanned by b1, b2."""
    from fractions import Fraction
    g11, g12, g22 = norm_sq(b1), dot(b1, b2), norm_sq(b2)
    det_g = g11 * g22 - g12 * g12
    r1, r2 = dot(y, b1), dot(y, b2)
    a = Fraction(r1 * g22 - r2 * g12, det_g)
    b = Fraction(r2 * g11 - r1 * g12, det_g)
    a, b = round(a), round(b)
    return tuple(x - a * u - b * v for x, u, v in zip(y, b1, b2))


def hnf(m: IntMat) -> IntMat:
    """Lower-triangular Hermite form of the column lattice of a nonsingular matrix.

    Two nonsingular matrices have the same column lattice iff their hnf agree.
    """
    n = len(m)
    H = [list(row) for row in m]

    def col_op(i, j, a, b, c, d):  # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for r in range(n):
            x, y = H[r][i], H[r][j]
            H[r][i], H[r][j] = a * x + b * y, c * x + d * y

    for i in range(n):
        for j in range(i + 1, n):
            if H[i][j]:
                a, b = H[i][i], H[i][j]
                g, x, y = egcd(a, b)
                col_op(i, j, x, y, -b // g, a // g)
        if H[i][i] == 0:
            raise ValueError("singular matrix")
        if H[i][i] < 0:
            for r in range(n):
                H[r][i] = -H[r][i]
        for j in range(i):
            k = H[i][j] // H[i][i]
            if k:
                for r in range(n):
                    H[r][j] -= k * H[r][i]
    return as_matrix(H)


def same_lattice(a: IntMat, b: IntMat) -> bool:
    return hnf(a) == hnf(b)


def in_lattice(m: IntMat, v: IntVec) -> bool:
    """Is v in the column lattice of the nonsingular matrix m?"""
    d = det(m)
    return all(x % d == 0 for x in matvec(adjugate(m), v))


@dataclass(frozen=True)
class Lattice2:
    """Rank-2 sublattice of Z^2 spanned by two column vectors."""
    b1: tuple
    b2: tuple

    @property
    def determinant(self) -> int:
        return abs(self.b1[0] * self.b2[1] - self.b1[1] * self.b2[0])

    def matrix(self) -> IntMat:
        return ((self.b1[0], self.b2[0]), (self.b1[1], self.b2[1]))

    def contains(self, u) -> bool:
        return in_lattice(self.matrix(), tuple(u))


def reduce_lattice_basis(lat: Lattice2) -> Lattice2:
    """Lagrange-Gauss reduction: |b1| <= |b2| and |b1.b2| <= |b1|^2 / 2."""
    b1, b2 = tuple(lat.b1), tuple(lat.b2)
    if norm_sq(b1) > norm_sq(b2):
        b1, b2 = b2, b1
    while True:
        n1 = norm_sq(b1)
        # nearest integer to b1.b2 / n1, exactly
        k = (2 * dot(b1, b2) + n1) // (2 * n1)
        if k:
            b2 = (b2[0] - k * b1[0], b2[1] - k * b1[1])
        if norm_sq(b2) < n1:
            b1, b2 = b2, b1
            continue
        break
    return Lattice2(b1, b2)


def isqrt_exact(n: int):
    """Integer square root if n is a perfect square, else None."""
    if n < 0:
        return None
    s = isqrt(n)
    return s if s * s == n else None


def complete_to_unimodular(z) -> tuple:
    """Unimodular matrix with first column z (z primitive)."""
    v = list(z)
    V = [list(r) for r in identity(3)]  # V z == v throughout

    def row_add(i, j, k):  # v_i += k v_j
        v[i] += k * v[j]
        for c in range(3):
            V[i][c] += k * V[j][c]

    def row_swap(i, j):
        v[i], v[j] = v[j], v[i]
        V[i], V[j] = V[j], V[i]

    while sum(1 for x in v if x) > 1:
        nz = [i for i in range(3) if v[i]]
        i = min(nz, key=lambda t: abs(v[t]))
        for j in nz:
            if j != i:
                row_add(j, i, -(v[j] // v[i]))
    i = next(k for k in range(3) if v[k])
    if i != 0:
        row_swap(0, i)
    if v[0] != 1:
        if v[0] != -1:
            raise ValueError("vector is not primitive")
        V[0] = [-x for x in V[0]]
        v[0] = 1
    U = inverse_unimodular(as_matrix(V))
    assert column(U, 0) == tuple(z)
    return U
