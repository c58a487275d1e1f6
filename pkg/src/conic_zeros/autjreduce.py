"""Reduction by the automorphism group of J = x1 x3 - x2^2.

A 2x2 unimodular g acts on binary quadratics; its symmetric square is a 3x3
integer matrix U with J(Ux) = det(g)^2 J(x) = J(x).  Applying such U on the
left of a matrix A with J(Ax) = c q(x) keeps that identity, and is used to
make the rows of A short.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import isqrt, sqrt

from . import exactlinalg as la
from .forms import J, TernaryForm, transform

U2 = ((0, 0, 1), (0, -1, 0), (1, 0, 0))   # x1 <-> x3, x2 -> -x2; det +1


def sym_square(g) -> tuple:
    """3x3 matrix acting on (u^2, uv, v^2) as g acts on (u, v)."""
    (al, be), (ga, de) = g
    if abs(al * de - be * ga) != 1:
        raise ValueError("g must be unimodular")
    return ((al * al, 2 * al * be, be * be),
            (al * ga, al * de + be * ga, be * de),
            (ga * ga, 2 * ga * de, de * de))


def preserves_j(U) -> bool:
    return transform(J, U) == J


@dataclass(frozen=True)
class AutJElement:
    matrix: tuple
    word: tuple = ()

    def __post_init__(self):
        assert preserves_j(self.matrix) and abs(la.det(self.matrix)) == 1


def _row_objective(a, c) -> int:
    return la.norm_sq(a) * la.norm_sq(c)


def _best_shear(a, b, c):
    """Integer m minimising |m^2 a + 2 m b + c|^2, exactly.

    Ties go to smaller |m|, then m >= 0.
    """
    F4, F3 = la.dot(a, a), 4 * la.dot(a, b)
    F2, F1 = 4 * la.dot(b, b) + 2 * la.dot(a, c), 4 * la.dot(b, c)
    F0 = la.dot(c, c)

    def f(m):
        return (((F4 * m + F3) * m + F2) * m + F1) * m + F0

    g3, g2, g1, g0 = 4 * F4, 3 * F3, 2 * F2, F1   # f'

    def g(m):
        return ((g3 * m + g2) * m + g1) * m + g0

    cands = {-1, 0, 1}
    # turning points of f' are roots of 3 g3 m^2 + 2 g2 m + g1
    A2, B2, C2 = 3 * g3, 2 * g2, g1
    disc = B2 * B2 - 4 * A2 * C2
    marks = []
    if disc >= 0:
        s = isqrt(disc)
        for num in (-B2 - s, -B2 + s):
            base = num // (2 * A2)
            marks.extend(base + d for d in (-1, 0, 1, 2))
    R = 2 + max(abs(g2), abs(g1), abs(g0)) // g3
    pts = sorted(set([-R, R] + [m for m in marks if -R < m < R]))
    cands.update(pts)
    for lo, hi in zip(pts, pts[1:]):
        glo, ghi = g(lo), g(hi)
        if (glo < 0) == (ghi < 0):
            continue
        # invariant: sign change within [lo, hi]
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if (g(mid) < 0) == (glo < 0):
                lo = mid
            else:
                hi = mid
        cands.update((lo, hi))
    return min(cands, key=lambda m: (f(m), abs(m), m < 0))


def _lower(a, b, c, m):
    return a, tuple(m * x + y for x, y in zip(a, b)), \
        tuple(m * m * x + 2 * m * y + z for x, y, z in zip(a, b, c))


def _upper(a, b, c, m):
    return tuple(x + 2 * m * y + m * m * z for x, y, z in zip(a, b, c)), \
        tuple(y + m * z for y, z in zip(b, c)), c


def _word_matrix(word) -> tuple:
    U = la.identity(3)
    for step in word:
        U = la.matmul(_step_matrix(step), U)
    return U


def _step_matrix(step):
    kind = step[0]
    if kind == "lower":
        return sym_square(((1, 0), (step[1], 1)))
    if kind == "upper":
        return sym_square(((1, step[1]), (0, 1)))
    if kind == "swap":
        return sym_square(((0, 1), (1, 0)))
    if kind == "sign":
        return sym_square(((1, 0), (0, -1)))
    raise ValueError(step)


def _apply(step, rows):
    a, b, c = rows
    kind = step[0]
    if kind == "lower":
        return _lower(a, b, c, step[1])
    if kind == "upper":
        return _upper(a, b, c, step[1])
    if kind == "swap":
        return c, b, a
    return a, tuple(-x for x in b), c


def row_bounds_hold(rows, c: int, q_norm_sq: int) -> bool:
    a, b, cc = rows
    return (la.norm_sq(a) * la.norm_sq(cc) <= 81 * c * c * q_norm_sq
            and la.norm_sq(b) ** 2 <= 100 * c * c * q_norm_sq)


def _greedy(rows):
    word = []
    while True:
        a, b, c = rows
        if la.norm_sq(a) > la.norm_sq(c):
            rows = _apply(("swap",), rows)
            word.append(("swap",))
            a, b, c = rows
        cur = _row_objective(a, c)
        options = []
        m = _best_shear(a, b, c)
        if m:
            step = ("lower", m)
            new = _apply(step, rows)
            options.append((_row_objective(new[0], new[2]), step, new))
        m = _best_shear(c, b, a)
        if m:
            step = ("upper", m)
            new = _apply(step, rows)
            options.append((_row_objective(new[0], new[2]), step, new))
        options = [o for o in options if o[0] < cur]
        if not options:
            return rows, word
        obj, step, rows = min(options, key=lambda o: o[0])
        word.append(step)


def _fallback(rows, c, q_norm_sq, depth=4):
    gens = [("swap",)] + [(k, m) for k in ("lower", "upper") for m in range(-8, 9) if m]
    best = None
    for n in range(1, depth + 1):
        for word in product(gens, repeat=n):
            r = rows
            for step in word:
                r = _apply(step, r)
            r2, w2 = _greedy(r)
            if row_bounds_hold(r2, c, q_norm_sq):
                return r2, list(word) + w2
            obj = _row_objective(r2[0], r2[2])
            if best is None or obj < best[0]:
                best = (obj, r2, list(word) + w2)
    return best[1], best[2]


def reduce_rows(A, c: int, q: TernaryForm):
    """Find U in Aut(J) making the rows of U A short.

    Requires J(Ax) = c q(x).  Returns (U, UA) with rows a, b, c of UA obeying
    |a|.|c| <= 9 c |q| and |b|^2 <= 10 c |q|.
    """
    if transform(J, A) != q.scaled(c):
        raise ValueError("J(Ax) is not c q(x)")
    rows = tuple(tuple(r) for r in A)
    rows, word = _greedy(rows)
    if not row_bounds_hold(rows, c, q.norm_sq):
        rows, extra = _fallback(rows, c, q.norm_sq)
        word = word + extra
        if not row_bounds_hold(rows, c, q.norm_sq):
            raise AssertionError("row reduction failed to reach the bounds")
    if la.dot(rows[1], rows[2]) < 0:
        rows = _apply(("sign",), rows)
        word.append(("sign",))
    U = _word_matrix(word)
    assert la.matmul(U, A) == rows
    return AutJElement(U, tuple(word)), rows


# --- polishing a class matrix ---------------------------------------------------

@dataclass(frozen=True)
class ReducedClassMatrix:
    matrix: tuple          # N
    adj: tuple             # adj(N); the rows r_i of N^-1 are adj rows / det
    det: int
    multiplier: int
    U: AutJElement = field(compare=False, default=None)

    @property
    def columns(self):
        return tuple(la.column(self.matrix, j) for j in range(3))

    def row_norm(self, i: int) -> float:
        return sqrt(la.norm_sq(self.adj[i])) / self.det

    def col_norm(self, j: int) -> float:
        return sqrt(la.norm_sq(la.column(self.matrix, j)))


def reduced_bounds(q: TernaryForm, N, D: int) -> dict:
    """Exact checks of the size bounds on a polished class matrix."""
    d = la.det(N)
    A = la.adjugate(N)
    qn = q.norm_sq
    c1, c2, c3 = (la.norm_sq(la.column(N, j)) for j in range(3))
    r1, r2, r3 = (la.norm_sq(row) for row in A)
    return {
        "r1r3": r1 * r3 * D * D <= 81 * qn * d ** 4,
        "r2": r2 * r2 * D * D <= 100 * qn * d ** 4,
        "c1c3": c1 * c3 * D ** 4 <= 8100 * d ** 4 * qn * qn,
        "c2": c2 * D * D <= 81 * d * d * qn,
        "c1<=c3": c1 <= c3,
    }


def polish(q: TernaryForm, matrix, multiplier: int) -> ReducedClassMatrix:
    """Replace a class matrix M by M U^-1 with U in Aut(J) chosen to shorten everything."""
    M, D = matrix, multiplier
    d = la.det(M)
    if d <= 0 or transform(q, M) != J.scaled(D) or (d * d) % D:
        raise ValueError("not a valid class matrix")
    c = d * d // D
    A = la.adjugate(M)
    U, _ = reduce_rows(A, c, q)
    Um = U.matrix
    if la.det(Um) < 0:
        Um = la.scale(Um, -1)
    N = la.matmul(M, la.inverse_unimodular(Um))
    if la.norm_sq(la.column(N, 0)) > la.norm_sq(la.column(N, 2)):
        N = la.matmul(N, U2)
        Um = la.matmul(U2, Um)
    assert la.det(N) == d and transform(q, N) == J.scaled(D)
    assert la.same_lattice(N, M)
    checks = reduced_bounds(q, N, D)
    if not all(checks.values()):
        raise AssertionError(f"polished matrix violates bounds: {checks}")
    return ReducedClassMatrix(N, la.adjugate(N), d, D, AutJElement(Um, U.word))


def row_geometry_check(A, q: TernaryForm, scale: int = 1, rtol: float = 1e-9) -> dict:
    """Diagnostics for rows a, b, c of A with J(Ax) = scale * q(x) and |a| <= |c|.

    Writes a = lam c + d and b = mu c + e with d, e orthogonal to c.
    """
    if transform(J, A) != q.scaled(scale):
        raise ValueError("J(Ax) is not scale * q(x)")
    a, b, c = (tuple(Fraction(x) for x in row) for row in A)
    if la.norm_sq(a) > la.norm_sq(c):
        raise ValueError("need |a| <= |c|")
    qn = sqrt(q.norm_sq) * scale
    cc = la.norm_sq(c)
    lam = la.dot(a, c) / cc
    mu = la.dot(b, c) / cc
    d = tuple(x - lam * y for x, y in zip(a, c))
    e = tuple(x - mu * y for x, y in zip(b, c))
    tol = 1 + rtol
    dme = tuple(x - 2 * mu * y for x, y in zip(d, e))
    out = {
        "lambda": float(lam), "mu": float(mu),
        "i": sqrt(la.norm_sq(e)) <= tol * sqrt(qn / 2),
        "ii": abs(float(lam - mu * mu)) <= tol * qn / (2 * float(cc)),
        "iii": sqrt(la.norm_sq(dme)) <= tol * qn / sqrt(cc),
        "iv": abs(float(lam)) <= tol,
    }
    return out


# --- minimal zeros --------------------------------------------------------------

def box_for_radius(rc: ReducedClassMatrix, radius: float):
    """u, v ranges covering every class zero of Euclidean length <= radius."""
    X1 = int(sqrt(radius * rc.row_norm(0))) + 1
    X2 = int(sqrt(radius * rc.row_norm(2))) + 1
    return X1, X2


def class_vectors(N, X1: int, X2: int):
    """Primitive N(u^2, uv, v^2) over antipodal representatives (u, v) in the box."""
    from math import gcd
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = N
    for u in range(0, X1 + 1):
        uu = u * u
        vstart = 1 if u == 0 else -X2
        for v in range(vstart, X2 + 1):
            if gcd(u, v) != 1:
                continue
            uv, vv = u * v, v * v
            x = (a1 * uu + a2 * uv + a3 * vv, b1 * uu + b2 * uv + b3 * vv,
                 c1 * uu + c2 * uv + c3 * vv)
            if gcd(gcd(x[0], x[1]), x[2]) == 1:
                yield u, v, x


def _zero_key(x, norm):
    size = max(abs(t) for t in x) if norm == "sup" else la.norm_sq(x)
    return (size, tuple(abs(t) for t in x), tuple(t < 0 for t in x))


def minimal_zeros(q: TernaryForm, rc: ReducedClassMatrix, search_cap: int = 10 ** 7,
                  norm: str = "l2"):
    """The shortest class zero z1 and the shortest z2 != +-z1.

    norm is "l2" (Euclidean length) or "sup".  Returns (z1, z2, complete);
    complete is False when the box grew past search_cap points first.
    """
    L = 2.0
    while True:
        R = L * sqrt(3) if norm == "sup" else L
        X1, X2 = box_for_radius(rc, R)
        if (X1 + 1) * (2 * X2 + 1) > search_cap:
            found = sorted({la.canonical_sign(x) for _, _, x in class_vectors(rc.matrix, X1, X2)},
                           key=lambda x: _zero_key(x, norm))
            found += [None, None]
            return found[0], found[1], False
        zs = set()
        for _, _, x in class_vectors(rc.matrix, X1, X2):
            size = max(abs(t) for t in x) if norm == "sup" else sqrt(la.norm_sq(x))
            if size <= L:
                zs.add(la.canonical_sign(x))
        if len(zs) >= 2:
            z1, z2 = sorted(zs, key=lambda x: _zero_key(x, norm))[:2]
            if norm == "l2":
                check_minimal_zero_bounds(q, rc, z1, z2)
            return z1, z2, True
        L *= 2


def check_minimal_zero_bounds(q: TernaryForm, rc: ReducedClassMatrix, z1, z2) -> None:
    """|z1| |z2| >= D/|q| and |c1| <= 90 rho |z1|, |c3| <= 90 rho |z2|, all squared."""
    qn, D, delta = q.norm_sq, rc.multiplier, q.delta
    n1, n2 = la.norm_sq(z1), la.norm_sq(z2)
    c1 = la.norm_sq(la.column(rc.matrix, 0))
    c3 = la.norm_sq(la.column(rc.matrix, 2))
    assert n1 * n2 * qn >= D * D, "z1 z2 product bound"
    # rho^2 = |q|^6 / delta^2
    assert c1 * delta * delta <= 8100 * qn ** 3 * n1, "first column bound"
    assert c3 * delta * delta <= 8100 * qn ** 3 * n2, "third column bound"
