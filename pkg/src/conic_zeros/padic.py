"""Local normal forms at a prime and the prime-stripping recursion.

The three local shapes of an integral ternary form with p^e exactly dividing
its determinant (e >= 1, p not dividing the content) are

* DegenerateLine:   q(Mx) = kappa x3^2                    (mod p)
* SplitHyperbolic:  q(Mx) = x1 x2 + kappa p^e x3^2        (mod p^(e+1))
* NonsplitPlane:    q(Mx) = q1(x1, x2) + kappa p^e x3^2   (mod p^(e+1)),
                    q1 irreducible mod p

with det M = 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from . import exactlinalg as la
from .arith import legendre, sqrt_mod_prime_power
from .forms import J, TernaryForm, transform

DEGENERATE_LINE = "DegenerateLine"
SPLIT_HYPERBOLIC = "SplitHyperbolic"
NONSPLIT_PLANE = "NonsplitPlane"


@dataclass(frozen=True)
class NormalFormCase:
    case_tag: str
    transform: tuple
    kappa: int


@dataclass(frozen=True)
class StripResult:
    matrices: list          # [(R_k, mu_k)]
    reduced_forms: list = field(default_factory=list)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def check_normal_form(q: TernaryForm, p: int, e: int, nf: NormalFormCase) -> bool:
    """Exact check of the defining congruence of a normal form."""
    if la.det(nf.transform) != 1 or nf.kappa % p == 0:
        return False
    t = transform(q, nf.transform)
    a, b, c, d, f, g = t.coeffs      # q11 q12 q13 q22 q23 q33
    if nf.case_tag == DEGENERATE_LINE:
        return all(x % p == 0 for x in (a, b, c, d, f)) and (g - nf.kappa) % p == 0
    m = p ** (e + 1)
    ok = c % m == 0 and f % m == 0 and (g - nf.kappa * p ** e) % m == 0
    if nf.case_tag == SPLIT_HYPERBOLIC:
        return ok and a % m == 0 and d % m == 0 and (b - 1) % m == 0
    return ok and binary_irreducible(a, b, d, p)


def binary_irreducible(a: int, b: int, c: int, p: int) -> bool:
    """Is a x^2 + b xy + c y^2 irreducible (no zero in P^1) over F_p?"""
    if p == 2:
        return a % 2 == 1 and b % 2 == 1 and c % 2 == 1
    if a % p == 0 and b % p == 0 and c % p == 0:
        return False
    return legendre(b * b - 4 * a * c, p) == -1


# --- odd primes -------------------------------------------------------------

def _diagonalize_odd(Q, p: int, N: int):
    """T with T^T Q T diagonal mod p^N; returns (T, diag, rank mod p)."""
    m = p ** N
    A = [[x % m for x in row] for row in Q]
    T = [list(r) for r in la.identity(3)]

    def col_combo(i, j, k):  # basis e_i <- e_i + k e_j
        for r in range(3):
            T[r][i] = (T[r][i] + k * T[r][j]) % m
        for r in range(3):
            A[r][i] = (A[r][i] + k * A[r][j]) % m
        for c in range(3):
            A[i][c] = (A[i][c] + k * A[j][c]) % m

    def swap(i, j):
        for r in range(3):
            T[r][i], T[r][j] = T[r][j], T[r][i]
        A[i], A[j] = A[j], A[i]
        for row in A:
            row[i], row[j] = row[j], row[i]

    rank = 0
    for k in range(3):
        piv = next((i for i in range(k, 3) if A[i][i] % p), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, 3) for j in range(i + 1, 3) if A[i][j] % p), None)
            if pair is None:
                break
            col_combo(pair[0], pair[1], 1)
            piv = pair[0]
        if piv != k:
            swap(k, piv)
        inv = pow(A[k][k], -1, m)
        for i in range(k + 1, 3):
            if A[i][k]:
                col_combo(i, k, -A[i][k] * inv)
        rank += 1
    return la.as_matrix(T), [A[i][i] for i in range(3)], rank


def _normal_form_odd(q: TernaryForm, p: int, e: int):
    N = e + 3
    m = p ** N
    T, d, rank = _diagonalize_odd(q.gram(), p, N)
    inv2 = pow(2, -1, m)
    if rank == 1:
        # move the unit variable to x3 with a cyclic (det 1) permutation
        perm = ((0, 0, 1), (1, 0, 0), (0, 1, 0))
        return DEGENERATE_LINE, la.matmul(T, perm)
    if rank != 2:
        raise ValueError("p^e does not exactly divide the determinant")
    A, B = d[0] * inv2 % m, d[1] * inv2 % m
    if legendre(-A * B, p) == 1:
        t = sqrt_mod_prime_power(-B * pow(A, -1, m), p, N)
        i2A = pow(2 * A, -1, m)
        i2t = pow(2 * t, -1, m)
        S = ((i2A, inv2, 0), ((-i2A * pow(t, -1, m)) % m, i2t, 0), (0, 0, 1))
        return SPLIT_HYPERBOLIC, la.mod_matrix(la.matmul(T, S), m, False)
    return NONSPLIT_PLANE, T


# --- p = 2 ------------------------------------------------------------------

_F2_TARGETS = (
    (DEGENERATE_LINE, (0, 0, 0, 0, 0, 1)),
    (SPLIT_HYPERBOLIC, (0, 1, 0, 0, 0, 0)),
    (NONSPLIT_PLANE, (1, 1, 0, 1, 0, 0)),
)


def _sl3_f2():
    out = []
    for bits in product((0, 1), repeat=9):
        G = (bits[0:3], bits[3:6], bits[6:9])
        if la.det(G) % 2:
            out.append(G)
    return out


_SL3_F2 = None


def _normal_form_two(q: TernaryForm, e: int):
    global _SL3_F2
    if _SL3_F2 is None:
        _SL3_F2 = _sl3_f2()
    found = None
    for tag, target in _F2_TARGETS:
        for G in _SL3_F2:
            if tuple(c % 2 for c in transform(q, G).coeffs) == target:
                found = (tag, G)
                break
        if found:
            break
    if found is None:
        raise ValueError("2^e does not exactly divide the determinant")
    tag, G = found
    if tag == DEGENERATE_LINE:
        return tag, G
    N = e + 3
    m = 2 ** N
    a, b, l1, c, l2, _ = transform(q, G).coeffs
    # remove the x3-cross terms: solve [[2a, b], [b, 2c]] xi = (l1, l2)
    det2 = (4 * a * c - b * b) % m
    inv = pow(det2, -1, m)
    xi1 = (2 * c * l1 - b * l2) * inv % m
    xi2 = (2 * a * l2 - b * l1) * inv % m
    E = ((1, 0, -xi1), (0, 1, -xi2), (0, 0, 1))
    M0 = la.matmul(G, E)
    if tag == SPLIT_HYPERBOLIC:
        t = 0
        for _ in range(N + 2):
            t = (t - (a * t * t + b * t + c) * pow(2 * a * t + b, -1, m)) % m
        assert (a * t * t + b * t + c) % m == 0
        P = ((1, -t), (a, b + a * t))        # y = P x
        dP = la.det(P) % m
        Pinv = la.adjugate(P)
        Pinv = tuple(tuple(x * pow(dP, -1, m) % m for x in row) for row in Pinv)
        S = ((Pinv[0][0], Pinv[0][1], 0), (Pinv[1][0], Pinv[1][1], 0), (0, 0, 1))
        M0 = la.matmul(M0, S)
    return tag, la.mod_matrix(M0, m, False)


def mod_p_normal_form(q: TernaryForm, p: int, e: int) -> NormalFormCase:
    """Local normal form of q at p, where p^e exactly divides the determinant (e >= 1)."""
    if e < 1 or la.content(q.coeffs) % p == 0:
        raise ValueError("need e >= 1 and p not dividing the content")
    if valuation(q.delta, p) != e:
        raise ValueError("p^e does not exactly divide the determinant")
    if p == 2:
        tag, M0 = _normal_form_two(q, e)
    else:
        tag, M0 = _normal_form_odd(q, p, e)
    r = p if tag == DEGENERATE_LINE else p ** (e + 1)
    u = la.det(M0) % r
    ui = pow(u, -1, r)
    col = 0 if tag == DEGENERATE_LINE else 2
    M0 = tuple(tuple((x * ui if j == col else x) % r for j, x in enumerate(row)) for row in M0)
    M = la.sl3_lift(M0, r)
    t = transform(q, M)
    if tag == DEGENERATE_LINE:
        kappa = t.q33 % p
    else:
        kappa = (t.q33 // p ** e) % p
    nf = NormalFormCase(tag, M, kappa)
    if not check_normal_form(q, p, e, nf):
        raise AssertionError("normal form congruence failed")
    return nf


# --- stripping a prime ------------------------------------------------------

def _strip(q: TernaryForm, p: int, e: int):
    if e == 0:
        return [(la.identity(3), 0)]
    if la.content(q.coeffs) % p == 0:
        return _strip(q.divided(p), p, e - 3)
    nf = mod_p_normal_form(q, p, e)
    M = nf.transform
    if nf.case_tag == SPLIT_HYPERBOLIC:
        return [(la.matmul(M, la.diag(p ** (k - 1), p ** (e + 1 - k), 1)), e)
                for k in range(1, e + 2)]
    if nf.case_tag == DEGENERATE_LINE:
        Mp, drop, mu = la.matmul(M, la.diag(1, 1, p)), 1, 1
        qn = transform(q, Mp).divided(p)
    else:
        if e < 2:
            return []          # anisotropic at p: no zeros at all
        Mp, drop, mu = la.matmul(M, la.diag(p, p, 1)), 2, 2
        qn = transform(q, Mp).divided(p * p)
    return [(la.matmul(Mp, R), m + mu) for R, m in _strip(qn, p, e - drop)]


def strip_prime(q: TernaryForm, p: int, e: int) -> StripResult:
    """Remove the factor p^e from the determinant of an isotropic form.

    Returns matrices R_k with det p^mu_k such that every primitive zero of q
    lies in exactly one R_k(Z^3), together with the integral forms
    p^(-(e + 2 mu_k)/3) q(R_k x), whose determinant is det(q) / p^e.
    """
    if q.delta == 0 or valuation(q.delta, p) != e:
        raise ValueError("p^e does not exactly divide the determinant")
    mats = _strip(q, p, e)
    reduced = []
    for R, mu in mats:
        assert la.det(R) == p ** mu and mu <= e and (e - mu) % 3 == 0
        s = (e + 2 * mu) // 3
        r = transform(q, R).divided(p ** s)
        assert r.delta * p ** e == q.delta
        reduced.append(r)
    assert len(mats) <= e + 1
    return StripResult(mats, reduced)


# --- determinant one ----------------------------------------------------------

def split_unit_form(q: TernaryForm, z) -> tuple:
    """Unimodular M with q(Mx) = x1 x3 - x2^2, given q of determinant 1 and a primitive zero z."""
    if q.delta != 1:
        raise ValueError("form must have determinant 1")
    z = tuple(z)
    if q(z) != 0 or la.content(z) != 1:
        raise ValueError("z must be a primitive zero")
    U = la.complete_to_unimodular(z)
    q1 = transform(q, U)
    assert q1.q11 == 0
    a, b = q1.q12, q1.q13
    g, s, t = la.egcd(a, b)
    assert g == 1
    W = ((1, 0, 0), (0, -b, s), (0, a, t))
    q2 = transform(q1, W)
    assert (q2.q11, q2.q12, q2.q13) == (0, 0, 1)
    beta, gamma = q2.q23, q2.q33
    S = ((1, -beta, -gamma), (0, 1, 0), (0, 0, 1))
    M = la.matmul(la.matmul(U, W), S)
    q3 = transform(q, M)
    lam = q3.q22
    assert lam == -1, "impossible: determinant-one form did not split"
    if la.det(M) < 0:
        M = la.scale(M, -1)
    assert transform(q, M) == J
    return M
