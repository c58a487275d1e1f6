"""Counting class zeros by height, the brute-force oracle, and the primitivity sieve."""
from __future__ import annotations

import os
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import gcd, isqrt, pi, sqrt

import numpy as np

from . import exactlinalg as la
from .arith import factorize, legendre, mobius_upto, sqrt_mod_prime
from .autjreduce import class_vectors
from .forms import TernaryForm

SUP, L2, W0 = "sup", "l2", "w0"
HEIGHTS = (SUP, L2, W0)
ORACLE_CAP = 10000
SCAN_LIMIT = 2 * 10 ** 6


# --- heights ------------------------------------------------------------------

def w0(t2: float) -> float:
    """The bump exp(-1/(1 - |x|^2)) as a function of |x|^2."""
    return float(np.exp(-1.0 / (1.0 - t2))) if t2 < 1.0 else 0.0


def height_radius(B: float, height: str, scale: float = 1.0) -> float:
    """Euclidean radius enclosing all x of the given height at most B."""
    if height == SUP:
        return B * sqrt(3)
    if height == L2:
        return B
    if height == W0:
        return B * scale
    raise ValueError(height)


def box(cls, radius: float):
    A = la.adjugate(cls.matrix)
    d = la.det(cls.matrix)
    X1 = int(sqrt(radius * sqrt(la.norm_sq(A[0])) / d)) + 1
    X2 = int(sqrt(radius * sqrt(la.norm_sq(A[2])) / d)) + 1
    return X1, X2


def _within(x, B, height) -> bool:
    if height == SUP:
        return max(abs(t) for t in x) <= B
    return la.norm_sq(x) <= B * B


# --- counts -----------------------------------------------------------------------

def count_class(q: TernaryForm, cls, B: float, height: str = SUP, scale: float = 1.0):
    """Number of primitive zero vectors (both signs) of the class with height <= B.

    For the smooth height the weighted sum of w0(x / (B scale)) is returned.
    """
    if B < 1 and height != W0:
        return 0
    if B <= 0:
        return 0.0
    X1, X2 = box(cls, height_radius(B, height, scale))
    if height == W0:
        r2 = (B * scale) ** 2
        terms = sorted(w0(la.norm_sq(x) / r2) for _, _, x in class_vectors(cls.matrix, X1, X2))
        return 2 * float(np.sum(terms))
    return 2 * sum(1 for _, _, x in class_vectors(cls.matrix, X1, X2) if _within(x, B, height))


class ClassHeights:
    """Sorted heights of the class zeros up to Bmax, for counting at many B at once."""

    def __init__(self, cls, Bmax: float, height: str = SUP):
        if height not in (SUP, L2):
            raise ValueError("only sharp heights")
        self.height = height
        X1, X2 = box(cls, height_radius(Bmax, height))
        keys = []
        for _, _, x in class_vectors(cls.matrix, X1, X2):
            keys.append(max(abs(t) for t in x) if height == SUP else la.norm_sq(x))
        keys.sort()
        self.keys = keys
        self.Bmax = Bmax

    def count(self, B: float) -> int:
        if B > self.Bmax:
            raise ValueError("B beyond the enumerated range")
        if B < 1:
            return 0
        t = B if self.height == SUP else B * B
        return 2 * bisect_right(self.keys, t)


@dataclass(frozen=True)
class CountReport:
    B: float
    raw_count: int
    point_count: float
    per_class: tuple
    predicted: float
    ratio: float
    height: str


def count_total(q, dec, B: float, height: str = SUP, predicted_slope: float = None,
                scale: float = 1.0) -> CountReport:
    per = tuple(count_class(q, c, B, height, scale) for c in dec.classes)
    raw = sum(per)
    pred = predicted_slope * B if predicted_slope is not None else float("nan")
    ratio = raw / pred if predicted_slope else float("nan")
    return CountReport(B, raw, raw / 2, per, pred, ratio, height)


# --- brute-force oracle -------------------------------------------------------------

def _safe_int64(q: TernaryForm, B: int) -> bool:
    a, b, c, d, e, f = (abs(x) for x in q.coeffs)
    worst = ((c + e) * B) ** 2 + 4 * f * (a + b + d) * B * B + 4 * f * B
    return worst < 2 ** 60 and (a + b + c + d + e + f) * B * B < 2 ** 60


def _bf_rows(args):
    coeffs, B, x1s = args
    q11, q12, q13, q22, q23, q33 = coeffs
    out = []
    x2 = np.arange(-B, B + 1, dtype=np.int64)
    for x1 in x1s:
        bb = q13 * x1 + q23 * x2
        cc = q11 * x1 * x1 + q12 * x1 * x2 + q22 * x2 * x2
        if q33 == 0:
            ok = bb != 0
            safe_b = np.where(ok, bb, 1)
            ok &= (cc % safe_b) == 0
            x3 = np.where(ok, -cc // safe_b, 0)
            cand = [(x2[ok], x3[ok])]
        else:
            disc = bb * bb - 4 * q33 * cc
            ok = disc >= 0
            s = np.sqrt(np.where(ok, disc, 0).astype(np.float64)).astype(np.int64)
            for _ in range(2):
                s = np.where(s * s > disc, s - 1, s)
                s = np.where((s + 1) * (s + 1) <= disc, s + 1, s)
            ok &= s * s == disc
            cand = []
            for sign in (1, -1):
                num = -bb + sign * s
                good = ok & (num % (2 * q33) == 0)
                if sign == -1:
                    good &= s != 0
                cand.append((x2[good], num[good] // (2 * q33)))
        for xs2, xs3 in cand:
            keep = np.abs(xs3) <= B
            xs2, xs3 = xs2[keep], xs3[keep]
            g = np.gcd(np.gcd(np.int64(x1), xs2), xs3)
            keep = g == 1
            out.extend((int(x1), int(u), int(w)) for u, w in zip(xs2[keep], xs3[keep]))
    return out


def _bf_python(q: TernaryForm, B: int, x1s):
    from .forms import _roots_x3
    out = []
    for x1 in x1s:
        for x2 in range(-B, B + 1):
            for x3 in _roots_x3(q, x1, x2):
                if abs(x3) <= B and (x1, x2, x3) != (0, 0, 0) and gcd(gcd(x1, x2), x3) == 1:
                    out.append((x1, x2, x3))
    return out


def default_workers() -> int:
    env = os.environ.get("CONIC_ZEROS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def brute_force_zeros(q: TernaryForm, B: int, cap: int = ORACLE_CAP, workers: int = 1) -> list:
    """All primitive zero vectors with sup-norm <= B, sorted."""
    B = int(B)
    if B > cap:
        raise ValueError(f"oracle bound {B} exceeds cap {cap}")
    if B < 1:
        return []
    x1s = list(range(-B, B + 1))
    if _safe_int64(q, B):
        chunks = [x1s[i::workers] for i in range(workers)]
        if workers > 1:
            with ProcessPoolExecutor(workers) as ex:
                parts = list(ex.map(_bf_rows, [(q.coeffs, B, c) for c in chunks]))
        else:
            parts = [_bf_rows((q.coeffs, B, x1s))]
        out = [x for part in parts for x in part]
    else:
        out = _bf_python(q, B, x1s)
    if q.q33 == 0:
        out = [x for x in out if x[:2] != (0, 0)] + [(0, 0, 1), (0, 0, -1)]
    return sorted(set(out))


# --- primes and the sieve --------------------------------------------------------------

@dataclass(frozen=True)
class PrimeClass:
    p: int
    tag: str                # "P0", "P1", "P2"
    lattices: tuple = ()    # Lattice2 for each point of P^1(F_p) where p | M(u^2, uv, v^2)


def _binary_roots(a: int, b: int, c: int, p: int) -> set:
    """Points of P^1(F_p) where a u^2 + b uv + c v^2 vanishes; (1:t) -> t, (0:1) -> None."""
    a, b, c = a % p, b % p, c % p
    if a == b == c == 0:
        return None
    roots = set()
    if c == 0:
        roots.add(None)          # (0:1)
    # a + b t + c t^2 = 0 for the points (1:t)
    if c == 0:
        if b:
            roots.add((-a * pow(b, -1, p)) % p)
        return roots
    if p == 2:
        return roots | {t for t in (0, 1) if (a + b * t + c * t * t) % 2 == 0}
    disc = (b * b - 4 * a * c) % p
    s = sqrt_mod_prime(disc, p)
    if s is None:
        return roots
    inv = pow(2 * c, -1, p)
    roots.update({(-b + s) * inv % p, (-b - s) * inv % p})
    return roots


def _point_lattice(t, p: int) -> la.Lattice2:
    if t is None:
        return la.reduce_lattice_basis(la.Lattice2((p, 0), (0, 1)))
    return la.reduce_lattice_basis(la.Lattice2((1, t), (0, p)))


def bad_points(M, p: int) -> list:
    """Sorted points of P^1(F_p) where p divides every entry of M(u^2, uv, v^2)."""
    common = None
    for row in M:
        r = _binary_roots(row[0], row[1], row[2], p)
        if r is None:
            continue
        common = r if common is None else common & r
    if common is None:
        raise ValueError("matrix vanishes mod p: class is empty")
    return sorted(common, key=lambda t: (t is None, t))


def scan_bad_points(M, p: int) -> list:
    """Same as bad_points but by scanning all of P^1(F_p) with numpy."""
    t = np.arange(p, dtype=object if p > SCAN_LIMIT else np.int64)
    bad = np.ones(p, dtype=bool)
    for row in M:
        a, b, c = (x % p for x in row)
        bad &= ((a + b * t + c * t * t) % p) == 0
    out = [int(x) for x in np.nonzero(bad)[0]]
    if all(row[2] % p == 0 for row in M):
        out.append(None)
    return out


def classify_prime(cls, p: int, verify: bool = True) -> PrimeClass:
    M = cls.matrix
    if la.det(M) % p:
        return PrimeClass(p, "P0")
    pts = bad_points(M, p)
    if verify and p <= SCAN_LIMIT:
        if scan_bad_points(M, p) != pts:
            raise AssertionError("prime classification disagrees with the scan")
    if len(pts) > 2:
        raise AssertionError("more than two bad points")
    tag = ("P0", "P1", "P2")[len(pts)]
    return PrimeClass(p, tag, tuple(_point_lattice(t, p) for t in pts))


def lattice_from_generators(gens) -> la.Lattice2:
    """Basis of the rank-2 lattice generated by the given vectors of Z^2."""
    vecs = [list(v) for v in gens if any(v)]
    # Euclid on the first coordinate
    while sum(1 for v in vecs if v[0]) > 1:
        vecs.sort(key=lambda v: (v[0] == 0, abs(v[0])))
        piv = vecs[0]
        for v in vecs[1:]:
            if v[0]:
                k = v[0] // piv[0]
                v[0] -= k * piv[0]
                v[1] -= k * piv[1]
    first = next(v for v in vecs if v[0])
    h = 0
    for v in vecs:
        if v is not first:
            h = gcd(h, v[1])
    return la.reduce_lattice_basis(la.Lattice2(tuple(first), (0, h)))


def intersect(L1: la.Lattice2, L2: la.Lattice2) -> la.Lattice2:
    """Intersection of two lattices of coprime index."""
    d1, d2 = L1.determinant, L2.determinant
    assert gcd(d1, d2) == 1
    gens = [tuple(d2 * x for x in L1.b1), tuple(d2 * x for x in L1.b2),
            tuple(d1 * x for x in L2.b1), tuple(d1 * x for x in L2.b2)]
    return lattice_from_generators(gens)


@dataclass(frozen=True)
class SieveData:
    delta1: int
    delta2: int
    lattices: tuple        # ((Lattice2, sign), ...)
    kappa: float
    primes: tuple          # PrimeClass per prime dividing det M


def liouville(n: int) -> int:
    return (-1) ** sum(factorize(n).values()) if n > 1 else 1


def sieve_setup(cls, verify: bool = True) -> SieveData:
    d = cls.det_m if hasattr(cls, "det_m") else la.det(cls.matrix)
    primes = sorted(factorize(d)) if d > 1 else []
    pcs = tuple(classify_prime(cls, p, verify) for p in primes)
    delta1 = delta2 = 1
    kappa = 6 / pi ** 2
    lats = [(la.Lattice2((1, 0), (0, 1)), 1)]
    for pc in pcs:
        p = pc.p
        if pc.tag == "P0":
            continue
        if pc.tag == "P1":
            delta1 *= p
            kappa /= 1 + 1 / p
            opts = [pc.lattices[0]]
        else:
            delta2 *= p
            kappa *= (1 - 1 / p) / (1 + 1 / p)
            opts = [pc.lattices[0], pc.lattices[1], la.Lattice2((p, 0), (0, p))]
        new = []
        for L, s in lats:
            new.append((L, s))
            for O in opts:
                I = intersect(L, O)
                new.append((I, liouville(I.determinant)))
        lats = new
    return SieveData(delta1, delta2, tuple(lats), kappa, pcs)


def _count_lattice(cls, L: la.Lattice2, B: float, height: str) -> int:
    """#{w in L, w != 0 : height(M(w1^2, w1 w2, w2^2)) <= B}."""
    if B < 1:
        return 0
    X1, X2 = box(cls, height_radius(B, height))
    M = cls.matrix
    n = 0
    for u in range(-X1, X1 + 1):
        for v in range(-X2, X2 + 1):
            if (u, v) == (0, 0) or not L.contains((u, v)):
                continue
            x = la.matvec(M, (u * u, u * v, v * v))
            if _within(x, B, height):
                n += 1
    return n


def sieve_identity_check(q: TernaryForm, cls, B: float, height: str = SUP, sieve=None) -> dict:
    """Compare count_class with the Moebius / lattice expansion of the primitivity condition."""
    sieve = sieve or sieve_setup(cls)
    lhs = count_class(q, cls, B, height)
    bad = sieve.delta1 * sieve.delta2
    dmax = isqrt(int(B))
    mu = mobius_upto(max(dmax, 1))
    rhs = 0
    for L, s in sieve.lattices:
        for d in range(1, dmax + 1):
            if mu[d] == 0 or gcd(d, bad) != 1:
                continue
            rhs += s * mu[d] * _count_lattice(cls, L, B / (d * d), height)
    return {"B": B, "lhs": lhs, "rhs": rhs, "ok": lhs == rhs}


# --- predictions -------------------------------------------------------------------

def predict_class(q: TernaryForm, cls, sigma_inf: float, kappa: float) -> float:
    """Leading coefficient of the class count per unit B."""
    return sqrt(q.delta) / (2 * sqrt(cls.multiplier)) * sigma_inf * kappa


def singular_series(q: TernaryForm, dec, sieves) -> float:
    return sum(s.kappa * sqrt(q.delta / c.multiplier) for c, s in zip(dec.classes, sieves))


def psi(q: TernaryForm, sigma_w0: float, sigma_w: float, B: float) -> float:
    from math import log
    omega = len(factorize(q.delta)) if q.delta > 1 else 0
    rho = q.norm ** 3 / q.delta
    return 4 ** omega * rho * sigma_w0 / sigma_w * log(B)


def predict_total(q: TernaryForm, dec, sigma_inf: float, sieves=None) -> dict:
    sieves = sieves or [sieve_setup(c) for c in dec.classes]
    S = singular_series(q, dec, sieves)
    return {"singular_series": S, "slope": 0.5 * sigma_inf * S,
            "per_class": [predict_class(q, c, sigma_inf, s.kappa)
                          for c, s in zip(dec.classes, sieves)]}
