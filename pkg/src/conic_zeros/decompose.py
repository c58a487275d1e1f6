"""Partition of the primitive zeros of an isotropic form into parametrised classes.

Each class is M(Z^3) intersected with the primitive zeros, for an integer
matrix M with q(Mx) = D (x1 x3 - x2^2); its zeros are exactly
+-M(u^2, uv, v^2) with u, v coprime and the image primitive.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import gcd

from . import exactlinalg as la
from .arith import factorize, num_divisors, is_squarefree
from .autjreduce import ReducedClassMatrix, class_vectors, minimal_zeros, polish
from .errors import AnisotropicFormError, ImprimitiveFormError, SingularFormError
from .forms import J, TernaryForm, find_isotropic, transform
from .padic import split_unit_form, strip_prime


@dataclass(frozen=True)
class ZeroClass:
    matrix: tuple
    multiplier: int
    det_m: int
    z1: tuple = None
    z2: tuple = None
    reduced: ReducedClassMatrix = field(default=None, compare=False, repr=False)

    @property
    def hnf(self):
        return la.hnf(self.matrix)

    def contains(self, x) -> bool:
        return la.in_lattice(self.matrix, tuple(x))


@dataclass(frozen=True)
class Decomposition:
    form: TernaryForm
    classes: tuple

    @property
    def k_count(self) -> int:
        return len(self.classes)


def _raw_classes(q: TernaryForm, z):
    """Class matrices before polishing, built prime by prime."""
    delta = q.delta
    stages = [(la.identity(3), q, 1)]   # (M, reduced form r, scale) with q(Mx) = scale r(x)
    for p, e in sorted(factorize(delta).items()):
        nxt = []
        for M, r, s in stages:
            res = strip_prime(r, p, e)
            for (R, mu), rf in zip(res.matrices, res.reduced_forms):
                nxt.append((la.matmul(M, R), rf, s * p ** ((e + 2 * mu) // 3)))
        stages = nxt
    out = []
    for M, r, s in stages:
        assert r.delta == 1
        w = la.primitive(la.matvec(la.adjugate(M), z))
        S = split_unit_form(r, w)
        Mk = la.matmul(M, S)
        if la.det(Mk) < 0:
            Mk = la.scale(Mk, -1)
        assert transform(q, Mk) == J.scaled(s)
        out.append((Mk, s))
    return out


def check_nonempty(q: TernaryForm, cls: ZeroClass):
    """Does the class contain a primitive zero?  Returns (flag, witness (u, v) or None)."""
    M = cls.matrix
    primes = sorted(factorize(cls.det_m)) if cls.det_m > 1 else []
    choices = []
    for p in primes:
        good = None
        for t in list(range(p)) + [None]:
            u, v = (1, t) if t is not None else (0, 1)
            x = la.matvec(M, (u * u, u * v, v * v))
            if any(c % p for c in x):
                good = (u, v)
                break
        if good is None:
            return False, None
        choices.append((p, good))
    P = 1
    for p in primes:
        P *= p
    u0 = v0 = 0
    for p, (u, v) in choices:
        Pp = P // p
        k = Pp * pow(Pp, -1, p)
        u0 = (u0 + u * k) % P
        v0 = (v0 + v * k) % P
    for i in range(0, 50):
        for j in range(0, 50):
            u, v = u0 + i * P, v0 + j * P
            if (u, v) == (0, 0) or gcd(u, v) != 1:
                continue
            x = la.matvec(M, (u * u, u * v, v * v))
            if la.content(x) == 1:
                return True, (u, v)
    raise AssertionError("no witness found although every prime is admissible")


def class_key(cls: ZeroClass):
    return (cls.multiplier, tuple(x for row in cls.hnf for x in row))


def decompose(q: TernaryForm, with_minimal_zeros: bool = False,
              search_cap: int = 10 ** 7) -> Decomposition:
    """Split the primitive zeros of q into classes, polished and canonically ordered."""
    if q.delta == 0:
        raise SingularFormError("form is singular")
    if q.content != 1:
        raise ImprimitiveFormError("form is not primitive")
    if q.delta < 0:
        raise ValueError("normalise the form so that its determinant is positive")
    z = find_isotropic(q)
    if z is None:
        raise AnisotropicFormError("form has no nontrivial rational zero")
    classes = []
    for Mk, D in _raw_classes(q, z):
        rc = polish(q, Mk, D)
        cls = ZeroClass(rc.matrix, D, rc.det, reduced=rc)
        if not check_nonempty(q, cls)[0]:
            continue
        if with_minimal_zeros:
            z1, z2, _ = minimal_zeros(q, rc, search_cap)
            cls = replace(cls, z1=z1, z2=z2)
        classes.append(cls)
    classes.sort(key=class_key)
    return Decomposition(q, tuple(classes))


def class_of(dec: Decomposition, x) -> int:
    """Index of the unique class containing the primitive zero x."""
    x = tuple(x)
    if dec.form(x) != 0 or la.content(x) != 1:
        raise ValueError("not a primitive zero")
    hits = [k for k, c in enumerate(dec.classes) if c.contains(x)]
    if len(hits) != 1:
        raise AssertionError(f"zero {x} lies in {len(hits)} classes")
    return hits[0]


def class_invariant_failures(q: TernaryForm, cls: ZeroClass) -> list:
    out = []
    M, D, d = cls.matrix, cls.multiplier, cls.det_m
    delta = q.delta
    if transform(q, M) != J.scaled(D):
        out.append("q(Mx) != D J(x)")
    if la.det(M) != d or d <= 0:
        out.append("det mismatch")
    if delta * d * d != D ** 3:
        out.append("delta det^2 != D^3")
    if delta % d:
        out.append("det does not divide delta")
    if (d * d) % D:
        out.append("D does not divide det^2")
    for p in factorize(delta // d) if delta // d > 1 else []:
        if factorize(delta)[p] < 4:
            out.append(f"prime {p} divides delta/det with small valuation")
    return out


def verify_decomposition(dec: Decomposition, bound: int, zeros=None) -> dict:
    """Exact checks of the class invariants and of the double cover of all zeros of sup-norm <= bound."""
    from .counting import brute_force_zeros
    q = dec.form
    failures = []
    for k, cls in enumerate(dec.classes):
        failures += [f"class {k}: {m}" for m in class_invariant_failures(q, cls)]
    tau = num_divisors(q.delta)
    if dec.k_count > tau:
        failures.append("more classes than divisors of delta")
    if is_squarefree(q.delta) and dec.k_count != tau:
        failures.append("square-free delta but K != tau(delta)")
    if zeros is None:
        zeros = brute_force_zeros(q, bound)
    zero_set = set(zeros)
    hits = {x: 0 for x in zeros}
    for cls in dec.classes:
        rc = cls.reduced
        X1, X2 = _box_for_sup(cls, bound)
        for u, v, x in class_vectors(cls.matrix, X1, X2):
            for y in (x, tuple(-t for t in x)):
                if max(abs(t) for t in y) <= bound:
                    if y not in zero_set:
                        failures.append(f"parametrised vector {y} is not an oracle zero")
                    else:
                        hits[y] += 1
    for x in zeros:
        try:
            class_of(dec, x)
        except AssertionError as exc:
            failures.append(str(exc))
        if hits[x] != 1:
            failures.append(f"zero {x} covered {hits[x]} times by representatives")
    return {"ok": not failures, "failures": failures, "zeros": len(zeros),
            "classes": dec.k_count}


def _box_for_sup(cls: ZeroClass, B):
    from math import sqrt
    R = B * sqrt(3)
    A = la.adjugate(cls.matrix)
    d = cls.det_m
    X1 = int(sqrt(R * sqrt(la.norm_sq(A[0])) / d)) + 1
    X2 = int(sqrt(R * sqrt(la.norm_sq(A[2])) / d)) + 1
    return X1, X2
