"""Integral ternary quadratic forms and their basic invariants."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, sqrt

from . import exactlinalg as la
from .arith import factorize, hilbert_symbol
from .errors import ImprimitiveFormError, MalformedFormError, SingularFormError


@dataclass(frozen=True)
class TernaryForm:
    """q(x) = q11 x1^2 + q12 x1x2 + q13 x1x3 + q22 x2^2 + q23 x2x3 + q33 x3^2."""
    q11: int
    q12: int
    q13: int
    q22: int
    q23: int
    q33: int

    @property
    def coeffs(self) -> tuple:
        return (self.q11, self.q12, self.q13, self.q22, self.q23, self.q33)

    def __call__(self, x) -> int:
        return evaluate(self, x)

    def __str__(self) -> str:
        return " ".join(str(c) for c in self.coeffs)

    def gram(self) -> tuple:
        a, b, c, d, e, f = self.coeffs
        return ((2 * a, b, c), (b, 2 * d, e), (c, e, 2 * f))

    @property
    def delta(self) -> int:
        return la.det(self.gram()) // 2

    @property
    def norm_sq(self) -> int:
        a, b, c, d, e, f = self.coeffs
        return 4 * a * a + 2 * b * b + 2 * c * c + 4 * d * d + 2 * e * e + 4 * f * f

    @property
    def norm(self) -> float:
        return sqrt(self.norm_sq)

    @property
    def content(self) -> int:
        return la.content(self.coeffs)

    def scaled(self, c: int) -> "TernaryForm":
        return TernaryForm(*(c * x for x in self.coeffs))

    def divided(self, c: int) -> "TernaryForm":
        if any(x % c for x in self.coeffs):
            raise ValueError("form is not divisible by %d" % c)
        return TernaryForm(*(x // c for x in self.coeffs))


J = TernaryForm(0, 0, 1, -1, 0, 0)


@dataclass(frozen=True)
class FormStats:
    gram: tuple
    delta: int
    norm_sq: int
    aspect_ratio: float


def from_gram(Q) -> TernaryForm:
    """Form with doubled Gram matrix Q (diagonal entries must be even)."""
    if any(Q[i][i] % 2 for i in range(3)):
        raise ValueError("gram matrix must have even diagonal")
    return TernaryForm(Q[0][0] // 2, Q[0][1], Q[0][2], Q[1][1] // 2, Q[1][2], Q[2][2] // 2)


def stats(q: TernaryForm) -> FormStats:
    d = q.delta
    rho = q.norm ** 3 / d if d else float("inf")
    return FormStats(q.gram(), d, q.norm_sq, rho)


def evaluate(q: TernaryForm, x) -> int:
    x1, x2, x3 = x
    a, b, c, d, e, f = q.coeffs
    return a * x1 * x1 + b * x1 * x2 + c * x1 * x3 + d * x2 * x2 + e * x2 * x3 + f * x3 * x3


def transform(q: TernaryForm, M) -> TernaryForm:
    """The form x -> q(Mx); may be imprimitive."""
    Q = la.matmul(la.matmul(la.transpose(M), q.gram()), M)
    return from_gram(Q)


def normalize(q: TernaryForm, divide_content: bool = False) -> TernaryForm:
    """Reject singular forms, remove or reject content, and make the determinant positive."""
    if q.delta == 0:
        raise SingularFormError("form is singular (determinant 0)")
    g = q.content
    if g != 1:
        if not divide_content:
            raise ImprimitiveFormError(f"form has content {g}")
        q = q.divided(g)
    if q.delta < 0:
        q = q.scaled(-1)
    return q


def parse_form(text: str, divide_content: bool = False) -> TernaryForm:
    """Parse six integers q11 q12 q13 q22 q23 q33 and normalise."""
    parts = text.replace(",", " ").split()
    if len(parts) != 6:
        raise MalformedFormError(f"expected six integers, got {len(parts)} fields")
    try:
        vals = [int(p) for p in parts]
    except ValueError as exc:
        raise MalformedFormError(str(exc)) from None
    return normalize(TernaryForm(*vals), divide_content)


def read_form_file(path: str, divide_content: bool = False) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                out.append(parse_form(line, divide_content))
    return out


# --- isotropy -------------------------------------------------------------

def rational_diagonal(q: TernaryForm) -> list:
    """Diagonal entries of some rational diagonalisation of q."""
    A = [[Fraction(x, 2) for x in row] for row in q.gram()]  # q(x) = x^T A x
    out = []
    n = 3
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][i] != 0), None)
        if piv is None:
            j = next(((i, l) for i in range(k, n) for l in range(i + 1, n) if A[i][l] != 0), None)
            if j is None:
                out.extend([Fraction(0)] * (n - k))
                break
            i, l = j
            # e_i <- e_i + e_l
            for r in range(n):
                A[r][i] += A[r][l]
            for c in range(n):
                A[i][c] += A[l][c]
            piv = i
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            for row in A:
                row[k], row[piv] = row[piv], row[k]
        a = A[k][k]
        out.append(a)
        for i in range(k + 1, n):
            f = A[i][k] / a
            for c in range(k, n):
                A[i][c] -= f * A[k][c]
        for i in range(k + 1, n):
            A[k][i] = A[i][k] = Fraction(0)
    return out


def is_definite(q: TernaryForm) -> bool:
    diag = rational_diagonal(q)
    return all(d > 0 for d in diag) or all(d < 0 for d in diag)


def locally_isotropic(q: TernaryForm) -> bool:
    """Hasse-Minkowski test: q has a nontrivial rational zero iff it has one everywhere."""
    if is_definite(q):
        return False
    ints = []
    for d in rational_diagonal(q):
        ints.append(d.numerator * d.denominator)
    a, b, c = ints
    primes = {2}
    for v in ints:
        primes.update(factorize(v))
    return all(hilbert_symbol(-a * c, -b * c, p) == 1 for p in sorted(primes))


def _roots_x3(q: TernaryForm, x1: int, x2: int):
    a = q.q33
    b = q.q13 * x1 + q.q23 * x2
    c = q.q11 * x1 * x1 + q.q12 * x1 * x2 + q.q22 * x2 * x2
    if a == 0:
        if b == 0:
            return [1] if (x1, x2) == (0, 0) else []
        return [-c // b] if c % b == 0 else []
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    s = isqrt(disc)
    if s * s != disc:
        return []
    out = []
    for num in (-b + s, -b - s):
        if num % (2 * a) == 0:
            out.append(num // (2 * a))
    return out


def _ring(h: int):
    """Pairs (x1, x2) with max(|x1|, |x2|) == h in a fixed order."""
    if h == 0:
        yield (0, 0)
        return
    for x1 in range(-h, h + 1):
        yield (x1, -h)
        yield (x1, h)
    for x2 in range(-h + 1, h):
        yield (-h, x2)
        yield (h, x2)


def find_isotropic(q: TernaryForm, bound_multiplier: float = 1.0):
    """A primitive zero of q of length at most 10*bound_multiplier*|q|, or None.

    None certifies anisotropy when bound_multiplier >= 1.
    """
    if is_definite(q):
        return None
    if bound_multiplier >= 1 and not locally_isotropic(q):
        return None
    H = int(10 * bound_multiplier * q.norm) + 1
    limit_sq = (10 * bound_multiplier) ** 2 * q.norm_sq
    for h in range(H + 1):
        for x1, x2 in _ring(h):
            for x3 in _roots_x3(q, x1, x2):
                if (x1, x2, x3) == (0, 0, 0):
                    continue
                z = la.primitive((x1, x2, x3))
                if la.norm_sq(z) <= limit_sq:
                    return z
    return None
