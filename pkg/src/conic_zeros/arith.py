"""Elementary number theory helpers: factoring, symbols, square roots mod p."""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import sympy

from .errors import FactoringError

TRIAL_LIMIT = 10 ** 6
FACTOR_BIT_CAP = 200     # composite cofactors above this size are not attempted


@lru_cache(maxsize=4096)
def _factor_cached(n: int):
    out = {}
    p = 2
    while p * p <= n and p < TRIAL_LIMIT:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        if p * p > n or sympy.isprime(n):
            out[n] = out.get(n, 0) + 1
        else:
            if n.bit_length() > FACTOR_BIT_CAP:
                raise FactoringError(f"refusing to factor a {n.bit_length()}-bit cofactor")
            rest = sympy.factorint(n)
            for q, e in rest.items():
                if not sympy.isprime(q):
                    raise FactoringError(f"could not factor {n}")
                out[q] = out.get(q, 0) + e
    return tuple(sorted(out.items()))


def factorize(n: int) -> dict:
    """Prime factorisation of |n| as {p: e}."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    return dict(_factor_cached(n))


def primes_of(n: int) -> list:
    return sorted(factorize(n))


def num_divisors(n: int) -> int:
    out = 1
    for e in factorize(n).values():
        out *= e + 1
    return out


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod_prime(a: int, p: int):
    """Some square root of a mod p, or None."""
    a %= p
    if p == 2 or a == 0:
        return a
    if legendre(a, p) != 1:
        return None
    return int(sympy.sqrt_mod(a, p))


def sqrt_mod_prime_power(a: int, p: int, n: int):
    """A square root of a modulo p**n for odd p and a a unit mod p, else None."""
    if a % p == 0:
        raise ValueError("a must be a unit mod p")
    r = sqrt_mod_prime(a, p)
    if r is None:
        return None
    mod = p
    for _ in range(1, n):
        mod *= p
        # Newton step r <- r - (r^2 - a) / (2r)
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    assert (r * r - a) % (p ** n) == 0
    return r


def _split(a: int, p: int):
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """(a, b)_p for nonzero integers a, b and a prime p."""
    alpha, u = _split(a, p)
    beta, v = _split(b, p)
    if p != 2:
        eps = (p - 1) // 2
        s = (-1) ** (alpha * beta * eps)
        s *= legendre(u, p) ** beta * legendre(v, p) ** alpha
        return s
    eu = ((u - 1) // 2) % 2
    ev = ((v - 1) // 2) % 2
    wu = ((u * u - 1) // 8) % 2
    wv = ((v * v - 1) // 8) % 2
    return (-1) ** ((eu * ev + alpha * wv + beta * wu) % 2)


def squarefree_divisors(primes):
    """All (d, mu(d)) with d a product of distinct primes from the list."""
    out = []
    for bits in product((0, 1), repeat=len(primes)):
        d, s = 1, 1
        for b, p in zip(bits, primes):
            if b:
                d *= p
                s = -s
        out.append((d, s))
    return out


def mobius_upto(n: int):
    """List mu(0..n) by a linear sieve (mu(0) set to 0)."""
    mu = [1] * (n + 1)
    if n >= 0:
        mu[0] = 0
    is_comp = [False] * (n + 1)
    primes = []
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > n:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu
