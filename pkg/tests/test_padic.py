import random

import pytest

from conic_zeros import exactlinalg as la
from conic_zeros.arith import factorize
from conic_zeros.counting import brute_force_zeros
from conic_zeros.forms import J, TernaryForm, find_isotropic, normalize, transform
from conic_zeros.padic import (DEGENERATE_LINE, NONSPLIT_PLANE, SPLIT_HYPERBOLIC, check_normal_form,
                               mod_p_normal_form, split_unit_form, strip_prime, valuation)

from conftest import random_isotropic_form, random_unimodular, scrambled_form


def _random_forms(n, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        q = TernaryForm(*(rng.randint(-40, 40) for _ in range(6)))
        if q.delta != 0 and q.content == 1:
            out.append(normalize(q))
    return out


def test_normal_forms_all_primes_of_random_forms():
    tags = set()
    for q in _random_forms(400, 1):
        for p, e in factorize(q.delta).items():
            if q.content % p == 0:
                continue
            nf = mod_p_normal_form(q, p, e)
            assert check_normal_form(q, p, e, nf)
            assert la.det(nf.transform) == 1
            tags.add((p == 2, nf.case_tag))
    for two in (True, False):
        for tag in (DEGENERATE_LINE, SPLIT_HYPERBOLIC, NONSPLIT_PLANE):
            assert (two, tag) in tags


def test_normal_form_rejects_bad_input(q0):
    with pytest.raises(ValueError):
        mod_p_normal_form(q0, 977861, 2)
    with pytest.raises(ValueError):
        mod_p_normal_form(q0, 3, 1)


def test_valuation():
    assert valuation(2 ** 5 * 3, 2) == 5 and valuation(7, 3) == 0


def test_nonsplit_with_e_one_has_no_zeros():
    q = TernaryForm(1, 0, 0, -2, 0, 5)          # x^2 - 2y^2 + 5z^2, anisotropic at 5
    assert valuation(abs(q.delta), 5) == 1
    q = normalize(q)
    assert strip_prime(q, 5, 1).matrices == []


@pytest.mark.parametrize("seed", range(6))
def test_strip_prime_partitions_zeros(seed):
    rng = random.Random(seed)
    q = scrambled_form(rng) if seed % 2 else random_isotropic_form(rng, 30)
    zeros = brute_force_zeros(q, 40)
    for p, e in factorize(q.delta).items():
        res = strip_prime(q, p, e)
        assert len(res.matrices) <= e + 1
        for (R, mu), r in zip(res.matrices, res.reduced_forms):
            assert la.det(R) == p ** mu
            assert r.delta * p ** e == q.delta
            assert transform(q, R) == r.scaled(p ** ((e + 2 * mu) // 3))
        for x in zeros:
            hits = sum(1 for R, _ in res.matrices if la.in_lattice(R, x))
            assert hits == 1


def test_split_unit_form_on_scrambled_j():
    rng = random.Random(3)
    for _ in range(50):
        U = random_unimodular(rng, steps=8)
        q = transform(J, U)
        z = find_isotropic(q)
        M = split_unit_form(q, z)
        assert transform(q, M) == J
        assert la.det(M) == 1


def test_split_unit_form_rejects_non_zero():
    with pytest.raises(ValueError):
        split_unit_form(J, (1, 1, 0))
