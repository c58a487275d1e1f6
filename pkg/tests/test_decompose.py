import random

import pytest

from conic_zeros import exactlinalg as la
from conic_zeros.arith import is_squarefree, num_divisors
from conic_zeros.counting import brute_force_zeros
from conic_zeros.decompose import (ZeroClass, check_nonempty, class_invariant_failures, class_of,
                                   decompose, verify_decomposition)
from conic_zeros.errors import AnisotropicFormError, ImprimitiveFormError, SingularFormError
from conic_zeros.forms import J, TernaryForm, transform

from conftest import random_isotropic_form, scrambled_form

# column Hermite forms of the two reference lattices for q0 (frozen)
HNF_C1 = ((1, 0, 0), (0, 1, 0), (977860, 576937, 977861))
HNF_C2 = ((1, 0, 0), (0, 1, 0), (100295, 927462, 977861))


def test_q0_decomposition(q0):
    dec = decompose(q0)
    assert dec.k_count == 2
    assert {c.hnf for c in dec.classes} == {HNF_C1, HNF_C2}
    for c in dec.classes:
        assert c.multiplier == c.det_m == 977861
        assert transform(q0, c.matrix) == J.scaled(977861)
        assert not class_invariant_failures(q0, c)


def test_reference_lattices_match_frozen_hnf():
    import sympy
    from conic_zeros.reference import M1_REF, M2_REF
    assert la.hnf(M1_REF) == HNF_C1
    assert la.hnf(M2_REF) == HNF_C2
    # independent check with rational arithmetic: H^-1 M is unimodular
    for H, M in ((HNF_C1, M1_REF), (HNF_C2, M2_REF)):
        T = sympy.Matrix(H).inv() * sympy.Matrix(M)
        assert all(x.is_integer for x in T) and abs(T.det()) == 1


def test_j_decomposition():
    dec = decompose(J)
    assert dec.k_count == 1
    assert dec.classes[0].matrix == ((0, 0, 1), (0, -1, 0), (1, 0, 0))
    assert dec.classes[0].multiplier == 1


def test_errors():
    with pytest.raises(SingularFormError):
        decompose(TernaryForm(1, 0, 0, 0, 0, 0))
    with pytest.raises(ImprimitiveFormError):
        decompose(TernaryForm(0, 0, 2, -2, 0, 0))
    with pytest.raises(AnisotropicFormError):
        decompose(TernaryForm(-1, 0, 0, -1, 0, 3))


@pytest.mark.parametrize("seed", range(25))
def test_partition_on_random_forms(seed):
    rng = random.Random(seed)
    q = scrambled_form(rng) if seed % 2 else random_isotropic_form(rng)
    dec = decompose(q)
    rep = verify_decomposition(dec, 40)
    assert rep["ok"], rep["failures"][:5]
    assert dec.k_count <= num_divisors(q.delta)
    if is_squarefree(q.delta):
        assert dec.k_count == num_divisors(q.delta)


def test_planted_scrambles_of_scaled_j():
    # q = J(V x) with a diagonal twist; its classes must recover a matrix of the right shape
    rng = random.Random(11)
    for _ in range(20):
        q = scrambled_form(rng, max_det=12)
        dec = decompose(q)
        for c in dec.classes:
            assert q.delta * c.det_m ** 2 == c.multiplier ** 3
            assert q.delta % c.det_m == 0 and (c.det_m ** 2) % c.multiplier == 0


def test_class_of_assigns_every_zero_once(q0):
    dec = decompose(q0)
    zeros = brute_force_zeros(q0, 2000)
    idx = [class_of(dec, x) for x in zeros]
    assert set(idx) == {0, 1}
    with pytest.raises(ValueError):
        class_of(dec, (1, 0, 0))


def test_empty_class_search():
    # every polished candidate class of many forms has a primitive zero witness
    rng = random.Random(5)
    for _ in range(40):
        q = scrambled_form(rng)
        for c in decompose(q).classes:
            ok, (u, v) = check_nonempty(q, c)
            x = la.matvec(c.matrix, (u * u, u * v, v * v))
            assert ok and la.content(x) == 1 and q(x) == 0


def test_check_nonempty_detects_an_empty_class():
    # 2 J has no primitive image: M = 2 I gives only even vectors
    cls = ZeroClass(la.scale(((0, 0, 1), (0, -1, 0), (1, 0, 0)), 2), 4, 8)
    assert check_nonempty(J, cls) == (False, None)
