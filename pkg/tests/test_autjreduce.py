import random

import pytest
from hypothesis import given, strategies as st

from conic_zeros import exactlinalg as la
from conic_zeros.autjreduce import (U2, _best_shear, _word_matrix, class_vectors, row_geometry_check,
                                    minimal_zeros, polish, preserves_j, reduce_rows, reduced_bounds,
                                    sym_square)
from conic_zeros.counting import brute_force_zeros
from conic_zeros.decompose import decompose
from conic_zeros.forms import J, transform

from conftest import random_isotropic_form, scrambled_form

sl2_entry = st.integers(-6, 6)


def _sl2(rng, n=6):
    g = ((1, 0), (0, 1))
    for _ in range(n):
        k = rng.randint(-4, 4)
        e = ((1, k), (0, 1)) if rng.random() < 0.5 else ((1, 0), (k, 1))
        g = ((g[0][0] * e[0][0] + g[0][1] * e[1][0], g[0][0] * e[0][1] + g[0][1] * e[1][1]),
             (g[1][0] * e[0][0] + g[1][1] * e[1][0], g[1][0] * e[0][1] + g[1][1] * e[1][1]))
    return g


def test_sym_square_is_a_homomorphism_into_aut_j():
    rng = random.Random(0)
    for _ in range(100):
        g, h = _sl2(rng), _sl2(rng)
        gh = tuple(tuple(sum(g[i][k] * h[k][j] for k in range(2)) for j in range(2)) for i in range(2))
        assert sym_square(gh) == la.matmul(sym_square(g), sym_square(h))
        assert preserves_j(sym_square(g))
    assert preserves_j(U2) and la.det(U2) == 1
    assert preserves_j(la.diag(1, -1, 1))
    with pytest.raises(ValueError):
        sym_square(((2, 0), (0, 1)))


@given(st.tuples(*[st.tuples(*[st.integers(-50, 50)] * 3)] * 3))
def test_best_shear_is_the_exact_minimiser(rows):
    a, b, c = rows
    if la.norm_sq(a) == 0:
        return
    m = _best_shear(a, b, c)

    def f(t):
        return la.norm_sq(tuple(t * t * x + 2 * t * y + z for x, y, z in zip(a, b, c)))
    best = min(f(t) for t in range(-300, 301))
    assert f(m) == best
    assert all(f(t) > best or abs(t) >= abs(m) for t in range(-300, 301))


def _class_data(seed):
    rng = random.Random(seed)
    q = scrambled_form(rng) if seed % 2 else random_isotropic_form(rng)
    cls = decompose(q).classes[0]
    return rng, q, cls


@pytest.mark.parametrize("seed", range(12))
def test_reduce_rows_undoes_random_words(seed):
    rng, q, cls = _class_data(seed)
    M, D, d = cls.matrix, cls.multiplier, cls.det_m
    c = d * d // D
    A = la.adjugate(M)
    V = sym_square(_sl2(rng, 8))
    A2 = la.matmul(V, A)
    assert transform(J, A2) == q.scaled(c)
    U, rows = reduce_rows(A2, c, q)
    assert la.matmul(U.matrix, A2) == rows
    assert _word_matrix(U.word) == U.matrix
    a, b, cc = rows
    assert la.norm_sq(a) * la.norm_sq(cc) <= 81 * c * c * q.norm_sq
    assert la.norm_sq(b) ** 2 <= 100 * c * c * q.norm_sq


@pytest.mark.parametrize("seed", range(12))
def test_polish_scrambled_class_matrix(seed):
    rng, q, cls = _class_data(seed)
    M2 = la.matmul(cls.matrix, sym_square(_sl2(rng, 8)))
    rc = polish(q, M2, cls.multiplier)
    assert la.same_lattice(rc.matrix, cls.matrix)
    assert transform(q, rc.matrix) == J.scaled(cls.multiplier)
    assert all(reduced_bounds(q, rc.matrix, cls.multiplier).values())


def test_polish_rejects_invalid_input(q0):
    with pytest.raises(ValueError):
        polish(q0, la.identity(3), 1)


@pytest.mark.parametrize("seed", range(10))
def test_row_geometry_on_random_row_words(seed):
    rng, q, cls = _class_data(seed)
    c = cls.det_m ** 2 // cls.multiplier
    A = la.matmul(sym_square(_sl2(rng, 5)), la.adjugate(cls.matrix))
    if la.norm_sq(A[0]) > la.norm_sq(A[2]):
        A = la.matmul(U2, A)
    out = row_geometry_check(A, q, c)
    assert out["i"] and out["ii"] and out["iii"] and out["iv"]


def test_minimal_zeros_of_q0(q0):
    dec = decompose(q0)
    got = {minimal_zeros(q0, c.reduced)[:2] for c in dec.classes}
    assert ((1, 0, -1), (3470, 3239, 3102)) in got
    assert ((39, 0, 61), (38, -99, -38)) in got
    sup = {minimal_zeros(q0, c.reduced, norm="sup")[1] for c in dec.classes}
    assert (3426, 3339, 3047) in sup


@pytest.mark.parametrize("seed", range(8))
def test_minimal_zeros_against_brute_force(seed):
    rng = random.Random(100 + seed)
    q = random_isotropic_form(rng, 20)
    B = 400
    zeros = brute_force_zeros(q, B)
    for cls in decompose(q).classes:
        z1, z2, complete = minimal_zeros(q, cls.reduced)
        assert complete
        mine = sorted({la.canonical_sign(x) for x in zeros if cls.contains(x)}, key=la.norm_sq)
        short = [x for x in mine if la.norm_sq(x) <= B * B]
        if len(short) >= 2:
            assert la.norm_sq(z1) == la.norm_sq(short[0])
            assert la.norm_sq(z2) == la.norm_sq(short[1])


def test_class_vectors_are_representatives():
    seen = set()
    for u, v, x in class_vectors(((0, 0, 1), (0, -1, 0), (1, 0, 0)), 6, 6):
        assert J(x) == 0
        assert tuple(-t for t in x) not in seen
        seen.add(x)
    assert len(seen) == len({la.canonical_sign(x) for x in seen})
