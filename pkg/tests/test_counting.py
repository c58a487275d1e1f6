import random
from itertools import product
from math import gcd, pi

import pytest

from conic_zeros import exactlinalg as la
from conic_zeros.counting import (L2, SUP, W0, ClassHeights, _bf_python, bad_points, brute_force_zeros,
                                  count_class, count_total, intersect, liouville, predict_total,
                                  scan_bad_points, sieve_identity_check, sieve_setup, w0)
from conic_zeros.decompose import decompose
from conic_zeros.forms import J, TernaryForm, normalize

from conftest import random_isotropic_form, scrambled_form

FIGURE_B = list(range(500, 10001, 500))
FIGURE_VALUES = [8, 15, 22, 30, 37, 40, 52, 78, 97, 112, 126, 141, 159, 175, 189, 207, 219,
                 235, 248, 262]


def _triple_loop(q, B):
    r = range(-B, B + 1)
    return sorted(x for x in product(r, r, r)
                  if x != (0, 0, 0) and q(x) == 0 and gcd(gcd(x[0], x[1]), x[2]) == 1)


@pytest.mark.parametrize("coeffs", [(0, 0, 1, -1, 0, 0), (-61, 0, -22, -38, 99, 39),
                                    (1, 0, 0, 1, 0, -2), (3, 5, -7, 2, 1, 0), (0, 1, 0, 0, 0, 1)])
def test_brute_force_matches_triple_loop(coeffs):
    q = normalize(TernaryForm(*coeffs), divide_content=True)
    assert brute_force_zeros(q, 12) == _triple_loop(q, 12)


def test_brute_force_paths_agree(q0):
    fast = brute_force_zeros(q0, 300)
    assert fast == sorted(set(_bf_python(q0, 300, range(-300, 301))))
    assert brute_force_zeros(q0, 300, workers=2) == fast
    with pytest.raises(ValueError):
        brute_force_zeros(q0, 20000)


def test_j_count_at_ten():
    cls = decompose(J).classes[0]
    # 32 primitive zeros of x1 x3 - x2^2 with sup-norm <= 10, by the triple loop
    assert len(_triple_loop(J, 10)) == 32
    assert count_class(J, cls, 10) == 32


def test_figure_values(q0):
    dec = decompose(q0)
    hs = [ClassHeights(c, 10000) for c in dec.classes]
    half = [sum(h.count(B) for h in hs) // 2 for B in FIGURE_B]
    assert half == FIGURE_VALUES


@pytest.mark.parametrize("seed", range(10))
def test_class_counts_match_oracle(seed):
    rng = random.Random(seed)
    q = scrambled_form(rng) if seed % 2 else random_isotropic_form(rng)
    dec = decompose(q)
    zeros = brute_force_zeros(q, 60)
    for B in (7, 25, 60):
        sup = sum(count_class(q, c, B, SUP) for c in dec.classes)
        assert sup == sum(1 for x in zeros if max(map(abs, x)) <= B)
        l2 = sum(count_class(q, c, B, L2) for c in dec.classes)
        assert l2 == sum(1 for x in zeros if la.norm_sq(x) <= B * B)
        ch = [ClassHeights(c, 60, SUP).count(B) for c in dec.classes]
        assert ch == [count_class(q, c, B, SUP) for c in dec.classes]
    smooth = sum(count_class(q, c, 30, W0, 1.5) for c in dec.classes)
    want = sum(w0(la.norm_sq(x) / 45 ** 2) for x in zeros)
    assert abs(smooth - want) <= 1e-9 * max(1, want)


def test_count_total_report(q0):
    dec = decompose(q0)
    rep = count_total(q0, dec, 3000, SUP, predicted_slope=0.05)
    assert rep.raw_count == 80 and rep.point_count == 40
    assert abs(rep.predicted - 150) < 1e-9


def test_bad_points_agree_with_scan(q0):
    for q in (q0, J, normalize(TernaryForm(0, 0, 1, -36, 0, 0))):
        for c in decompose(q).classes:
            for p in (2, 3, 5, 7, 977861):
                if la.det(c.matrix) % p == 0:
                    assert bad_points(c.matrix, p) == scan_bad_points(c.matrix, p)


def test_lattice_intersection():
    A = la.Lattice2((1, 2), (0, 3))
    Bl = la.Lattice2((5, 0), (0, 1))
    I = intersect(A, Bl)
    assert I.determinant == 15
    for u in product(range(-20, 21), repeat=2):
        assert I.contains(u) == (A.contains(u) and Bl.contains(u))


def test_liouville():
    assert [liouville(n) for n in (1, 2, 4, 6, 8, 12, 30)] == [1, -1, 1, 1, -1, -1, -1]


def test_kappa_q0(q0):
    for c in decompose(q0).classes:
        s = sieve_setup(c)
        assert (s.delta1, s.delta2) == (977861, 1)
        assert abs(s.kappa - 6 / pi ** 2 / (1 + 1 / 977861)) <= 1e-12 * s.kappa


def _kappa_by_counting(M, N=300):
    """Density of coprime (u, v) with primitive image, times 6/pi^2."""
    total = good = 0
    for u in range(0, N + 1):
        for v in range(-N, N + 1):
            if (u == 0 and v <= 0) or gcd(u, v) != 1:
                continue
            total += 1
            good += la.content(la.matvec(M, (u * u, u * v, v * v))) == 1
    return 6 / pi ** 2 * good / total


def test_kappa_against_direct_density():
    q = normalize(TernaryForm(0, 0, 1, -36, 0, 0))
    for c in decompose(q).classes:
        s = sieve_setup(c)
        assert 0 < s.kappa <= 6 / pi ** 2
        assert abs(_kappa_by_counting(c.matrix) - s.kappa) <= 0.01 * s.kappa


@pytest.mark.parametrize("coeffs", [(0, 0, 1, -9, 0, 0), (0, 0, 1, -25, 0, 0),
                                    (0, 0, 1, -36, 0, 0), (0, 0, 1, -1, 0, 0)])
def test_sieve_identity_planted(coeffs):
    q = normalize(TernaryForm(*coeffs))
    tags = set()
    for c in decompose(q).classes:
        s = sieve_setup(c)
        tags |= {p.tag for p in s.primes}
        for B in (20, 100, 500):
            r = sieve_identity_check(q, c, B, sieve=s)
            assert r["ok"], r
        for B in (20, 100):
            assert sieve_identity_check(q, c, B, L2, sieve=s)["ok"]
    if coeffs[3] != -1:
        assert "P2" in tags


def test_prediction_structure(q0):
    dec = decompose(q0)
    pred = predict_total(q0, dec, 0.1)
    S = pred["singular_series"]
    assert abs(S - 2 * 6 / pi ** 2 / (1 + 1 / 977861)) < 1e-12
    assert abs(pred["slope"] - 0.05 * S) < 1e-15
    assert abs(sum(pred["per_class"]) - pred["slope"]) < 1e-12
