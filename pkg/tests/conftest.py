import random

import pytest

from conic_zeros import exactlinalg as la
from conic_zeros.forms import J, TernaryForm, is_definite, locally_isotropic, normalize, transform

Q0 = TernaryForm(-61, 0, -22, -38, 99, 39)


def random_unimodular(rng, steps=6, size=3):
    m = la.identity(3)
    for _ in range(steps):
        i, j = rng.sample(range(3), 2)
        k = rng.randint(-size, size)
        rows = [list(r) for r in m]
        rows[i] = [a + k * b for a, b in zip(rows[i], rows[j])]
        m = la.as_matrix(rows)
    return m


def scrambled_form(rng, max_det=40):
    """J composed with an integer matrix of small determinant, made primitive."""
    while True:
        d1 = rng.randint(1, max_det)
        d2 = rng.randint(1, max(1, max_det // d1))
        A = la.matmul(random_unimodular(rng), la.matmul(la.diag(1, d1, d1 * d2), random_unimodular(rng)))
        q = transform(J, A)
        if max(abs(c) for c in q.coeffs) > 10 ** 4:
            continue
        return normalize(q, divide_content=True)


def random_isotropic_form(rng, bound=50):
    while True:
        q = TernaryForm(*(rng.randint(-bound, bound) for _ in range(6)))
        if q.delta == 0 or q.content != 1 or is_definite(q):
            continue
        q = normalize(q)
        if locally_isotropic(q):
            return q


def sample_forms(n=200, seed=12345):
    rng = random.Random(seed)
    half = n // 2
    return [scrambled_form(rng) for _ in range(half)] + \
        [random_isotropic_form(rng) for _ in range(n - half)]


@pytest.fixture(scope="session")
def q0():
    return Q0


@pytest.fixture(scope="session")
def forms200():
    return sample_forms()


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(ACCEPTANCE_RESULTS[n])
