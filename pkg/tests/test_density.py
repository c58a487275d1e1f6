from math import exp, sqrt

import numpy as np
import pytest
from scipy import integrate

from conic_zeros.decompose import decompose
from conic_zeros.density import (SHARP_L2, SHARP_SUP, SMOOTH, Weight, bump_radial_constant,
                                 eigen_diagnostics, eigen_split, kernel_kt, sigma_infinity_2d,
                                 sigma_infinity_3d)
from conic_zeros.forms import J, TernaryForm, normalize


def _l2_density_j():
    """Density of x1 x3 = x2^2 in the unit ball, fibred over x1 (x3 = x2^2/x1, weight 1/|x1|).

    For fixed x1 the constraint x1^2 + t + t^2/x1^2 <= 1 on t = x2^2 gives |x2| <= sqrt(t_max).
    """
    def f(x1):
        t_max = x1 * x1 * (-1 + sqrt(1 + 4 * (1 - x1 * x1) / (x1 * x1))) / 2
        return 2 * sqrt(t_max) / x1
    return 2 * integrate.quad(f, 0, 1, limit=400, epsrel=1e-12)[0]


def test_kernel_integrates_to_one():
    for T in (1.0, 7.5, 400.0):
        val = integrate.quad(lambda t: float(kernel_kt(t, T)), -1 / T, 1 / T)[0]
        assert abs(val - 1) < 1e-12
    with pytest.raises(ValueError):
        kernel_kt(0.0, 0)


def test_bump_constant():
    # independent evaluation after the substitution s = tanh(y)
    val = integrate.quad(lambda y: exp(-np.cosh(y) ** 2) / np.cosh(y) ** 2, 0, 40)[0]
    assert abs(bump_radial_constant() - val) < 1e-12


def test_weights():
    w = Weight(SMOOTH, 2.0)
    assert w((0, 0, 0)) == exp(-1)
    assert w((2, 0, 0)) == 0
    assert Weight(SHARP_SUP)((1, -1, 1)) == 1 and Weight(SHARP_L2)((1, 1, 0)) == 0
    assert Weight(SHARP_SUP).plus((0.5, 0, 0)) == 2
    with pytest.raises(ValueError):
        Weight("box")


def test_j_sharp_densities():
    cls = decompose(J).classes[0]
    # |x2|^2 <= |x1| <= 1 gives 2 * int_{-1}^{1} |x1|^(-1/2) = 8
    assert abs(sigma_infinity_2d(J, cls, Weight(SHARP_SUP)).value - 8) < 1e-9
    l2 = _l2_density_j()
    assert abs(sigma_infinity_2d(J, cls, Weight(SHARP_L2)).value - l2) < 1e-8 * l2


def test_weight_scaling():
    cls = decompose(J).classes[0]
    a = sigma_infinity_2d(J, cls, Weight(SMOOTH, 1.0)).value
    b = sigma_infinity_2d(J, cls, Weight(SMOOTH, 3.0)).value
    assert abs(b - 3 * a) < 1e-9 * b


@pytest.mark.parametrize("coeffs", [(0, 0, 1, -1, 0, 0), (-61, 0, -22, -38, 99, 39),
                                    (1, 0, 0, 1, 0, -2), (2, 3, 1, -5, 4, -1)])
def test_two_routes_agree(coeffs):
    q = normalize(TernaryForm(*coeffs), divide_content=True)
    dec = decompose(q)
    s2 = [sigma_infinity_2d(q, c).value for c in dec.classes]
    assert max(s2) - min(s2) <= 1e-8 * max(s2)
    s3 = sigma_infinity_3d(q).value
    assert abs(s2[0] - s3) <= 1e-4 * s2[0]


def test_sharp_sup_is_class_independent(q0):
    vals = [sigma_infinity_2d(q0, c, Weight(SHARP_SUP)).value for c in decompose(q0).classes]
    assert abs(vals[0] - vals[1]) <= 1e-9 * vals[0]


def test_three_d_route_needs_smooth_weight():
    with pytest.raises(ValueError):
        sigma_infinity_3d(J, Weight(SHARP_SUP))


def test_eigen_diagnostics(q0):
    lam, mu, nu, _ = eigen_split(q0)
    assert abs(lam * mu * nu - 2 * q0.delta) <= 1e-9 * 2 * q0.delta
    d = eigen_diagnostics(q0, sigma_w=0.089)
    assert d["window_ok"] and d["case_ok"] and d["weight_comparison_ok"]
    assert d["product_rel_error"] < 1e-9
    dj = eigen_diagnostics(J)
    assert dj["window_ok"]
    assert dj["case_ok"] and dj["product_rel_error"] < 1e-12
