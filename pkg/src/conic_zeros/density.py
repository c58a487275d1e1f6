"""The real density of the zero locus of q with respect to a weight.

Two independent routes:

* pushforward: sqrt(D/delta) * integral over R^2 of w_+(M(x1^2, x1 x2, x2^2)) for a class
  matrix M.  In polar coordinates the radial integral is explicit, leaving a
  periodic integral in the angle.
* kernel: the integral over R^3 of w(y) K_T(q(y)), extrapolated to T -> infinity.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import e as E_CONST, exp, log, pi, sqrt

import numpy as np
from scipy import integrate

from .forms import TernaryForm

SMOOTH, SHARP_SUP, SHARP_L2 = "SmoothBump", "SharpSup", "SharpL2"


@dataclass(frozen=True)
class Weight:
    kind: str = SMOOTH
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in (SMOOTH, SHARP_SUP, SHARP_L2) or self.scale <= 0:
            raise ValueError("bad weight")

    def __call__(self, y) -> float:
        y = np.asarray(y, dtype=float) / self.scale
        if self.kind == SHARP_SUP:
            return float(np.max(np.abs(y)) <= 1)
        r2 = float(np.dot(y, y))
        if self.kind == SHARP_L2:
            return float(r2 <= 1)
        return exp(-1 / (1 - r2)) if r2 < 1 else 0.0

    def plus(self, y) -> float:
        y = np.asarray(y, dtype=float)
        return self(y) + self(-y)


@dataclass(frozen=True)
class DensityEstimate:
    value: float
    method: str
    est_error: float
    converged: bool = True


def kernel_kt(t, T: float):
    """T max(1 - T|t|, 0)."""
    if T <= 0:
        raise ValueError("T must be positive")
    return T * np.maximum(1 - T * np.abs(t), 0.0)


@lru_cache(maxsize=1)
def bump_radial_constant() -> float:
    """Integral of exp(-1/(1 - s^2)) over 0 <= s <= 1."""
    val, _ = integrate.quad(lambda s: exp(-1 / (1 - s * s)) if s < 1 else 0.0, 0, 1,
                            epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


def _angle_integrand(M, w: Weight):
    M = np.array(M, dtype=float)

    def f(theta):
        c, s = np.cos(theta), np.sin(theta)
        g = M @ np.vstack([c * c, c * s, s * s])
        if w.kind == SHARP_SUP:
            return 1.0 / np.max(np.abs(g), axis=0)
        return 1.0 / np.sqrt(np.sum(g * g, axis=0))
    return f


def pushforward_integral(M, w: Weight, rtol: float = 1e-6, levels: int = 12):
    """Integral over R^2 of w_+(M(x1^2, x1 x2, x2^2)), with an error estimate.

    With x = r(cos t, sin t) the radial integral of w(r^2 g(t)) is
    scale * C / |g(t)|, where C = 1 for sharp weights and the bump constant
    otherwise.  The remaining integral over t in [0, pi) is a periodic
    trapezoid rule, refined by doubling.
    """
    f = _angle_integrand(M, w)
    C = bump_radial_constant() if w.kind == SMOOTH else 1.0
    factor = 2 * w.scale * C      # w_+ = 2w on even weights
    if w.kind == SHARP_SUP:
        val, err = _piecewise_sup(M, f, rtol)
        return factor * val, factor * err, err <= rtol * abs(val)
    n = 64
    total = np.sum(f(np.arange(n) * pi / n))
    est = total * pi / n
    err = float("inf")
    converged = False
    for _ in range(levels):
        mids = (np.arange(n) + 0.5) * pi / n
        total += np.sum(f(mids))
        n *= 2
        new = total * pi / n
        err = abs(new - est)
        est = new
        if err <= rtol * abs(est):
            converged = True
            break
    return factor * est, factor * err, converged


def _sup_breakpoints(M) -> list:
    """Angles in [0, pi) where two coordinates of g(t) have equal modulus."""
    M = np.array(M, dtype=float)
    pts = {0.0, pi}
    for i in range(3):
        for j in range(i + 1, 3):
            for sgn in (1, -1):
                a, b, c = M[i] - sgn * M[j]     # a cos^2 + b cos sin + c sin^2 = 0
                if a == b == c == 0:
                    continue
                if c == 0:
                    pts.add(pi / 2)
                    roots = [-a / b] if b else []
                else:
                    roots = [r.real for r in np.roots([c, b, a]) if abs(r.imag) < 1e-12]
                for t in roots:                      # t = tan(theta)
                    pts.add(float(np.arctan(t)) % pi)
    return sorted(pts)


def _piecewise_sup(M, f, rtol):
    pts = _sup_breakpoints(M)
    total = err = 0.0
    for lo, hi in zip(pts, pts[1:]):
        if hi - lo < 1e-15:
            continue
        v, e = integrate.quad(lambda t: float(f(np.array([t]))[0]), lo, hi,
                              epsabs=0, epsrel=min(rtol, 1e-10), limit=200)
        total += v
        err += e
    return total, err


def sigma_infinity_2d(q: TernaryForm, cls, w: Weight = Weight(), rtol: float = 1e-6,
                      levels: int = 12) -> DensityEstimate:
    """Real density from a class matrix M with q(Mx) = D J(x)."""
    val, err, ok = pushforward_integral(cls.matrix, w, rtol, levels)
    c = sqrt(cls.multiplier / q.delta)
    return DensityEstimate(float(c * val), "Pushforward2D", float(c * err), bool(ok))


# --- the kernel route ------------------------------------------------------------

def eigen_split(q: TernaryForm):
    """Eigenvalues lam > 0 > -mu, -nu of the doubled Gram matrix, with eigenvectors."""
    ev, V = np.linalg.eigh(np.array(q.gram(), dtype=float))
    if not (ev[0] < 0 < ev[2] and ev[1] < 0):
        raise ValueError("form must be indefinite with positive determinant")
    return ev[2], -ev[0], -ev[1], V


def _gl(n):
    x, wts = np.polynomial.legendre.leggauss(n)
    return x, wts


def _panels(a, b, k, x, wts):
    """Composite Gauss-Legendre nodes and weights on [a, b] with k panels (a, b arrays)."""
    nodes, weights = [], []
    for j in range(k):
        lo = a + (b - a) * j / k
        hi = a + (b - a) * (j + 1) / k
        half = (hi - lo) / 2
        nodes.append(lo[..., None] + half[..., None] * (x + 1))
        weights.append(half[..., None] * wts)
    return np.concatenate(nodes, axis=-1), np.concatenate(weights, axis=-1)


def kernel_integral(q: TernaryForm, T: float, w: Weight = Weight(), n_phi: int = 96,
                    n_rho: int = 24, rho_panels: int = 12, n_z: int = 16) -> float:
    """The integral over R^3 of w(y) K_T(q(y)) for the smooth bump weight."""
    if w.kind != SMOOTH:
        raise ValueError("the kernel route needs a smooth weight")
    lam, mu, nu, _ = eigen_split(q)
    s2 = w.scale ** 2
    tau = 2.0 / T                       # |lam z1^2 - rho^2| < tau
    phi = np.arange(n_phi) * 2 * pi / n_phi
    a = np.cos(phi) ** 2 / mu + np.sin(phi) ** 2 / nu          # |y|^2 = z1^2 + a rho^2
    rho_max = np.sqrt((s2 + tau / lam) / (1 / lam + a))
    xg, wg = _gl(n_rho)
    r0 = np.minimum(np.sqrt(tau), rho_max)
    # split the rho range at sqrt(tau), where the z1 window reaches 0
    rA, wA = _panels(np.zeros_like(r0), r0, 2, xg, wg)
    rB, wB = _panels(r0, rho_max, rho_panels, xg, wg)
    rho = np.concatenate([rA, rB], axis=-1)              # (n_phi, n_r)
    wr = np.concatenate([wA, wB], axis=-1)
    zx, zw = _gl(n_z)
    lo = np.sqrt(np.maximum(rho ** 2 - tau, 0) / lam)
    mid = rho / np.sqrt(lam)
    hi = np.sqrt((rho ** 2 + tau) / lam)
    total = np.zeros_like(rho)
    for A, B in ((lo, mid), (mid, hi)):
        half = (B - A) / 2
        z = A[..., None] + half[..., None] * (zx + 1)
        r2 = (z ** 2 + (a[:, None] * rho ** 2)[..., None]) / s2
        with np.errstate(divide="ignore", over="ignore"):
            wt = np.where(r2 < 1, np.exp(-1 / np.where(r2 < 1, 1 - r2, 1.0)), 0.0)
        K = T * np.maximum(1 - T * np.abs(0.5 * (lam * z ** 2 - (rho ** 2)[..., None])), 0.0)
        total += np.sum(wt * K * zw, axis=-1) * half
    inner = 2 * total                      # z1 and -z1
    per_phi = np.sum(inner * rho * wr, axis=-1)
    return float(np.sum(per_phi) * 2 * pi / n_phi / sqrt(mu * nu))


def _neville(hs, vals):
    """Polynomial extrapolation of vals(h) to h = 0."""
    hs = list(hs)
    P = list(vals)
    n = len(P)
    for k in range(1, n):
        for i in range(n - k):
            P[i] = (hs[i] * P[i + 1] - hs[i + k] * P[i]) / (hs[i] - hs[i + k])
    return P[0]


DEFAULT_T = tuple(2.0 ** k for k in range(4, 13))


def sigma_infinity_3d(q: TernaryForm, w: Weight = Weight(), T_schedule=DEFAULT_T,
                      order: int = 3) -> DensityEstimate:
    """Kernel-route density, extrapolated in h = T^(-1/2)."""
    if w.kind != SMOOTH:
        raise ValueError("the kernel route needs a smooth weight")
    Ts = list(T_schedule)
    vals = [kernel_integral(q, T, w) for T in Ts]
    hs = [T ** -0.5 for T in Ts]
    k = min(order + 1, len(Ts))
    best = _neville(hs[-k:], vals[-k:])
    prev = _neville(hs[-k:-1], vals[-k:-1]) if k > 2 else vals[-1]
    return DensityEstimate(best, "Kernel3D", abs(best - prev))


# --- size diagnostics --------------------------------------------------------------

def eigen_diagnostics(q: TernaryForm, sigma_w0: float = None, c1: float = 1e-3,
                      c2: float = 1e3, sigma_w: float = None) -> dict:
    """Eigenvalue bookkeeping and the size window for the smooth-weight density."""
    lam, mu, nu, _ = eigen_split(q)
    lam, mu, nu = float(lam), float(mu), float(nu)
    if mu < nu:
        mu, nu = nu, mu
    delta = q.delta
    prod_err = abs(lam * mu * nu - 2 * delta) / (2 * delta)
    if sigma_w0 is None:
        sigma_w0 = sigma_infinity_3d(q).value
    qn = q.norm
    rho = qn ** 3 / delta
    base = sqrt(min(lam, mu, nu)) / sqrt(delta)
    if lam >= mu:
        shape = base * log(2 * mu / nu)
        case = "lam>=mu>=nu"
    elif lam >= nu:
        shape = base * log(2 * lam / nu)
        case = "mu>=lam>=nu"
    else:
        shape = base
        case = "mu>=nu>=lam"
    out = {
        "eigenvalues": [lam, -mu, -nu],
        "product_rel_error": prod_err,
        "sigma_w0": sigma_w0,
        "window_lower": c1 / qn,
        "window_upper": c2 * rho ** 0.25 / qn,
        "window_ok": c1 / qn <= sigma_w0 <= c2 * rho ** 0.25 / qn,
        "case": case,
        "case_ratio": sigma_w0 / shape,
        "case_ok": c1 <= sigma_w0 / shape <= c2,
    }
    if sigma_w is not None:
        out["weight_comparison_ok"] = abs(sigma_w) <= 2 * E_CONST ** (4 / 3) * sigma_w0
    return {k: (bool(v) if isinstance(v, (bool, np.bool_)) else v) for k, v in out.items()}
