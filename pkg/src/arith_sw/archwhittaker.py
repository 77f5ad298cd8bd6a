"""Archimedean special functions: Siegel gamma, Shimura's eta, real Whittaker
functions, Kummer U, the exponential integral and the Green function xi.

eta(y, T, alpha, beta) = int_{u > T, u > -T} e^{-tr(uy)} det(u+T)^{alpha-rho}
det(u-T)^{beta-rho} du over real symmetric u, rho = (n+1)/2, is evaluated by
double-exponential quadrature for n <= 2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import numpy as np
from scipy import linalg, special

from .quadrature import (
    QuadratureError,
    QuadratureResult,
    QuadratureSpec,
    endpoint_reach,
    exp_sinh,
    refine,
    tanh_sinh,
    unit_interval,
)

EULER_GAMMA = 0.57721566490153286061

DEFAULT_SPEC = {1: QuadratureSpec(rel_tol=1e-12, max_level=9),
                2: QuadratureSpec(rel_tol=1e-8, max_level=6)}


def rho(n: int) -> float:
    return (n + 1) / 2


@dataclass(frozen=True)
class ConfluentParams:
    n: int
    kappa: float
    s: complex

    @property
    def rho(self) -> float:
        return rho(self.n)

    @property
    def alpha(self) -> complex:
        return (self.s + self.rho + self.kappa) / 2

    @property
    def beta(self) -> complex:
        return (self.s + self.rho - self.kappa) / 2


@dataclass(frozen=True)
class RadialPoint:
    """g_tau = n(u) m(a) with a a^t = y = Im(tau)."""
    y: np.ndarray
    a: Optional[np.ndarray] = None
    u: Optional[np.ndarray] = None

    def __post_init__(self):
        y = np.atleast_2d(np.asarray(self.y, dtype=float))
        if not np.allclose(y, y.T) or np.any(np.linalg.eigvalsh(y) <= 0):
            raise ValueError("y must be symmetric positive definite")
        a = np.linalg.cholesky(y) if self.a is None else np.atleast_2d(np.asarray(self.a, dtype=float))
        if not np.allclose(a @ a.T, y, rtol=1e-12, atol=1e-12):
            raise ValueError("a a^t must equal y")
        u = np.zeros_like(y) if self.u is None else np.atleast_2d(np.asarray(self.u, dtype=float))
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "u", u)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def abs_det_a(self) -> float:
        return abs(float(np.linalg.det(self.a)))


# ---------------------------------------------------------------- Gamma functions

def siegel_gamma(n: int, s: complex) -> complex:
    """pi^(n(n-1)/4) prod_{k<n} Gamma(s - k/2)."""
    out = complex(math.pi ** (n * (n - 1) / 4))
    for k in range(n):
        z = s - k / 2
        if z.real <= 0 and abs(z.imag) == 0 and float(z.real).is_integer():
            raise ValueError(f"pole of the Siegel gamma function at s = {s}")
        out *= complex(special.gamma(complex(z)))
    return out


def _rgamma(z: complex) -> complex:
    return complex(special.rgamma(complex(z)))


# ---------------------------------------------------------------- eta

def _as_matrix(x, n=None) -> np.ndarray:
    m = np.atleast_2d(np.asarray(x, dtype=float))
    if n is not None and m.shape != (n, n):
        raise ValueError("dimension mismatch")
    return m


def eta(y, T, alpha: complex, beta: complex, spec: Optional[QuadratureSpec] = None) -> QuadratureResult:
    y = _as_matrix(y)
    T = _as_matrix(T, len(y))
    n = len(y)
    if n > 2:
        raise NotImplementedError("eta quadrature is implemented for n <= 2")
    if min(complex(alpha).real, complex(beta).real) <= rho(n) - 1:
        raise ValueError("eta diverges: need Re(alpha), Re(beta) > rho_n - 1")
    if abs(np.linalg.det(T)) == 0:
        raise ValueError("T must be nonsingular")
    spec = spec or DEFAULT_SPEC[n]
    res = _eta1(y[0, 0], T[0, 0], alpha, beta, spec) if n == 1 else _eta2(y, T, alpha, beta, spec)
    if not res.converged:
        raise QuadratureError(f"eta quadrature missed tolerance: err {res.err_estimate:.3g}")
    return res


def _eta1(y: float, t: float, alpha, beta, spec):
    near, far = (beta - 1, alpha - 1) if t > 0 else (alpha - 1, beta - 1)
    at = abs(t)
    pre = math.exp(-y * at) / y
    reach = endpoint_reach(complex(near).real)

    def evaluate(h):
        X, w = exp_sinh(h, reach=reach)
        s = X / y
        f = np.exp(-X + near * np.log(s) + far * np.log(s + 2 * at))
        return complex(pre * np.sum(w * f)), len(X)

    return refine(evaluate, spec)


def _eta2(y, T, alpha, beta, spec):
    evals, O = np.linalg.eigh(T)
    if np.linalg.det(O) < 0:
        O[:, 0] = -O[:, 0]
    yp = O.T @ y @ O
    t1, t2 = evals
    s1, s2 = np.sign(t1), np.sign(t2)
    a1, a2 = abs(t1), abs(t2)
    ga, gb = alpha - 1.5, beta - 1.5
    lam1, lam2 = yp[0, 0] * a1, yp[1, 1] * a2
    pre = math.exp(-(lam1 + lam2)) * a1 * a2
    # det(x -+ ...) vanishes linearly at the xi endpoints
    reach = endpoint_reach(min(complex(ga).real, complex(gb).real))

    def region(X, wX, lam, w, omw, ww, xi, xip, xim, wxi, first):
        total = 0j
        for i0 in range(0, len(X), 8):
            outer = (X[i0:i0 + 8] / lam)[:, None, None]
            wo = (wX[i0:i0 + 8] / lam)[:, None, None]
            inner = outer * w[None, :, None]
            x, z = (outer, inner) if first else (inner, outer)
            am = a1 * (x if s1 > 0 else x + 2)
            ap = a1 * (x + 2 if s1 > 0 else x)
            bm = a2 * (z if s2 > 0 else z + 2)
            bp = a2 * (z + 2 if s2 > 0 else z)
            d1, d2 = am * bm, ap * bp
            diff = 2 * a1 * a2 * (s1 * (1 + z) + s2 * (1 + x))
            r2 = np.where(diff >= 0, d1, d2)
            r = np.sqrt(r2)
            bind = np.maximum(r2 * (xim * xip)[None, None, :], 1e-300)
            other = np.abs(diff) + bind
            det_minus = np.where(diff >= 0, bind, other)
            det_plus = np.where(diff >= 0, other, bind)
            c = r * xi[None, None, :]
            expo = -(lam1 * x + lam2 * z + 2 * yp[0, 1] * c)
            with np.errstate(divide="ignore"):  # r underflows to 0 at the far left nodes
                logf = expo + ga * np.log(det_plus) + gb * np.log(det_minus) + np.log(r)
            f = np.exp(logf)
            wt = wo * outer * ww[None, :, None] * wxi[None, None, :]
            total += complex(np.sum(wt * f))
        return total

    def evaluate(h):
        X, wX = exp_sinh(h, reach=reach)
        w, omw, ww = unit_interval(h, reach=reach)
        xi, xip, xim, wxi = tanh_sinh(h, reach=reach)
        val = region(X, wX, lam1, w, omw, ww, xi, xip, xim, wxi, True)
        val += region(X, wX, lam2, w, omw, ww, xi, xip, xim, wxi, False)
        return pre * val, 2 * len(X) * len(w) * len(xi)

    return refine(evaluate, spec)


def eta_n1_closed(y: float, T: float, alpha, beta) -> complex:
    """eta^(1) through Kummer U, evaluated by mpmath.

    scipy's hyperu loses accuracy when b sits a rounding error away from an
    integer, so it is not used here.
    """
    z = 2 * abs(T) * y
    if T < 0:
        g, u = special.gamma(alpha), float(mpmath.hyperu(alpha, alpha + beta, z))
    else:
        g, u = special.gamma(beta), float(mpmath.hyperu(beta, alpha + beta, z))
    return complex(math.exp(-abs(T) * y) * abs(2 * T) ** (alpha + beta - 1) * g * u)


# ---------------------------------------------------------------- Whittaker functions

def whittaker_constant(n: int, alpha, beta) -> complex:
    """c_n(alpha, beta) with W_T(m(a), s) = c_n |a|^(s+rho) eta(2y, pi T, alpha, beta)."""
    r = rho(n)
    phase = cmath.exp(1j * math.pi / 2 * n * (beta - alpha))
    return (2 ** (n * (n - 1) / 4) * phase * 2 ** (-n * (r - 1)) * (2 * math.pi) ** (n * r)
            / (siegel_gamma(n, alpha) * siegel_gamma(n, beta)))


def _is_posdef(T: np.ndarray) -> bool:
    return bool(np.all(np.linalg.eigvalsh(T) > 0))


def whittaker_closed_posdef(T, point: RadialPoint, kappa: float) -> complex:
    """W_T(g_tau, 0) for positive definite T and kappa = rho_n."""
    T = _as_matrix(T, point.n)
    n = point.n
    val = ((-2j * math.pi) ** (n * kappa) * 2 ** (-n * (n - 1) / 4) / siegel_gamma(n, kappa)
           * np.linalg.det(point.y) ** (kappa / 2) * math.exp(-2 * math.pi * np.trace(T @ point.y)))
    return complex(val) * cmath.exp(2j * math.pi * np.trace(T @ point.u))


def whittaker_posdef_quadrature(T, point: RadialPoint, betas: Sequence[float] = (1.0, 1.5, 2.0, 2.5),
                                spec: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """W_T(g_tau, 0) at kappa = rho_n by the eta route, T positive definite.

    At s = 0 one has beta = 0, outside the convergence range of eta.  The
    function beta -> det(2y)^beta eta(2y, pi T, rho_n, beta) / Gamma_n(beta) is
    entire, so it is sampled by quadrature at convergent beta and extrapolated
    to beta = 0 with a Lagrange polynomial.
    """
    T = _as_matrix(T, point.n)
    n = point.n
    r = rho(n)
    if not _is_posdef(T):
        raise ValueError("T must be positive definite")
    g = 2 * point.y
    vals, errs, used = [], [], 0
    for b in betas:
        q = eta(g, math.pi * T, r, b, spec)
        f = np.linalg.det(g) ** b / siegel_gamma(n, b)
        vals.append(q.value * f)
        errs.append(q.err_estimate * abs(f))
        used += q.nodes_used
    lim = 0j
    for i, bi in enumerate(betas):
        li = 1.0
        for j, bj in enumerate(betas):
            if j != i:
                li *= (0 - bj) / (bi - bj)
        lim += li * vals[i]
    spread = max(abs(v - vals[0]) for v in vals)
    const = ((-2j * math.pi) ** (n * r) * 2 ** (-n * (n - 1) / 4) / siegel_gamma(n, r)
             * point.abs_det_a ** r)
    phase = cmath.exp(2j * math.pi * np.trace(T @ point.u))
    val = const * lim * phase
    err = abs(const) * (max(errs) + spread)
    return QuadratureResult(complex(val), float(err), used, True)


@dataclass(frozen=True)
class WhittakerValue:
    value: complex
    err_estimate: float
    nodes_used: int
    method: str

    def to_json(self) -> dict:
        return {"value": {"re": repr(self.value.real), "im": repr(self.value.imag)},
                "err_estimate": repr(float(self.err_estimate)), "nodes_used": self.nodes_used,
                "method": self.method}


def whittaker_real(T, point: RadialPoint, s: complex, kappa: float,
                   spec: Optional[QuadratureSpec] = None) -> WhittakerValue:
    T = _as_matrix(T, point.n)
    n = point.n
    if abs(np.linalg.det(T)) == 0:
        raise ValueError("T must be nonsingular")
    par = ConfluentParams(n, kappa, s)
    phase = cmath.exp(2j * math.pi * np.trace(T @ point.u))
    if s == 0 and kappa == par.rho and _is_posdef(T):
        return WhittakerValue(whittaker_closed_posdef(T, point, kappa), 0.0, 0, "closed-form")
    q = eta(2 * point.y, math.pi * T, par.alpha, par.beta, spec)
    val = whittaker_constant(n, par.alpha, par.beta) * point.abs_det_a ** (s + par.rho) * q.value
    scale = abs(val / q.value) if q.value else 0.0
    return WhittakerValue(complex(val * phase), q.err_estimate * scale, q.nodes_used, "quadrature")


def whittaker_vanishing_bound(sig: Sequence[int]) -> int:
    """floor((j+1)/2) for sig(T) = (n - j, j)."""
    j = sig[1]
    return (j + 1) // 2


# ---------------------------------------------------------------- Kummer U, Ei

def kummer_U(a: float, b: float, z: float, spec: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """U(a, b, z) from Gamma(a) U = int_0^inf e^{-zu} u^(a-1) (1+u)^(b-a-1) du."""
    if a <= 0 or z <= 0:
        raise ValueError("need a > 0 and z > 0")
    spec = spec or QuadratureSpec(rel_tol=1e-13, max_level=9)

    reach = endpoint_reach(a - 1)

    def evaluate(h):
        X, w = exp_sinh(h, reach=reach)
        u = X / z
        f = np.exp(-X + (a - 1) * np.log(u) + (b - a - 1) * np.log1p(u))
        return float(np.sum(w * f) / z), len(X)

    res = refine(evaluate, spec)
    g = special.gamma(a)
    return QuadratureResult(res.value / g, res.err_estimate / g, res.nodes_used, res.converged)


def exp_integral(z: float) -> float:
    """Ei(z) for z < 0, i.e. -E_1(-z)."""
    if z >= 0:
        raise ValueError("exp_integral is provided for negative arguments")
    return -_e1(-z)


def _e1(x: float) -> float:
    if x <= 1.0:
        # E1(x) = -gamma - log x - sum_{k>=1} (-x)^k / (k k!)
        total, term, k = 0.0, 1.0, 0
        while True:
            k += 1
            term *= -x / k
            add = term / k
            total += add
            if abs(add) < 1e-17 * max(1.0, abs(total)):
                break
        return -EULER_GAMMA - math.log(x) - total
    # continued fraction e^-x / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))), modified Lentz
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x)


# ---------------------------------------------------------------- n = 1 derivative

def whittaker_derivative_n1(T: float) -> complex:
    """W'_T(1, 0, Phi_1) = -i pi e^{-2 pi |T|} U(1, 1, 4 pi |T|) for T < 0."""
    T = float(T)
    if T >= 0:
        raise ValueError("derivative is provided for T < 0 (the vanishing case)")
    u = kummer_U(1.0, 1.0, 4 * math.pi * abs(T)).value
    return -1j * math.pi * math.exp(-2 * math.pi * abs(T)) * u


def whittaker_derivative_n1_numeric(T: float, s_lo: float = 0.5, s_hi: float = 2.0,
                                    degree: int = 12) -> complex:
    """d/ds W_T(1, s) at 0 by Chebyshev interpolation on [s_lo, s_hi] and extrapolation."""
    point = RadialPoint(np.eye(1))
    k = np.arange(degree + 1)
    nodes = (s_lo + s_hi) / 2 + (s_hi - s_lo) / 2 * np.cos(np.pi * (k + 0.5) / (degree + 1))
    vals = np.array([whittaker_real([[T]], point, float(s), 1.0).value for s in nodes])
    xs = (nodes - (s_lo + s_hi) / 2) / ((s_hi - s_lo) / 2)
    re = np.polynomial.chebyshev.Chebyshev.fit(xs, vals.real, degree, domain=[-1, 1])
    im = np.polynomial.chebyshev.Chebyshev.fit(xs, vals.imag, degree, domain=[-1, 1])
    x0 = -(s_lo + s_hi) / (s_hi - s_lo)
    scale = 2 / (s_hi - s_lo)
    return complex(re.deriv()(x0) * scale, im.deriv()(x0) * scale)


# ---------------------------------------------------------------- asymptotics

@dataclass(frozen=True)
class AsymptoticReport:
    schedule: tuple
    lhs: tuple
    rhs: complex
    residuals: tuple

    def to_json(self) -> dict:
        cj = lambda z: {"re": repr(complex(z).real), "im": repr(complex(z).imag)}
        return {"schedule": list(self.schedule), "lhs": [cj(v) for v in self.lhs],
                "rhs": cj(self.rhs), "residuals": [repr(float(r)) for r in self.residuals]}


def eta_asymptotic_limit(T, alpha, beta, y_rest=None, y12=None) -> complex:
    """lim_{y1 -> inf} e^{T1 y1} y1^beta eta(y, T, alpha, beta)."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    n = len(T)
    t1 = T[0, 0]
    if t1 == 0:
        raise ValueError("T1 = 0 is degenerate")
    if t1 < 0:
        return 0j
    r = rho(n)
    if n == 1:
        return complex(special.gamma(beta) * (2 * t1) ** (alpha - r))
    t12 = T[0, 1:]
    t2 = T[1:, 1:]
    tt2 = t2 - np.outer(t12, t12) / t1
    y2 = np.atleast_2d(np.asarray(y_rest, dtype=float))
    y12 = np.zeros(n - 1) if y12 is None else np.asarray(y12, dtype=float)
    pref = math.exp(-2 * float(t12 @ y12) + np.trace((tt2 - t2) @ y2))
    inner = eta(y2, tt2, alpha - 0.5, beta).value
    return complex(pref * special.gamma(beta + 1 - r) * math.pi ** ((n - 1) / 2)
                   * (2 * t1) ** (alpha - r) * inner)


def eta_asymptotic_check(T, alpha, beta, schedule: Sequence[float], y_rest=None,
                         y12=None) -> AsymptoticReport:
    T = np.atleast_2d(np.asarray(T, dtype=float))
    n = len(T)
    if n > 2:
        raise NotImplementedError("n <= 2 only")
    if complex(beta).real <= rho(n) - 0.5:
        raise ValueError("need Re(beta) > rho_n - 1/2")
    rhs = eta_asymptotic_limit(T, alpha, beta, y_rest if n > 1 else None, y12)
    lhs, res = [], []
    for y1 in schedule:
        if n == 1:
            y = [[y1]]
        else:
            y2 = np.atleast_2d(np.asarray(y_rest, dtype=float))
            y12v = np.zeros(n - 1) if y12 is None else np.asarray(y12, dtype=float)
            y = np.block([[np.array([[y1]]), y12v[None, :]], [y12v[:, None], y2]])
        val = math.exp(T[0, 0] * y1) * y1 ** beta * eta(y, T, alpha, beta).value
        lhs.append(complex(val))
        res.append(float(abs(val - rhs) / abs(rhs) if rhs != 0 else abs(val)))
    return AsymptoticReport(tuple(schedule), tuple(lhs), rhs, tuple(res))


# ---------------------------------------------------------------- Green function

@dataclass(frozen=True)
class GreenEvaluation:
    x: tuple
    z: tuple
    R: float
    xi: float
    xi0: float
    majorant: float

    def to_json(self) -> dict:
        return {"x": [repr(v) for v in self.x], "z": [repr(v) for v in self.z],
                "R": repr(self.R), "xi": repr(self.xi), "xi0": repr(self.xi0),
                "majorant": repr(self.majorant)}


class OnDivisor(ValueError):
    pass


def tube_vector(z, gram0) -> np.ndarray:
    """w(z) = z + e - Q(z) f in coordinates (e, f, V0-basis); Q on V0 from gram0."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    g0 = np.atleast_2d(np.asarray(gram0, dtype=float))
    qz = 0.5 * z @ g0 @ z
    return np.concatenate([[1.0 + 0j, -qz], z])


def full_gram(gram0) -> np.ndarray:
    """Gram of V = Re + Rf + V0 with (e, f) = 1, e, f isotropic and orthogonal to V0."""
    g0 = np.atleast_2d(np.asarray(gram0, dtype=float))
    m = len(g0)
    g = np.zeros((m + 2, m + 2))
    g[0, 1] = g[1, 0] = 1.0
    g[2:, 2:] = g0
    return g


def negative_plane(z, gram0) -> np.ndarray:
    """Basis (columns) of the oriented negative 2-plane attached to z."""
    w = tube_vector(z, gram0)
    return np.stack([w.real, w.imag], axis=1)


def majorant_R(x, plane: np.ndarray, gram: np.ndarray) -> float:
    """R(x, z) = -(x_z, x_z) with x_z the projection onto the negative plane."""
    x = np.asarray(x, dtype=float)
    g = plane.T @ gram @ plane
    b = plane.T @ gram @ x
    return float(-(b @ np.linalg.solve(g, b)))


def green_xi(x, z=None, gram0=None, m: int = 1, gram=None) -> GreenEvaluation:
    """xi(x, z) = -Ei(-2 pi R(x, z)) e^{-pi (x, x)} on a space of signature (m, 2), m in {0, 1}.

    m = 0: `gram` is the negative definite Gram of V, z an orientation (ignored).
    m = 1: coordinates (e, f, v0) with Gram full_gram(gram0), z in the upper half plane.
    """
    x = np.asarray(x, dtype=float)
    if m == 0:
        g = np.atleast_2d(np.asarray(gram, dtype=float))
        if np.any(np.linalg.eigvalsh(g) >= 0):
            raise ValueError("m = 0 needs a negative definite plane")
        xx = float(x @ g @ x)
        R = -xx
        zc = ()
    elif m == 1:
        g = full_gram(gram0)
        if np.atleast_2d(gram0).shape != (1, 1) or np.atleast_2d(gram0)[0, 0] >= 0:
            raise ValueError("m = 1 needs a one-dimensional negative V0")
        zz = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(zz.imag == 0):
            raise ValueError("z must lie off the real boundary")
        xx = float(x @ g @ x)
        R = majorant_R(x, negative_plane(zz, gram0), g)
        zc = tuple(complex(v) for v in zz)
    else:
        raise NotImplementedError("only m in {0, 1}")
    if R <= 1e-12 * max(1.0, float(x @ x)):  # rounding level of the projection
        raise OnDivisor("z lies on the special divisor of x (R = 0)")
    xi0 = -exp_integral(-2 * math.pi * R)
    xi = xi0 * math.exp(-math.pi * xx)
    return GreenEvaluation(tuple(map(float, x)), zc, R, xi, xi0, xx + 2 * R)


def act_on_tube(h: np.ndarray, z, gram0) -> np.ndarray:
    """h z for h in SO(V)(R): h w(z) = j(h, z) w(hz)."""
    w = h @ tube_vector(z, gram0)
    g = full_gram(gram0)
    f = np.zeros(len(w))
    f[1] = 1.0
    j = w @ g @ f  # e-coefficient of h w
    return (w / j)[2:]


def height_arch_n1(T: float) -> float:
    """Ht_infinity = xi_0(x) = -Ei(4 pi T) for T < 0 (m = 0, n = 1)."""
    if T >= 0:
        raise ValueError("need T < 0")
    return -exp_integral(4 * math.pi * T)
