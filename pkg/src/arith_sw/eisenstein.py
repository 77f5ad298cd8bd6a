"""Global assembly for nonsingular Fourier coefficients of the incoherent
Siegel Eisenstein series attached to a lattice L of signature (m, 2).

E'_T(tau, 0) factors over places: the one place in Diff(C, T) contributes a
derivative, every other place its value at s = 0.  Good odd primes are
collected into an Euler product evaluated through zeta and quadratic
Dirichlet L-values.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import sympy
from scipy import special

from . import archwhittaker as aw
from . import localdensity as ld
from .quadform import (
    INF,
    Matrix,
    Root8,
    UnsupportedRegime,
    as_matrix,
    chi_lattice,
    det,
    diagonalize,
    diag_matrix,
    diff_set,
    frac,
    gamma_real,
    gamma_space_p,
    prime_support,
    rat_str,
    signature,
    valuation,
)

__all__ = [
    "ArchConstant", "CConstant", "IncoherentDatum", "PlaceFactor", "CoefficientReport",
    "EulerTail", "b_infinity", "so_volume", "b_quotient_holds", "c_constant",
    "order_lower_bound", "euler_tail", "truncated_good_product", "tail_estimate", "coefficient_derivative",
    "degree_prediction",
]


def _cjson(z) -> dict:
    z = complex(z)
    return {"re": repr(z.real), "im": repr(z.imag)}


# ---------------------------------------------------------------- constants

@dataclass(frozen=True)
class ArchConstant:
    n: int
    expression: object  # sympy expression
    value: complex

    def to_json(self) -> dict:
        return {"n": self.n, "expression": str(self.expression), "value": _cjson(self.value)}


def _b_expr(n: int):
    if n < 1:
        raise ValueError("n must be at least 1")
    k = sympy.Rational(n * n + n - 4, 8)
    root = sympy.exp(2 * sympy.pi * sympy.I * k)
    num = sympy.factorial(n - 1) * sympy.prod([sympy.gamma(sympy.Rational(n - j, 2)) for j in range(1, n)])
    den = 2 ** sympy.Integer(n - 2) * (2 * sympy.pi) ** sympy.Rational(n * (n + 3), 4)
    return sympy.nsimplify(sympy.simplify(root * num / den))


def b_infinity(n: int) -> ArchConstant:
    e = _b_expr(n)
    return ArchConstant(n, e, complex(sympy.N(e, 30)))


def b_quotient_holds(n: int) -> bool:
    """B_n / B_{n-1} = i^n Gamma(rho_n) / (2 pi)^rho_n, checked symbolically."""
    if n < 2:
        raise ValueError("n must be at least 2")
    r = sympy.Rational(n + 1, 2)
    lhs = _b_expr(n) / _b_expr(n - 1)
    rhs = sympy.I ** n * sympy.gamma(r) / (2 * sympy.pi) ** r
    return sympy.simplify(sympy.expand_complex(lhs - rhs)) == 0


def so_volume(l: int):
    if l < 1:
        raise ValueError("l must be at least 1")
    e = 2 ** sympy.Integer(l - 1) * sympy.pi ** sympy.Rational(l * (l + 1), 4)
    e /= sympy.prod([sympy.gamma(sympy.Rational(l - k, 2)) for k in range(l)])
    return sympy.simplify(e)


@dataclass(frozen=True)
class CConstant:
    """gamma(V^n)^(-1) * 2^two_power * base^base_power."""
    place: object
    root: Root8
    two_power: Fraction
    base: Fraction  # |det 2J| at the place
    base_power: Fraction

    def value(self) -> complex:
        return complex(self.root) * 2.0 ** float(self.two_power) * float(self.base) ** float(self.base_power)

    def to_json(self) -> dict:
        return {"place": str(self.place), "root_of_unity": self.root.label(),
                "two_power": rat_str(self.two_power), "abs_det_2J": rat_str(self.base),
                "abs_det_2J_power": rat_str(self.base_power), "value": _cjson(self.value())}


def c_constant(place, J, n: int) -> CConstant:
    """C(J) for the space (V, Q(x) = x^t J x); J is the half-Gram matrix."""
    J = as_matrix(J)
    d2 = det(tuple(tuple(2 * v for v in row) for row in J))
    if d2 == 0:
        raise ValueError("degenerate J")
    diag = diagonalize(J)
    e2 = Fraction(n) + Fraction(n * (n - 1), 4)
    if place == INF:
        root = gamma_real(signature(diag), n).inverse()
        return CConstant(INF, root, e2, abs(d2), Fraction(-n, 2))
    p = int(place)
    if p == 2:
        raise UnsupportedRegime("place 2 is not supported")
    root = (gamma_space_p(p, diag) ** n).inverse()
    return CConstant(p, root, Fraction(0), Fraction(1, p ** valuation(d2, p)), Fraction(-n, 2))


# ---------------------------------------------------------------- data

@dataclass(frozen=True)
class IncoherentDatum:
    """Integral Gram matrix of L; V = L tensor Q must have signature (m, 2)."""
    gram: Matrix
    m: int = field(init=False)

    def __post_init__(self):
        g = as_matrix(self.gram)
        if any(v.denominator != 1 for row in g for v in row):
            raise ValueError("lattice Gram matrix must be integral")
        if det(g) == 0:
            raise ValueError("degenerate lattice")
        sig = signature(diagonalize(g))
        if sig[1] != 2:
            raise ValueError(f"V must have signature (m, 2), got {sig}")
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "m", sig[0])

    @property
    def n(self) -> int:
        return self.m + 1

    @property
    def kappa(self) -> Fraction:
        return Fraction(self.m + 2, 2)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def bad_primes(self) -> list:
        return sorted(q for q in prime_support([det(self.gram)]) if q != 2)

    def certificate(self) -> dict:
        """Odd primes where L is not unimodular; everything else is unimodular."""
        return {"det": rat_str(det(self.gram)), "non_unimodular_odd_primes": self.bad_primes()}

    def to_json(self) -> dict:
        return {"gram": [[rat_str(v) for v in row] for row in self.gram], "m": self.m,
                "n": self.n, "kappa": rat_str(self.kappa), "certificate": self.certificate()}


def _check_T(datum: IncoherentDatum, T) -> Matrix:
    t = as_matrix(T)
    if len(t) != datum.n:
        raise ValueError(f"T must have rank n = {datum.n}")
    if det(t) == 0:
        raise ValueError("singular T")
    return t


def order_lower_bound(datum: IncoherentDatum, T) -> int:
    return len(diff_set(datum.gram, _check_T(datum, T)))


# ---------------------------------------------------------------- Euler tail

def _character_disc(gram: Matrix) -> int:
    l = len(gram)
    d = (-1) ** (l * (l - 1) // 2) * det(gram)
    return int(d)


def _chi(d: int, q: int) -> int:
    """Jacobi symbol (d/q) for odd q > 0."""
    if math.gcd(d, q) != 1:
        return 0
    return int(sympy.jacobi_symbol(d % q, q))


def _good_factor(l: int, d: int, q: int) -> float:
    out = 1.0
    if l % 2 == 0:
        out *= 1 - _chi(d, q) * q ** (-l / 2)
    for e in range(1, (l - 1) // 2 + 1):
        out *= 1 - q ** (-2.0 * e)
    return out


def _l_odd(s: int, d: int) -> float:
    """sum over odd k of (d/k) k^-s (Jacobi symbol), via Hurwitz zeta or digamma."""
    f = 4 * abs(d)
    residues = [(a, _chi(d, a)) for a in range(1, f, 2)]
    if s == 1:
        if sympy.sqrt(d).is_integer or all(c in (0, 1) for _, c in residues):
            raise ValueError("trivial character: L(1) diverges")
        return -sum(c * special.digamma(a / f) for a, c in residues) / f
    return sum(c * special.zeta(s, a / f) for a, c in residues) * f ** (-float(s))


@dataclass(frozen=True)
class EulerTail:
    """Product of the unramified local factors at X = 1 over odd primes outside `excluded`."""
    rank: int
    disc: int
    excluded: tuple
    expression: str
    value: float

    def to_json(self) -> dict:
        return {"rank": self.rank, "character_discriminant": self.disc,
                "excluded_primes": list(self.excluded), "expression": self.expression,
                "value": repr(self.value)}


def euler_tail(gram: Matrix, excluded: Sequence[int]) -> EulerTail:
    l = len(gram)
    d = _character_disc(gram)
    val = 1.0
    parts = []
    if l % 2 == 0:
        val /= _l_odd(l // 2, d)
        parts.append(f"1/L_odd({l // 2}, chi_{d})")
    for e in range(1, (l - 1) // 2 + 1):
        z = (1 - sympy.Rational(1, 2 ** (2 * e))) * sympy.zeta(2 * e)
        val /= float(z)
        parts.append(f"1/({z})")
    ex = tuple(sorted(q for q in set(excluded) if q != 2))
    for q in ex:
        val /= _good_factor(l, d, q)
    expr = " * ".join(parts) or "1"
    if ex:
        expr += " / (local factors at " + ",".join(map(str, ex)) + ")"
    return EulerTail(l, d, ex, expr, float(val))


def truncated_good_product(gram: Matrix, excluded: Sequence[int], bound: int) -> float:
    l = len(gram)
    d = _character_disc(gram)
    ex = set(excluded)
    out = 1.0
    for q in sympy.primerange(3, bound + 1):
        if q not in ex:
            out *= _good_factor(l, d, int(q))
    return out


def tail_estimate(l: int, bound: int) -> float:
    """Crude bound for |log| of the product over primes above `bound` (l >= 3)."""
    s = min(l / 2 if l % 2 == 0 else 2.0, 2.0)
    if s <= 1:
        return float("inf")
    return 2.0 * bound ** (1 - s) / (s - 1)


# ---------------------------------------------------------------- coefficient report

@dataclass(frozen=True)
class PlaceFactor:
    place: object
    kind: str  # "value" or "derivative"
    provenance: str  # closed-form | counting | quadrature | symbolic-unit | euler-product | unavailable
    value: Optional[complex]
    exact: dict = field(default_factory=dict)
    root: Optional[Root8] = None  # tracked unit prefactor

    def to_json(self) -> dict:
        return {"place": str(self.place), "kind": self.kind, "provenance": self.provenance,
                "value": None if self.value is None else _cjson(self.value), "exact": self.exact}


@dataclass(frozen=True)
class CoefficientReport:
    T: Matrix
    diff: tuple
    order_lower_bound: int
    factors: tuple
    assembled: Optional[complex]
    unit_phase: Optional[Root8]
    q_T: complex
    missing: tuple

    def factor(self, place) -> PlaceFactor:
        for f in self.factors:
            if f.place == place:
                return f
        raise KeyError(place)

    def to_json(self) -> dict:
        a = self.assembled
        return {"T": [[rat_str(v) for v in row] for row in self.T],
                "diff": [str(v) for v in self.diff], "order_lower_bound": self.order_lower_bound,
                "factors": [f.to_json() for f in self.factors],
                "assembled_derivative": None if a is None else {
                    "value": _cjson(a), "magnitude": repr(abs(a)),
                    "unit_phase": None if self.unit_phase is None else self.unit_phase.label()},
                "q_T": _cjson(self.q_T),
                "normalized_by_q_T": None if a is None else _cjson(a / self.q_T),
                "omitted_places": [str(v) for v in self.missing]}


def _sort_places(places) -> tuple:
    fin = sorted(v for v in places if v != INF)
    return tuple(fin + ([INF] if INF in places else []))


def _finite_value_factor(q: int, gram, t) -> PlaceFactor:
    w = ld.whittaker_finite(q, gram, t)
    prov = "closed-form" if w.density.provenance == "closed-form" else "counting"
    return PlaceFactor(q, "value", prov, w.prefactor() * float(w.value), w.to_json(), w.root)


def _diag_y(tau_im, n: int) -> np.ndarray:
    y = np.atleast_1d(np.asarray(tau_im, dtype=float))
    if y.ndim == 1:
        y = np.diag(y if len(y) == n else np.full(n, y[0]))
    return y


def coefficient_derivative(datum: IncoherentDatum, T, tau_im=1.0) -> CoefficientReport:
    """E'_T(tau, 0) as a product of local factors, tau = i * diag(tau_im)."""
    t = _check_T(datum, T)
    n = datum.n
    diff = _sort_places(diff_set(datum.gram, t))
    y = _diag_y(tau_im, n)
    tf = np.array([[float(v) for v in row] for row in t])
    q_T = complex(math.exp(-2 * math.pi * float(np.trace(tf @ y))))
    order = len(diff)
    if 2 in diff:
        raise UnsupportedRegime("place 2 in Diff is not supported")
    if order > 1:
        return CoefficientReport(t, diff, order, (), 0j, None, q_T, ())

    place = diff[0]
    det2t = det(tuple(tuple(2 * v for v in row) for row in t))
    special_primes = sorted(q for q in prime_support([det2t, det(datum.gram)]) if q != 2)
    factors = []
    for q in special_primes:
        if q == place:
            factors.append(_finite_derivative_factor(q, datum.gram, t))
        else:
            factors.append(_finite_value_factor(q, datum.gram, t))
    tail = euler_tail(datum.gram, special_primes)
    factors.append(PlaceFactor("good", "value", "euler-product", complex(tail.value), tail.to_json()))
    factors.append(PlaceFactor(2, "value", "unavailable", None,
                               {"reason": "p = 2 densities are not computed"}))
    point = aw.RadialPoint(y)
    kappa = float(datum.kappa)
    if place == INF:
        if n != 1:
            factors.append(PlaceFactor(INF, "derivative", "unavailable", None,
                                       {"reason": "archimedean derivative only for n = 1"}))
        else:
            v = float(y[0, 0])
            d = math.sqrt(v) ** kappa * aw.whittaker_derivative_n1(v * float(t[0][0]))
            factors.append(PlaceFactor(INF, "derivative", "quadrature", d,
                                       {"formula": "-i pi e^{-2 pi |T|} U(1, 1, 4 pi |T|)",
                                        "y": repr(v)}))
    else:
        w = aw.whittaker_closed_posdef(tf, point, kappa)
        factors.append(PlaceFactor(INF, "value", "closed-form", w,
                                   {"formula": "(-2 pi i)^(n kappa) 2^(-n(n-1)/4) / Gamma_n(kappa)"
                                               " det(y)^(kappa/2) e^(-2 pi tr Ty)",
                                    "n_kappa": rat_str(n * datum.kappa)}))

    missing = tuple(f.place for f in factors if f.value is None)
    assembled = None
    phase = None
    if all(f.value is not None or f.place == 2 for f in factors):
        assembled = complex(np.prod([f.value for f in factors if f.value is not None]))
        phase = Root8(0)
        for f in factors:
            if f.root is not None:
                phase = phase * f.root
        if place != INF:
            phase = phase * Root8(-2 * int(n * datum.kappa))  # (-i)^(n kappa)
        else:
            phase = phase * Root8(-2)  # W' at infinity is -i times a positive number
    return CoefficientReport(t, diff, order, tuple(factors), assembled, phase, q_T, missing)


def _finite_derivative_factor(p: int, gram, t) -> PlaceFactor:
    n = len(t)
    try:
        hr = ld.height_ratio(p, gram, t)
    except ValueError:
        hr = None
    if hr is not None:
        wu = ld.whittaker_finite(p, gram, ld.unimodular_target(n))
        val = float(hr.coefficient) * math.log(p) * wu.prefactor() * float(wu.value)
        return PlaceFactor(p, "derivative", "counting", val,
                           {"height_ratio": hr.to_json(), "W_Tu": wu.to_json(),
                            "formula": f"{rat_str(hr.coefficient)} * log {p} * W_(T^u,{p})(1,0)"},
                           wu.root)
    w = ld.whittaker_finite(p, gram, t)
    if w.value != 0:
        raise ArithmeticError(f"W_(T,{p})(1,0) does not vanish at the Diff place")
    val = float(w.derivative) * math.log(p) * w.prefactor()
    return PlaceFactor(p, "derivative", "counting", val, w.to_json(), w.root)


# ---------------------------------------------------------------- degree prediction

@dataclass(frozen=True)
class DegreePrediction:
    p: int
    height_coefficient: Fraction
    finite_factors: tuple
    finite_product: complex
    counting_constant: Fraction
    predicted_count: complex
    missing: tuple

    def to_json(self) -> dict:
        return {"p": self.p, "Ht_p_log_p": f"{rat_str(self.height_coefficient)} * log {self.p}",
                "finite_factors": [f.to_json() for f in self.finite_factors],
                "finite_product": _cjson(self.finite_product),
                "counting_constant": rat_str(self.counting_constant),
                "predicted_count": _cjson(self.predicted_count),
                "omitted_places": [str(v) for v in self.missing]}


def degree_prediction(datum: IncoherentDatum, T, counting_constant) -> DegreePrediction:
    t = _check_T(datum, T)
    diff = _sort_places(diff_set(datum.gram, t))
    if diff == (INF,):
        raise ValueError("finite-place prediction only")
    if len(diff) != 1 or diff[0] == 2:
        raise ValueError(f"need Diff = {{p}} with p odd, got {set(diff)}")
    p = diff[0]
    if ld.soylu_classify(p, datum.gram, t) != "zero_dimensional":
        raise ValueError("Soylu condition fails")
    hr = ld.height_ratio(p, datum.gram, t)
    n = datum.n
    vert = ld.vertex_lattice_gram(2, p, det(datum.gram), n)
    factors = []
    w = ld.whittaker_finite(p, vert.gram, t)
    factors.append(PlaceFactor(p, "value", "counting", w.prefactor() * float(w.value),
                               {"lattice": vert.to_json(), **w.to_json()}))
    det2t = det(tuple(tuple(2 * v for v in row) for row in t))
    special_primes = sorted(q for q in prime_support([det2t, det(datum.gram)]) if q != 2)
    for q in special_primes:
        if q != p:
            factors.append(_finite_value_factor(q, datum.gram, t))
    tail = euler_tail(datum.gram, special_primes)
    factors.append(PlaceFactor("good", "value", "euler-product", complex(tail.value), tail.to_json()))
    prod = complex(np.prod([f.value for f in factors]))
    c = frac(counting_constant)
    return DegreePrediction(p, hr.coefficient, tuple(factors), prod, c, float(c) * prod, (2,))
