"""Local representation densities at odd primes and the finite-place
Whittaker data built from them.

alpha_p(X, T, L) is the polynomial in X = p^(-s) whose value at X = p^(-r) is
the stabilized normalized count of x in (L + H^r)^n with Q(x) = T mod p^k.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import _counting
from ._counting import InfeasibleCount
from .quadform import (
    LatticeGram,
    Matrix,
    Root8,
    UnsupportedRegime,
    _check_odd_prime,
    as_matrix,
    chi_lattice,
    det,
    diag_matrix,
    frac,
    gamma_space_p,
    hasse_invariant,
    hilbert_symbol,
    jordan_decompose,
    rat_str,
    smallest_nonresidue,
    square_class,
    unit_legendre,
    unit_part,
    valuation,
)

__all__ = [
    "DensityPolynomial", "CountingResult", "WhittakerFiniteValue", "VertexLatticeClass",
    "HeightRatio", "InfeasibleCount", "StabilizationError",
    "count_representations", "density_value", "density_unimodular_T",
    "density_scaled_split", "density_polynomial_general", "whittaker_finite",
    "nu_p", "height_ratio", "vertex_lattice_gram", "t_max", "soylu_classify",
    "vol_ratio", "vol_ratio_ramified", "norm_lattice",
]

K_CEILING = 6


class StabilizationError(RuntimeError):
    pass


# ---------------------------------------------------------------- polynomials

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


@dataclass(frozen=True)
class DensityPolynomial:
    p: int
    coeffs: tuple  # exact rationals, constant term first
    provenance: str  # "closed-form" or "interpolated"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(frac(c) for c in self.coeffs))

    def __call__(self, x) -> Fraction:
        x = frac(x)
        out = Fraction(0)
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def derivative(self) -> "DensityPolynomial":
        return DensityPolynomial(self.p, tuple(i * c for i, c in enumerate(self.coeffs) if i),
                                 self.provenance)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def same_polynomial(self, other: "DensityPolynomial") -> bool:
        return self.p == other.p and self.coeffs == other.coeffs

    def to_json(self) -> dict:
        return {"p": self.p, "coeffs": [rat_str(c) for c in self.coeffs],
                "provenance": self.provenance}


# ---------------------------------------------------------------- counting

@dataclass(frozen=True)
class CountingResult:
    k: int
    count: int  # N_k
    normalization_exponent: int  # k (n l_r - n(n+1)/2)
    value: Fraction  # p^(-exponent) N_k
    stabilized: Optional[bool]  # value at k equals value at k + 1 (None if not checked)

    def to_json(self) -> dict:
        return {"k": self.k, "N_k": str(self.count),
                "normalization_exponent": self.normalization_exponent,
                "value": rat_str(self.value), "stabilized": self.stabilized}


def _lattice_data(p: int, gram: Matrix) -> list:
    """(f, legendre of unit) for each Q-diagonal Jordan entry p^f a of the lattice."""
    half = tuple(tuple(v / 2 for v in row) for row in as_matrix(gram))
    jf = jordan_decompose(p, half)
    return [(e, unit_legendre(u, p)) for e, units in jf.blocks for u in units]


def _t_mod(t: Matrix, q: int, p: int) -> tuple:
    out = []
    for row in t:
        r = []
        for v in row:
            if v != 0 and valuation(v, p) < 0:
                raise ValueError("T must be p-integral")
            r.append((v.numerator * pow(v.denominator, -1, q)) % q)
        out.append(tuple(r))
    return tuple(out)


def _gram(L) -> Matrix:
    return L.entries if isinstance(L, LatticeGram) else as_matrix(L)


def _moment(T) -> Matrix:
    return T.entries if hasattr(T, "entries") else as_matrix(T)


def _raw_count(p, gram, t, r, k):
    q = p ** k
    return _counting.count_mod(p, k, _t_mod(t, q, p), _lattice_data(p, gram), r)


def count_representations(p: int, L, T, r: int, k: int,
                          check_next: bool = True) -> CountingResult:
    """Normalized number of x in (L + H^r / p^k)^n with Q(x) = T mod p^k."""
    _check_odd_prime(p)
    gram, t = _gram(L), _moment(T)
    l, n = len(gram), len(t)
    if n > l + 2 * r:
        raise ValueError("rank of T exceeds rank of L + H^r")
    if r < 0 or k < 1:
        raise ValueError("need r >= 0 and k >= 1")
    lr = l + 2 * r
    expo = k * (n * lr - n * (n + 1) // 2)
    count = _raw_count(p, gram, t, r, k)
    value = Fraction(count, p ** expo)
    stab = None
    if check_next:
        nxt = Fraction(_raw_count(p, gram, t, r, k + 1), p ** ((k + 1) * (n * lr - n * (n + 1) // 2)))
        stab = nxt == value
    return CountingResult(k, count, expo, value, stab)


def _start_precision(p, gram, t) -> int:
    et = max(jordan_decompose(p, t).exponents())
    el = max(e for e, _ in _lattice_data(p, gram))
    return max(et, el) + 1


def density_value(p: int, L, T, r: int, k_ceiling: int = K_CEILING) -> CountingResult:
    """alpha_p(p^-r, T, L) from the first precision k with equal counts at k, k+1."""
    gram, t = _gram(L), _moment(T)
    k = _start_precision(p, gram, t)
    while k < k_ceiling:
        res = count_representations(p, gram, t, r, k)
        if res.stabilized:
            return res
        k += 1
    raise StabilizationError(f"counts did not stabilize below k = {k_ceiling}")


# ---------------------------------------------------------------- closed forms

def _require_unimodular(p, gram, what):
    if valuation(det(gram), p) != 0:
        raise ValueError(f"{what} is not {p}-unimodular")


def delta_of(p: int, gram: Matrix) -> int:
    """0 for odd rank, chi_L(p) for even rank (p-unimodular L)."""
    if len(gram) % 2:
        return 0
    return chi_lattice(p, gram)


def density_unimodular_T(p: int, L, T) -> DensityPolynomial:
    _check_odd_prime(p)
    gram, t = _gram(L), _moment(T)
    l, n = len(gram), len(t)
    if n > l:
        raise ValueError("rank of T exceeds rank of L")
    _require_unimodular(p, gram, "L")
    if det(t) == 0 or valuation(det(t), p) != 0:
        raise ValueError("T is not p-unimodular")
    two_t = tuple(tuple(2 * v for v in row) for row in t)
    mixed = _block_diag(two_t, tuple(tuple(-v for v in row) for row in gram))
    d_l = delta_of(p, gram)
    d_m = delta_of(p, mixed)
    poly = (Fraction(1),)
    if d_l:
        poly = poly_mul(poly, (Fraction(1), -d_l * Fraction(1, p ** (l // 2))))
    if d_m:
        poly = poly_mul(poly, (Fraction(1), d_m * Fraction(1, p ** ((l - n) // 2))))
    for e2 in range(l - n + 1, l):
        if e2 % 2 == 0:
            poly = poly_mul(poly, (Fraction(1), Fraction(0), -Fraction(1, p ** e2)))
    return DensityPolynomial(p, poly, "closed-form")


def _block_diag(a: Matrix, b: Matrix) -> Matrix:
    n, m = len(a), len(b)
    z = Fraction(0)
    rows = [tuple(a[i]) + (z,) * m for i in range(n)]
    rows += [(z,) * n + tuple(b[i]) for i in range(m)]
    return tuple(rows)


def density_scaled_split(p: int, L1, L0, T) -> DensityPolynomial:
    """alpha(X, T, L1 + L0) for unimodular L1, unimodular T and Q(L0) in pZ_p."""
    g1 = _gram(L1)
    if L0 is not None and len(_gram(L0)):
        g0 = _gram(L0)
        for i in range(len(g0)):
            for j in range(len(g0)):
                v = g0[i][j] / 2 if i == j else g0[i][j]
                if v != 0 and valuation(v, p) < 1:
                    raise ValueError("split hypothesis violated: Q(L0) is not in pZ_p")
    return density_unimodular_T(p, g1, T)


def degree_bound(p: int, T) -> int:
    t = _moment(T)
    n = len(t)
    two_t = det(tuple(tuple(2 * v for v in row) for row in t))
    return n * (n + 1) // 2 + n * valuation(two_t, p) + n


def _interpolate(xs, ys):
    """Coefficients of the Lagrange interpolant (exact)."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis = (Fraction(1),)
        denom = Fraction(1)
        for j in range(n):
            if j != i:
                basis = poly_mul(basis, (-xs[j], Fraction(1)))
                denom *= xs[i] - xs[j]
        scale = ys[i] / denom
        for d, c in enumerate(basis):
            coeffs[d] += c * scale
    return _trim(coeffs)


def density_polynomial_general(p: int, L, T, degree: Optional[int] = None,
                               k_ceiling: int = K_CEILING) -> DensityPolynomial:
    """Interpolate alpha_p(X, T, L) from counts at X = p^-r, r = 0..D, verified at D + 1."""
    _check_odd_prime(p)
    gram, t = _gram(L), _moment(T)
    if det(t) == 0:
        raise ValueError("T must be nonsingular")
    d = degree_bound(p, t) if degree is None else degree
    xs, ys = [], []
    for r in range(d + 2):
        xs.append(Fraction(1, p ** r))
        ys.append(density_value(p, gram, t, r, k_ceiling).value)
    coeffs = _interpolate(xs[:-1], ys[:-1])
    poly = DensityPolynomial(p, coeffs, "interpolated")
    if poly(xs[-1]) != ys[-1]:
        raise ArithmeticError(f"degree bound {d} failed verification at X = p^-{d + 1}")
    return poly


# ---------------------------------------------------------------- Whittaker values

@dataclass(frozen=True)
class WhittakerFiniteValue:
    """W_{T,p}(1, s) = root * p^power * alpha(p^-s)."""
    p: int
    root: Root8  # gamma(L)^n
    p_power: Fraction  # -n ord_p(det L) / 2, i.e. [L':L]^(-n/2)
    density: DensityPolynomial
    value: Fraction  # alpha(1); the value is prefactor * value
    derivative: Fraction  # c with W'(0) = prefactor * c * log p, c = -alpha'(1)

    def prefactor(self) -> complex:
        return complex(self.root) * self.p ** float(self.p_power)

    def to_json(self) -> dict:
        return {"p": self.p, "prefactor": {"root_of_unity": self.root.label(),
                                           "p_power": rat_str(self.p_power)},
                "density": self.density.to_json(), "value_at_0": rat_str(self.value),
                "derivative_coefficient": rat_str(self.derivative)}


def lattice_gamma(p: int, gram: Matrix) -> Root8:
    jf = jordan_decompose(p, tuple(tuple(v / 2 for v in row) for row in gram))
    return gamma_space_p(p, jf.diagonal())


def whittaker_finite(p: int, L, T, density: Optional[DensityPolynomial] = None) -> WhittakerFiniteValue:
    _check_odd_prime(p)
    gram, t = _gram(L), _moment(T)
    n = len(t)
    if density is None:
        try:
            density = density_unimodular_T(p, gram, t)
        except ValueError:
            density = density_polynomial_general(p, gram, t)
    root = lattice_gamma(p, gram) ** n
    p_power = Fraction(-n * valuation(det(gram), p), 2)
    return WhittakerFiniteValue(p, root, p_power, density, density(1),
                                -density.derivative()(1))


# ---------------------------------------------------------------- local heights

def nu_p(a1: int, a2: int, a3: int, p) -> Fraction:
    """Length of the local ring at an isolated special point with Gross-Keating-type
    exponents a1 <= a2 <= a3 (p may be an integer or a Fraction placeholder)."""
    if not (0 <= a1 <= a2 <= a3):
        raise ValueError("need 0 <= a1 <= a2 <= a3")
    p = frac(p)
    total = Fraction(0)
    for i in range(a1):
        total += (i + 1) * (a1 + a2 + a3 - 3 * i) * p ** i
    if (a2 - a1) % 2 == 0:
        for i in range(a1, (a1 + a2) // 2):
            total += (a1 + 1) * (2 * a1 + a2 + a3 - 4 * i) * p ** i
        total += Fraction(a1 + 1, 2) * (a3 - a2 + 1) * p ** ((a1 + a2) // 2)
    else:
        for i in range(a1, (a1 + a2 - 1) // 2 + 1):
            total += (a1 + 1) * (2 * a1 + a2 + a3 - 4 * i) * p ** i
    return total


@dataclass(frozen=True)
class HeightRatio:
    """W'_{T,p}(1,0) / W_{T^u,p}(1,0) = coefficient * log p."""
    coefficient: Fraction
    exponents: tuple
    by_nu: Fraction
    by_counting: Optional[Fraction]
    density: Optional[DensityPolynomial] = field(default=None, repr=False)
    density_unimodular: Optional[DensityPolynomial] = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {"coefficient_of_log_p": rat_str(self.coefficient),
                "exponents": list(self.exponents), "nu_p": rat_str(self.by_nu),
                "counting": None if self.by_counting is None else rat_str(self.by_counting)}


def unimodular_target(n: int) -> Matrix:
    return diag_matrix([1] * n)


def height_ratio(p: int, L, T, counting: bool = True) -> HeightRatio:
    _check_odd_prime(p)
    gram, t = _gram(L), _moment(T)
    n = len(t)
    if len(gram) != n + 1:
        raise ValueError("L must have rank n + 1")
    _require_unimodular(p, gram, "L")
    jf = jordan_decompose(p, t)
    expo = jf.exponents()
    if expo[-1] == 0:
        raise ValueError("Whittaker value nonzero (T is p-unimodular)")
    cls = soylu_classify(p, gram, t)
    if cls != "zero_dimensional":
        raise ValueError(f"Soylu condition fails ({cls})")
    a = tuple(sorted(expo)[-3:])
    a = (0,) * (3 - len(a)) + a
    by_nu = nu_p(*a, p)
    by_count = dens = dens_u = None
    if counting:
        dens = density_polynomial_general(p, gram, t)
        if dens(1) != 0:
            raise ValueError("Whittaker value nonzero")
        dens_u = density_polynomial_general(p, gram, unimodular_target(n))
        by_count = -dens.derivative()(1) / dens_u(1)
        if by_count != by_nu:
            raise ArithmeticError(f"height ratio mismatch: nu_p = {by_nu}, counting = {by_count}")
    return HeightRatio(by_nu, a, by_nu, by_count, dens, dens_u)


# ---------------------------------------------------------------- vertex lattices

@dataclass(frozen=True)
class VertexLatticeClass:
    t: int
    p: int
    gram: Matrix
    alpha: int
    beta: int

    def to_json(self) -> dict:
        return {"t": self.t, "p": self.p, "alpha": self.alpha, "beta": self.beta,
                "gram": [[rat_str(v) for v in row] for row in self.gram]}


def _unit_class(x, p) -> int:
    return square_class(x, p)[0]


def t_max(n: int, det_l, p: int) -> int:
    """Largest type of a vertex lattice for unimodular L of rank n + 1 (Gram det det_l)."""
    if n % 2 == 0:
        return n
    if _unit_class(frac(det_l) * (-1) ** ((n + 1) // 2), p) == 1:
        return n - 1
    return n + 1


def vertex_lattice_gram(t: int, p: int, det_l, n: int) -> VertexLatticeClass:
    """Gram diag(I_{n-t}, alpha, p I_{t-1}, p beta) of the type-t vertex lattice."""
    _check_odd_prime(p)
    if t % 2 or t < 2:
        raise ValueError("type must be even and at least 2")
    if t > t_max(n, det_l, p):
        raise ValueError(f"type {t} exceeds t_max")
    if t == n + 1:
        # no unimodular part: Lambda = p * (unimodular), beta carries det L
        beta = _unit_class(frac(det_l), p)
        return VertexLatticeClass(t, p, diag_matrix([p] * (t - 1) + [p * beta]), 1, beta)
    nonres = smallest_nonresidue(p)
    beta = _unit_class((-1) ** (t // 2) * nonres, p)
    alpha = _unit_class(frac(det_l) / beta, p)
    d = [1] * (n - t) + [alpha] + [p] * (t - 1) + [p * beta]
    return VertexLatticeClass(t, p, diag_matrix(d), alpha, beta)


def soylu_classify(p: int, L, T) -> str:
    _check_odd_prime(p)
    gram, t = _gram(L), _moment(T)
    n = len(t)
    if len(gram) != n + 1:
        raise ValueError("L must have rank n + 1")
    _require_unimodular(p, gram, "L")
    jf = jordan_decompose(p, t)
    r = jf.unimodular_rank()
    if r in (n - 1, n - 2):
        return "zero_dimensional"
    if r == n - 3:
        d1 = Fraction(2) ** r
        for e, units in jf.blocks:
            if e == 0:
                for u in units:
                    d1 *= u
        if _unit_class(d1, p) == _unit_class(det(gram), p):
            return "zero_dimensional"
        return "higher_dimensional"
    return "out_of_scope"


# ---------------------------------------------------------------- volumes

def vol_ratio(p: int, L) -> WhittakerFiniteValue:
    """vol(K_L)/C(L) = W_{T^u}(1, 0) for p-unimodular L of rank n + 1."""
    gram = _gram(L)
    _require_unimodular(p, gram, "L")
    n = len(gram) - 1
    return whittaker_finite(p, gram, unimodular_target(n))


def norm_lattice(p: int) -> Matrix:
    """Gram of (O_E, p Norm) for the unramified quadratic E: Q = p(x^2 + eps y^2), -eps a non-residue."""
    eps = -smallest_nonresidue(p)
    return diag_matrix([2 * p, 2 * p * eps])


def vol_ratio_ramified(p: int, L1) -> WhittakerFiniteValue:
    """vol(K_L)/C(L) for L = L1 + (O_E, p Norm), L1 unimodular, via T = diag(T1, p)."""
    g1 = _gram(L1)
    _require_unimodular(p, g1, "L1")
    gram = _block_diag(g1, norm_lattice(p))
    t1 = tuple(tuple(v / 2 for v in row) for row in g1)
    t = _block_diag(t1, ((Fraction(p),),))
    dens = density_polynomial_general(p, gram, t)
    return whittaker_finite(p, gram, t, density=dens)
