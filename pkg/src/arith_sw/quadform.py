"""Invariants of rational, real and p-adic quadratic forms.

Conventions: a lattice or space is given by its bilinear Gram matrix
S = ((e_i, e_j)) with Q(x) = x^t S x / 2.  A moment matrix is the half-Gram
T = Q(x) = ((x_i, x_j)) / 2.  Diagonal forms <a_1, ..., a_l> always mean the
Q-form a_1 x_1^2 + ... + a_l x_l^2, i.e. the Gram matrix diag(2 a_i).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

import sympy

INF = "inf"

Rational = Union[int, Fraction, str]
Place = Union[int, str]
Matrix = tuple  # tuple of tuples of Fraction


class UnsupportedRegime(ValueError):
    """Raised for inputs outside the supported regime (p = 2, large n, ...)."""


def frac(x: Rational) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not a rational")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    raise TypeError(f"cannot read {x!r} as a rational")


def rat_str(x: Fraction) -> str:
    x = frac(x)
    return f"{x.numerator}/{x.denominator}"


def as_matrix(rows: Iterable[Iterable[Rational]]) -> Matrix:
    m = tuple(tuple(frac(v) for v in row) for row in rows)
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    for i in range(n):
        for j in range(i):
            if m[i][j] != m[j][i]:
                raise ValueError("matrix must be symmetric")
    return m


def diag_matrix(d: Sequence[Rational]) -> Matrix:
    d = [frac(x) for x in d]
    return tuple(tuple(d[i] if i == j else Fraction(0) for j in range(len(d)))
                 for i in range(len(d)))


def det(m: Matrix) -> Fraction:
    a = [list(row) for row in m]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            out = -out
        out *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for j in range(c, n):
                    a[r][j] -= f * a[c][j]
    return out


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0))
                       for j in range(len(b[0]))) for i in range(len(a)))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def congruent(t: Matrix, g: Matrix) -> Matrix:
    """g^t T g."""
    return mat_mul(mat_mul(transpose(g), t), g)


def gram_to_moment(s: Matrix) -> Matrix:
    return tuple(tuple(v / 2 for v in row) for row in as_matrix(s))


def moment_to_gram(t: Matrix) -> Matrix:
    return tuple(tuple(v * 2 for v in row) for row in as_matrix(t))


@dataclass(frozen=True)
class MomentMatrix:
    """T = Q(x), the half-Gram matrix of an n-tuple."""
    entries: Matrix

    def __post_init__(self):
        object.__setattr__(self, "entries", as_matrix(self.entries))

    @property
    def n(self) -> int:
        return len(self.entries)

    def det(self) -> Fraction:
        return det(self.entries)


@dataclass(frozen=True)
class LatticeGram:
    """Integral Gram matrix S = ((e_i, e_j)); Q(x) = x^t S x / 2."""
    entries: Matrix

    def __post_init__(self):
        m = as_matrix(self.entries)
        if any(v.denominator != 1 for row in m for v in row):
            raise ValueError("lattice Gram matrix must be integral")
        if det(m) == 0:
            raise ValueError("lattice Gram matrix must be nondegenerate")
        object.__setattr__(self, "entries", m)

    @property
    def rank(self) -> int:
        return len(self.entries)

    def det(self) -> Fraction:
        return det(self.entries)

    def half(self) -> Matrix:
        return gram_to_moment(self.entries)

    @classmethod
    def diagonal(cls, d: Sequence[Rational]) -> "LatticeGram":
        """Lattice <d_1,...,d_l>, i.e. Q = sum d_i x_i^2."""
        return cls(diag_matrix([2 * frac(x) for x in d]))


HYPERBOLIC_PLANE = ((Fraction(0), Fraction(1)), (Fraction(1), Fraction(0)))


# ---------------------------------------------------------------- p-adic basics

def valuation(x: Rational, p: int) -> int:
    x = frac(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    a, b = x.numerator, x.denominator
    while a % p == 0:
        a //= p
        v += 1
    while b % p == 0:
        b //= p
        v -= 1
    return v


def unit_part(x: Rational, p: int) -> Fraction:
    x = frac(x)
    return x / Fraction(p) ** valuation(x, p)


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def unit_legendre(u: Rational, p: int) -> int:
    u = frac(u)
    return legendre(u.numerator * u.denominator, p)


def smallest_nonresidue(p: int) -> int:
    return next(a for a in range(2, p) if legendre(a, p) == -1)


def is_prime(p) -> bool:
    return isinstance(p, int) and p >= 2 and sympy.isprime(p)


def _check_odd_prime(p):
    if p == 2:
        raise UnsupportedRegime("p = 2 is not supported for this operation")
    if not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")


def prime_support(values: Iterable[Rational]) -> set:
    out = set()
    for x in values:
        x = frac(x)
        if x == 0:
            continue
        for n in (x.numerator, x.denominator):
            out.update(sympy.factorint(abs(n)).keys())
    return out


# ---------------------------------------------------------------- Hilbert symbol

def _eps2(u: int) -> int:
    return ((u - 1) // 2) % 2


def _omega2(u: int) -> int:
    return ((u * u - 1) // 8) % 2


def hilbert_symbol(a: Rational, b: Rational, place: Place) -> int:
    a, b = frac(a), frac(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if place == INF:
        return -1 if (a < 0 and b < 0) else 1
    p = place
    if not is_prime(p):
        raise ValueError(f"bad place {place!r}")
    al, be = valuation(a, p), valuation(b, p)
    ua, ub = unit_part(a, p), unit_part(b, p)
    # integer representatives of the unit parts (same class mod p resp. mod 8)
    u = ua.numerator * ua.denominator
    v = ub.numerator * ub.denominator
    if p == 2:
        e = _eps2(u) * _eps2(v) + al * _omega2(v) + be * _omega2(u)
        return -1 if e % 2 else 1
    sign = -1 if (al * be * ((p - 1) // 2)) % 2 else 1
    return sign * legendre(u, p) ** (be % 2) * legendre(v, p) ** (al % 2)


def hasse_invariant(place: Place, d: Sequence[Rational]) -> int:
    d = [frac(x) for x in d]
    if any(x == 0 for x in d):
        raise ValueError("Hasse invariant needs nonzero diagonal entries")
    out = 1
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            out *= hilbert_symbol(d[i], d[j], place)
    return out


def diagonalize(m: Matrix) -> list:
    """Rational diagonal entries of a form congruent over Q to the symmetric m."""
    a = [list(row) for row in as_matrix(m)]
    n = len(a)
    out = []
    for c in range(n):
        if a[c][c] == 0:
            j = next((j for j in range(c + 1, n) if a[c][j] != 0), None)
            if j is None:
                out.append(Fraction(0))
                continue
            # e_c <- e_c + e_j (or e_c - e_j) makes the pivot nonzero
            sgn = 1 if a[c][c] + 2 * a[c][j] + a[j][j] != 0 else -1
            for k in range(n):
                a[c][k] += sgn * a[j][k]
            for k in range(n):
                a[k][c] += sgn * a[k][j]
        piv = a[c][c]
        out.append(piv)
        for r in range(c + 1, n):
            f = a[r][c] / piv
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
                for k in range(c, n):
                    a[k][r] = a[r][k]
        for r in range(c + 1, n):
            a[r][c] = a[c][r] = Fraction(0)
    return out


def signature(d: Sequence[Rational]) -> tuple:
    d = [frac(x) for x in d]
    return (sum(1 for x in d if x > 0), sum(1 for x in d if x < 0))


# ---------------------------------------------------------------- Jordan forms

@dataclass(frozen=True)
class JordanForm:
    p: int
    blocks: tuple  # ((exponent, (unit, ...)), ...), exponents increasing
    rank: int

    def diagonal(self) -> list:
        return [Fraction(self.p) ** e * u for e, units in self.blocks for u in units]

    def exponents(self) -> list:
        return [e for e, units in self.blocks for _ in units]

    def unimodular_rank(self) -> int:
        return sum(len(units) for e, units in self.blocks if e == 0)


def _canonical_unit(u: Fraction, p: int) -> int:
    return 1 if unit_legendre(u, p) == 1 else smallest_nonresidue(p)


def jordan_decompose(p: int, t: Matrix) -> JordanForm:
    """Jordan splitting over Z_p (p odd) of a symmetric matrix with p-integral entries.

    Each block is returned in the canonical shape (1, ..., 1, d) with d the
    square class of the block's unit determinant.
    """
    _check_odd_prime(p)
    a = [list(row) for row in as_matrix(t)]
    n = len(a)
    if det(a) == 0:
        raise ValueError("singular matrix")
    if any(v != 0 and valuation(v, p) < 0 for row in a for v in row):
        raise ValueError("entries must be p-integral")
    diag = []
    idx = list(range(n))
    for c in range(n):
        best = None
        for i in range(c, n):
            for j in range(i, n):
                v = a[i][j]
                if v == 0:
                    continue
                key = (valuation(v, p), 0 if i == j else 1)
                if best is None or key < best[0]:
                    best = (key, i, j)
        (_, i, j) = best
        if i != j:
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
        a[c], a[i] = a[i], a[c]
        for row in a:
            row[c], row[i] = row[i], row[c]
        piv = a[c][c]
        diag.append(piv)
        for r in range(c + 1, n):
            f = a[r][c] / piv
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
                for k in range(c, n):
                    a[k][r] = a[r][k]
        for r in range(c + 1, n):
            a[r][c] = a[c][r] = Fraction(0)
    groups = {}
    for d in diag:
        groups.setdefault(valuation(d, p), []).append(unit_part(d, p))
    blocks = []
    for e in sorted(groups):
        units = groups[e]
        prod = Fraction(1)
        for u in units:
            prod *= u
        blocks.append((e, tuple([1] * (len(units) - 1) + [_canonical_unit(prod, p)])))
    return JordanForm(p, tuple(blocks), n)


# ---------------------------------------------------------------- local invariants

@dataclass(frozen=True)
class LocalInvariants:
    place: Place
    dimension: int
    det_class: tuple  # (unit class, valuation parity) at p; (sign, 0) at infinity
    hasse: int
    det: Fraction = field(repr=False)

    def chi(self, a: Rational) -> int:
        l = self.dimension
        return hilbert_symbol(a, (-1) ** (l * (l - 1) // 2) * self.det, self.place)


def square_class(x: Rational, place: Place) -> tuple:
    x = frac(x)
    if place == INF:
        return (1 if x > 0 else -1, 0)
    p = place
    v = valuation(x, p)
    u = unit_part(x, p)
    if p == 2:
        return ((u.numerator * u.denominator) % 8, v % 2)
    return (_canonical_unit(u, p), v % 2)


def local_invariants(place: Place, d: Sequence[Rational]) -> LocalInvariants:
    d = [frac(x) for x in d]
    dt = Fraction(1)
    for x in d:
        dt *= x
    return LocalInvariants(place, len(d), square_class(dt, place), hasse_invariant(place, d), dt)


# ---------------------------------------------------------------- Weil indices

@dataclass(frozen=True)
class Root8:
    """The eighth root of unity e(k/8)."""
    k: int

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % 8)

    def __mul__(self, other: "Root8") -> "Root8":
        return Root8(self.k + other.k)

    def __pow__(self, n: int) -> "Root8":
        return Root8(self.k * n)

    def inverse(self) -> "Root8":
        return Root8(-self.k)

    def __complex__(self) -> complex:
        return _ROOT8_VALUES[self.k]

    def label(self) -> str:
        return f"e({self.k}/8)"


_S = math.sqrt(0.5)
_ROOT8_VALUES = (1 + 0j, complex(_S, _S), 1j, complex(-_S, _S), -1 + 0j,
                 complex(-_S, -_S), -1j, complex(_S, -_S))


def root8_from_complex(z: complex) -> Root8:
    k = round(cmath.phase(z) / (2 * math.pi) * 8)
    r = Root8(k)
    if abs(complex(r) - z / abs(z)) > 1e-9:
        raise ArithmeticError(f"{z} is not an eighth root of unity")
    return r


def gamma_real(sig: Sequence[int], n: int) -> Root8:
    """e(n (q - p) / 8) for a real space of signature (p, q)."""
    pp, qq = sig
    return Root8(n * (qq - pp))


def weil_index_p(a: Rational, p: int) -> Root8:
    """Normalized Gauss sum of x -> e(a x^2) over p^-m Z_p, m large.

    With a = p^v u, the sum over x mod p^k with k the least even integer > v
    reduces to p^v times a Gauss sum modulo p^(k - v), and k - v is 1 or 2.
    """
    _check_odd_prime(p)
    a = frac(a)
    v = valuation(a, p)
    u = unit_part(a, p)
    k = v + 1 if v % 2 else v + 2
    mod = p ** (k - v)
    c = (u.numerator * pow(u.denominator, -1, mod)) % mod
    s = sum(cmath.exp(2j * math.pi * c * x * x / mod) for x in range(mod))
    return root8_from_complex(s)


def gamma_space_p(p: int, d: Sequence[Rational]) -> Root8:
    out = Root8(0)
    for x in d:
        if frac(x) == 0:
            raise ValueError("zero diagonal entry")
        out = out * weil_index_p(x, p)
    return out


# ---------------------------------------------------------------- representability

def local_represents(place: Place, space: Sequence[Rational], t: Matrix) -> bool:
    """Whether the (n+1)-dim diagonal Q-form `space` represents the moment matrix t."""
    t = as_matrix(t)
    space = [frac(x) for x in space]
    if len(space) != len(t) + 1:
        raise ValueError("codimension must be exactly one")
    dt = det(t)
    if dt == 0:
        raise ValueError("degenerate T")
    tdiag = diagonalize(t)
    if place == INF:
        sp, sq = signature(space)
        tp, tq = signature(tdiag)
        return tp <= sp and tq <= sq
    ds = Fraction(1)
    for x in space:
        ds *= x
    delta = ds / dt
    return hasse_invariant(place, tdiag + [delta]) == hasse_invariant(place, space)


def relevant_places(*values: Rational) -> list:
    ps = prime_support(values) | {2}
    return sorted(ps) + [INF]


def diff_set(v_gram: Matrix, t: Matrix) -> set:
    """Places where the incoherent collection (V_p at finite p, positive definite
    of the same dimension at infinity) fails to represent t."""
    v_gram = as_matrix(v_gram)
    t = as_matrix(t)
    if det(t) == 0:
        raise ValueError("degenerate T")
    vd = [x / 2 for x in diagonalize(v_gram)]
    if any(x == 0 for x in vd):
        raise ValueError("degenerate V")
    if signature(vd)[1] != 2:
        raise ValueError("V must have signature (m, 2)")
    if len(t) != len(vd) - 1:
        raise ValueError("T must have rank dim V - 1")
    td = diagonalize(t)
    out = set()
    for place in relevant_places(*vd, *td):
        if place == INF:
            if not all(x > 0 for x in td):
                out.add(INF)
        elif not local_represents(place, vd, t):
            out.add(place)
    return out


def is_unimodular_at(p: int, gram: Matrix) -> bool:
    return valuation(det(gram), p) == 0


def chi_lattice(p: int, gram: Matrix) -> int:
    """chi_L(p) = ((-1)^(l(l-1)/2) det L, p)_p for p-unimodular L, det of the Gram matrix."""
    l = len(gram)
    return hilbert_symbol((-1) ** (l * (l - 1) // 2) * det(gram), p, p)
