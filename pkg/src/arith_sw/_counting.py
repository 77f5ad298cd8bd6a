"""Exact representation counts modulo p^k through finite Fourier analysis.

For x in M^n with M = (Z/q)^l, q = p^k, carrying the diagonal form
Q = sum c_m y_m^2, orthogonality of characters on Sym_n(Z/q) gives

    #{x : Q(x) = T} = q^(-n(n+1)/2) sum_b e(-tr(bT)/q) prod_m g(c_m b),

with g(B) = sum_y e(y^t B y / q) a Gauss sum that only depends on the
GL_n(Z/q)-class of B.  Each b is brought to diagonal shape
diag(w_j p^(e_j)) by symmetric elimination; its "key" records (e_j, (w_j/p)).
The histogram hist[key, t] of t = -tr(bT) mod q is independent of the
lattice, so one pass over Sym_n(Z/q) serves every L and every number of
hyperbolic planes.  Only representatives of the orbits b -> u b (u a unit)
are diagonalized; the orbit is restored afterwards.
"""
from __future__ import annotations

from functools import lru_cache

import numba
import numpy as np

MAX_REPRESENTATIVES = 60_000_000


class InfeasibleCount(ValueError):
    pass


@numba.njit(cache=True)
def _histogram_kernel(p, k, n, v, c0, tmat, inv, leg, valtab):
    """Histogram over b whose first entry of minimal valuation v sits at
    upper-triangle position c0 and equals p^v exactly."""
    q = p ** k
    m = n * (n + 1) // 2
    nslot = 2 * (k + 1)
    nkeys = nslot ** n
    hist = np.zeros((nkeys, q), dtype=np.int64)
    iu = np.zeros(m, dtype=np.int64)
    ju = np.zeros(m, dtype=np.int64)
    c = 0
    for i in range(n):
        for j in range(i, n):
            iu[c] = i
            ju[c] = j
            c += 1
    pv = p ** v
    hi = p ** (k - v - 1)   # digits before c0: p^(v+1) * (0..hi-1)
    lo = p ** (k - v)       # digits after c0: p^v * (0..lo-1)
    total = hi ** c0 * lo ** (m - 1 - c0)
    b = np.zeros((n, n), dtype=np.int64)
    for idx in range(total):
        x = idx
        t = 0
        for c in range(m):
            if c < c0:
                d = (x % hi) * pv * p
                x //= hi
            elif c == c0:
                d = pv
            else:
                d = (x % lo) * pv
                x //= lo
            i = iu[c]
            j = ju[c]
            b[i, j] = d
            b[j, i] = d
            if i == j:
                t += d * tmat[i, i]
            else:
                t += 2 * d * tmat[i, j]
        t = (-t) % q
        key = 0
        mult = 1
        for s in range(n):
            vmin = k
            bi = -1
            bj = -1
            for i in range(s, n):
                vv = valtab[b[i, i]]
                if vv < vmin:
                    vmin = vv
                    bi = i
                    bj = i
            for i in range(s, n):
                for j in range(i + 1, n):
                    vv = valtab[b[i, j]]
                    if vv < vmin:
                        vmin = vv
                        bi = i
                        bj = j
            if vmin == k:
                for _ in range(s, n):
                    key += (2 * k) * mult
                    mult *= nslot
                break
            if bi != bj:
                for l in range(n):
                    b[bi, l] = (b[bi, l] + b[bj, l]) % q
                for l in range(n):
                    b[l, bi] = (b[l, bi] + b[l, bj]) % q
            if bi != s:
                for l in range(n):
                    tmp = b[bi, l]
                    b[bi, l] = b[s, l]
                    b[s, l] = tmp
                for l in range(n):
                    tmp = b[l, bi]
                    b[l, bi] = b[l, s]
                    b[l, s] = tmp
            pe = p ** vmin
            w = b[s, s] // pe
            key += (2 * vmin + leg[w % p]) * mult
            mult *= nslot
            wi = inv[w % q]
            for i in range(s + 1, n):
                ci = b[i, s] // pe
                for j in range(i, n):
                    cj = b[j, s] // pe
                    val = (b[i, j] - ((pe * ((ci * cj) % q)) % q) * wi) % q
                    b[i, j] = val
                    b[j, i] = val
        hist[key, t] += 1
    return hist


def representative_count(p: int, k: int, n: int) -> int:
    m = n * (n + 1) // 2
    total = 1
    for v in range(k):
        hi, lo = p ** (k - v - 1), p ** (k - v)
        total += sum(hi ** c * lo ** (m - 1 - c) for c in range(m))
    return total


def _tables(p, k):
    q = p ** k
    inv = np.zeros(q, dtype=np.int64)
    for w in range(q):
        if w % p:
            inv[w] = pow(w, -1, q)
    squares = {(x * x) % p for x in range(1, p)}
    leg = np.array([0] + [0 if w in squares else 1 for w in range(1, p)], dtype=np.int64)
    valtab = np.zeros(q, dtype=np.int64)
    valtab[0] = k
    for d in range(1, q):
        e = 0
        while d % p ** (e + 1) == 0:
            e += 1
        valtab[d] = e
    return inv, leg, valtab


def _flip_nonresidue(key: int, n: int, k: int) -> int:
    nslot = 2 * (k + 1)
    out, mult = 0, 1
    for _ in range(n):
        code = key % nslot
        key //= nslot
        e, l = divmod(code, 2)
        if e < k:
            l ^= 1
        out += (2 * e + l) * mult
        mult *= nslot
    return out


@lru_cache(maxsize=256)
def histogram(p: int, k: int, tmod: tuple) -> np.ndarray:
    """hist[key, t] = #{b in Sym_n(Z/p^k) : key(b) = key, -tr(bT) = t mod p^k}."""
    n = len(tmod)
    reps = representative_count(p, k, n)
    if reps > MAX_REPRESENTATIVES:
        raise InfeasibleCount(
            f"counting modulo {p}^{k} with n={n} needs about {reps:.3g} orbit "
            f"representatives (ceiling {MAX_REPRESENTATIVES:.3g})")
    q = p ** k
    m = n * (n + 1) // 2
    nslot = 2 * (k + 1)
    tmat = np.array(tmod, dtype=np.int64)
    inv, leg, valtab = _tables(p, k)
    full = np.zeros((nslot ** n, q), dtype=np.int64)
    full[_zero_key(n, k), 0] += 1  # b = 0
    nonres = {u for u in range(1, q) if u % p and (u % p) in
              {w for w in range(1, p) if leg[w]}}
    for v in range(k):
        rep = np.zeros((nslot ** n, q), dtype=np.int64)
        for c0 in range(m):
            rep += _histogram_kernel(p, k, n, v, c0, tmat, inv, leg, valtab)
        mod = p ** (k - v)
        keys = np.nonzero(rep.any(axis=1))[0]
        flipped = np.array([_flip_nonresidue(int(key), n, k) for key in keys], dtype=np.int64)
        ts = np.arange(q)
        for u in range(1, mod):
            if u % p == 0:
                continue
            target = flipped if u in nonres else keys
            cols = (u * ts) % q
            np.add.at(full, (target[:, None], cols[None, :]), rep[keys])
    full.setflags(write=False)
    return full


def _zero_key(n: int, k: int) -> int:
    nslot = 2 * (k + 1)
    return sum(2 * k * nslot ** j for j in range(n))


def decode_key(key: int, n: int, k: int) -> list:
    nslot = 2 * (k + 1)
    out = []
    for _ in range(n):
        code = key % nslot
        key //= nslot
        out.append(divmod(code, 2))
    return out


def count_mod(p: int, k: int, tmod: tuple, qform: list, r: int) -> int:
    """#{x in (L + H^r)^n mod p^k : Q(x) = T}, L = sum_m p^f_m a_m y_m^2.

    qform lists (f_m, legendre(a_m)) for the Q-diagonal Jordan entries of L.
    """
    n = len(tmod)
    q = p ** k
    hist = histogram(p, k, tmod)
    p_star_sign = 1 if p % 4 == 1 else -1
    # group ring vectors for the rational part and the part multiplied by g1
    acc = [[0] * q, [0] * q]
    for key in np.nonzero(hist.any(axis=1))[0]:
        slots = decode_key(int(key), n, k)
        coeff = 1
        odd = 0
        for f, la in qform:
            for e, l in slots:
                big = e + f
                if big >= k:
                    coeff *= q
                    continue
                mm = k - big
                coeff *= p ** big * p ** (mm // 2)
                if mm % 2:
                    coeff *= la * (-1 if l else 1)
                    odd += 1
        zh = q ** n * p ** sum(e for e, _ in slots)
        coeff *= zh ** r
        # g1^odd = (p*)^(odd//2) * g1^(odd%2)
        coeff *= (p_star_sign * p) ** (odd // 2)
        row = hist[key]
        vec = acc[odd % 2]
        for t in np.nonzero(row)[0]:
            vec[int(t)] += coeff * int(row[t])
    # multiply the second vector by g1 = sum_y zeta^(q/p * y^2)
    step = q // p
    g1 = [0] * q
    for y in range(p):
        g1[(step * y * y) % q] += 1
    total = list(acc[0])
    a1 = acc[1]
    for i in range(q):
        if a1[i]:
            for j in range(q):
                if g1[j]:
                    total[(i + j) % q] += a1[i] * g1[j]
    value = _rational_value(total, p, k)
    scale = q ** (n * (n + 1) // 2)
    if value % scale:
        raise ArithmeticError("character sum is not divisible by the group order")
    return value // scale


def _rational_value(vec: list, p: int, k: int) -> int:
    """The integer c with sum_t vec[t] zeta^t = c for a primitive p^k-th root zeta."""
    q = p ** k
    step = q // p
    c = vec[0] - vec[step]
    for rho in range(step):
        base = vec[rho + step] if rho == 0 else vec[rho]
        for i in range(p):
            val = vec[rho + i * step] - (c if (rho == 0 and i == 0) else 0)
            if val != base:
                raise ArithmeticError("character sum is not rational")
    return c
