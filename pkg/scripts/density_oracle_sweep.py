"""Compare the closed-form density polynomial with stabilized counting on
random unimodular diagonal lattices and targets at small odd primes."""
import argparse
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from arith_sw import localdensity as ld
from arith_sw.quadform import diag_matrix


@dataclass
class Config:
    primes: tuple = (3, 5, 7)
    trials: int = 30
    max_rank: int = 5
    max_n: int = 2
    radii: tuple = (0, 1, 2)
    seed: int = 7


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=Config.trials)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    cfg = Config(trials=a.trials, seed=a.seed)
    rng = np.random.default_rng(cfg.seed)
    bad = done = skipped = 0
    for _ in range(cfg.trials):
        p = int(rng.choice(cfg.primes))
        l = int(rng.integers(1, cfg.max_rank + 1))
        n = int(rng.integers(1, min(l, cfg.max_n) + 1))
        units = [u for u in range(1, p) if u % p]
        L = diag_matrix([int(rng.choice(units)) for _ in range(l)])
        T = diag_matrix([int(rng.choice(units)) for _ in range(n)])
        poly = ld.density_unimodular_T(p, L, T)
        for r in cfg.radii:
            try:
                res = ld.density_value(p, L, T, r)
            except ld.InfeasibleCount:
                skipped += 1
                continue
            done += 1
            ok = res.stabilized and res.value == poly(Fraction(1, p ** r))
            bad += not ok
            print(f"p={p} L={[str(L[i][i]) for i in range(l)]} T={[str(T[i][i]) for i in range(n)]} r={r}: "
                  f"{'ok' if ok else 'MISMATCH'} {res.value}")
    print(f"{done} compared, {bad} mismatches, {skipped} too large to count")


if __name__ == "__main__":
    main()
