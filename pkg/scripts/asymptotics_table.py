"""Tabulate the relative residual of the leading-order asymptotics of eta as
y_1 grows, together with y_1 * residual (constant when the decay is 1/y_1)."""
import argparse
from dataclasses import dataclass

import numpy as np

from arith_sw import archwhittaker as aw


@dataclass
class Config:
    t1: float = 2.0
    t2: float = -1.0
    alpha: float = 3.0
    beta: float = 2.5
    schedule: tuple = (10.0, 20.0, 40.0, 80.0, 160.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, choices=(1, 2), default=2)
    a = ap.parse_args()
    cfg = Config()
    if a.n == 1:
        rep = aw.eta_asymptotic_check([[cfg.t1]], cfg.alpha, cfg.beta, cfg.schedule)
    else:
        rep = aw.eta_asymptotic_check(np.diag([cfg.t1, cfg.t2]), cfg.alpha, cfg.beta, cfg.schedule,
                                      y_rest=[[1.0]])
    print(f"{'y1':>8} {'residual':>12} {'y1*res':>10}")
    for y, r in zip(rep.schedule, rep.residuals):
        print(f"{y:8.1f} {r:12.4e} {y * r:10.4f}")


if __name__ == "__main__":
    main()
