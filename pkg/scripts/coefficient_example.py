"""Assemble E'_T(tau, 0) for a lattice and T given on the command line and
print the factor table."""
import argparse
import json
from dataclasses import dataclass, field

from arith_sw import eisenstein as es


@dataclass
class Config:
    gram: list = field(default_factory=lambda: [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    T: list = field(default_factory=lambda: [[1, 0, 0], [0, 1, 0], [0, 0, 3]])
    tau_im: float = 1.0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gram", type=json.loads)
    ap.add_argument("--T", type=json.loads)
    ap.add_argument("--tau-im", type=float, default=Config.tau_im)
    ap.add_argument("--json", action="store_true")
    a = ap.parse_args()
    d = Config()
    cfg = Config(a.gram or d.gram, a.T or d.T, a.tau_im)
    rep = es.coefficient_derivative(es.IncoherentDatum(cfg.gram), cfg.T, cfg.tau_im)
    if a.json:
        print(json.dumps(rep.to_json(), indent=2, sort_keys=True))
        return
    print(f"Diff = {{{', '.join(map(str, rep.diff))}}}")
    for f in rep.factors:
        v = "--" if f.value is None else f"{f.value:.6g}"
        print(f"  {str(f.place):>5} {f.kind:<10} {f.provenance:<14} {v}")
    if rep.assembled is not None:
        print(f"assembled (without omitted places {list(map(str, rep.missing))}): {rep.assembled:.6g}")


if __name__ == "__main__":
    main()
