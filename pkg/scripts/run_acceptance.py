"""Run the nine acceptance checks and write a JSON report."""
import argparse
import json
from dataclasses import dataclass, field
from pathlib import Path

from arith_sw import acceptance


@dataclass
class Config:
    criteria: list = field(default_factory=lambda: list(range(1, 10)))
    out: str = "acceptance_report.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("criteria", nargs="*", type=int)
    ap.add_argument("--out", default=Config.out)
    a = ap.parse_args()
    cfg = Config(a.criteria or Config().criteria, a.out)
    results = [acceptance.run_check(k) for k in cfg.criteria]
    for r in results:
        print(r.line())
    Path(cfg.out).write_text(json.dumps([r.to_json() for r in results], indent=2, sort_keys=True) + "\n")
    print(f"{sum(r.passed for r in results)}/{len(results)} passed; report in {cfg.out}")


if __name__ == "__main__":
    main()
