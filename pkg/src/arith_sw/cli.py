"""Command-line front end: `arith-sw <subcommand> [--input FILE | --json TEXT]`.

Every subcommand reads one JSON object (validated against schemas/v1) and
writes one JSON document.  Exit codes: 0 ok, 1 tolerance or internal failure,
2 invalid input, 3 unsupported regime.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from . import acceptance
from . import archwhittaker as aw
from . import eisenstein as es
from . import localdensity as ld
from . import quadform as qf
from .quadrature import QuadratureError, QuadratureSpec

SCHEMA_DIR = Path(os.environ.get("ARITH_SW_SCHEMAS", Path(__file__).resolve().parents[2] / "schemas")) / "v1"

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3


class InputError(ValueError):
    pass


def _place(v):
    return qf.INF if v == "inf" else int(v)


def _rmat(m):
    return qf.as_matrix(m)


def _fmat(m):
    return np.array([[float(Fraction(v)) if isinstance(v, str) else float(v) for v in row] for row in m])


def _cj(z):
    z = complex(z)
    return {"re": repr(z.real), "im": repr(z.imag)}


def _places(s):
    return sorted((str(v) for v in s), key=lambda x: (x == "inf", int(x) if x != "inf" else 0))


# ---------------------------------------------------------------- handlers

def cmd_invariants(a, opts):
    inv = qf.local_invariants(_place(a["place"]), [qf.frac(x) for x in a["diagonal"]])
    return {"place": str(inv.place), "dimension": inv.dimension, "det_class": list(inv.det_class),
            "det": qf.rat_str(inv.det), "hasse": inv.hasse}


def cmd_jordan(a, opts):
    jf = qf.jordan_decompose(int(a["p"]), _rmat(a["T"]))
    return {"p": jf.p, "blocks": [{"exponent": e, "units": list(u)} for e, u in jf.blocks],
            "exponents": list(jf.exponents())}


def cmd_diff_set(a, opts):
    d = qf.diff_set(_rmat(a["V"]), _rmat(a["T"]))
    return {"diff": _places(d), "size": len(d)}


def cmd_density(a, opts):
    p, L, T = int(a["p"]), _rmat(a["L"]), _rmat(a["T"])
    mode = opts.mode or a.get("mode", "closed")
    if mode == "count":
        r = int(a.get("r", 0))
        res = ld.count_representations(p, L, T, r, int(a["k"])) if "k" in a else ld.density_value(p, L, T, r)
        return res.to_json()
    if mode == "closed":
        return ld.density_unimodular_T(p, L, T).to_json()
    return ld.density_polynomial_general(p, L, T).to_json()


def cmd_nu_p(a, opts):
    return {"nu_p": qf.rat_str(ld.nu_p(*a["a"], int(a["p"])))}


def cmd_height_ratio(a, opts):
    return ld.height_ratio(int(a["p"]), _rmat(a["L"]), _rmat(a["T"]), a.get("counting", True)).to_json()


def cmd_soylu(a, opts):
    return {"class": ld.soylu_classify(int(a["p"]), _rmat(a["L"]), _rmat(a["T"]))}


def cmd_vertex_lattice(a, opts):
    return ld.vertex_lattice_gram(int(a["t"]), int(a["p"]), qf.frac(a["det_L"]), int(a["n"])).to_json()


def cmd_eta(a, opts):
    spec = QuadratureSpec(rel_tol=float(a["rel_tol"])) if "rel_tol" in a else None
    return aw.eta(_fmat(a["y"]), _fmat(a["T"]), a["alpha"], a["beta"], spec).to_json()


def cmd_whittaker(a, opts):
    place = opts.place or a.get("place", "inf")
    if place != "inf":
        p = int(place if opts.place else a.get("p", place))
        return ld.whittaker_finite(p, _rmat(a["L"]), _rmat(a["T"])).to_json()
    T = _fmat(a["T"])
    n = len(T)
    pt = aw.RadialPoint(_fmat(a.get("y", np.eye(n).tolist())), u=_fmat(a["u"]) if "u" in a else None)
    kappa = float(a.get("kappa", aw.rho(n)))
    return aw.whittaker_real(T, pt, float(a.get("s", 0.0)), kappa).to_json()


def cmd_asymptotic_check(a, opts):
    return aw.eta_asymptotic_check(_fmat(a["T"]), a["alpha"], a["beta"], a["schedule"],
                                   _fmat(a["y_rest"]) if "y_rest" in a else None).to_json()


def cmd_height_arch(a, opts):
    return {"T": repr(float(a["T"])), "Ht_inf": repr(aw.height_arch_n1(float(a["T"])))}


def cmd_alsw_check(a, opts):
    ts = a.get("T", [-0.5, -1.0, -2.0])
    res = acceptance.alsw_residuals(ts)
    rows = [{"T": repr(float(t)), "Ht_inf": repr(aw.height_arch_n1(t)),
             "W_prime": _cj(aw.whittaker_derivative_n1(t)), "residual": repr(r)} for t, r in zip(ts, res)]
    if max(res) >= 1e-8:
        raise QuadratureError(f"identity residual {max(res):.3g} above 1e-8")
    return {"rows": rows, "B_1": _cj(es.b_infinity(1).value)}


def cmd_coefficient(a, opts):
    datum = es.IncoherentDatum(_rmat(a["L"]))
    return es.coefficient_derivative(datum, _rmat(a["T"]), a.get("tau_im", 1.0)).to_json()


def cmd_constants(a, opts):
    n, l = int(a.get("n", 2)), int(a.get("l", 2))
    return {"B": [es.b_infinity(k).to_json() for k in range(1, n + 1)],
            "quotient_law": {str(k): es.b_quotient_holds(k) for k in range(2, n + 1)},
            "so_volume": {"l": l, "expression": str(es.so_volume(l))}}


def cmd_acceptance(a, opts):
    only = a.get("only", [k for k, _, _ in acceptance.CHECKS])
    rows = [acceptance.run_check(k) for k in only]
    for r in rows:
        print(r.line(), file=sys.stderr)
    doc = {"checks": [r.to_json() for r in rows], "all_passed": all(r.passed for r in rows)}
    return doc


HANDLERS = {
    "invariants": cmd_invariants, "jordan": cmd_jordan, "diff-set": cmd_diff_set,
    "density": cmd_density, "nu-p": cmd_nu_p, "height-ratio": cmd_height_ratio,
    "soylu": cmd_soylu, "vertex-lattice": cmd_vertex_lattice, "eta": cmd_eta,
    "whittaker": cmd_whittaker, "asymptotic-check": cmd_asymptotic_check,
    "height-arch": cmd_height_arch, "alsw-check": cmd_alsw_check,
    "coefficient": cmd_coefficient, "constants": cmd_constants, "acceptance": cmd_acceptance,
}


def load_schema(name: str) -> dict:
    with open(SCHEMA_DIR / f"{name}.json") as f:
        return json.load(f)


def parse_args(argv):
    ap = argparse.ArgumentParser(prog="arith-sw", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(HANDLERS))
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--input", "-i", help="JSON file ('-' for stdin)")
    src.add_argument("--json", "-j", help="JSON object given inline")
    ap.add_argument("--output", "-o", help="write the result here instead of stdout")
    ap.add_argument("--mode", choices=["count", "closed", "interp"], help="density mode")
    ap.add_argument("--place", help="whittaker: an odd prime or 'inf'")
    return ap.parse_args(argv)


def run(command: str, params: dict, opts=None) -> tuple:
    """Validate and dispatch; returns (exit status, JSON document)."""
    opts = opts or argparse.Namespace(mode=None, place=None)
    try:
        jsonschema.validate(params, load_schema(command))
    except jsonschema.ValidationError as e:
        return EXIT_INPUT, {"error": "schema", "message": e.message}
    try:
        return EXIT_OK, HANDLERS[command](params, opts)
    except ZeroDivisionError as e:  # an ArithmeticError, but always bad input here
        return EXIT_INPUT, {"error": "input", "message": str(e)}
    except (qf.UnsupportedRegime, NotImplementedError, ld.InfeasibleCount) as e:
        return EXIT_UNSUPPORTED, {"error": "unsupported", "message": str(e)}
    except (QuadratureError, ld.StabilizationError, ArithmeticError) as e:
        return EXIT_FAIL, {"error": "tolerance", "message": str(e)}
    except (ValueError, KeyError, TypeError) as e:
        return EXIT_INPUT, {"error": "input", "message": str(e)}


def main(argv=None) -> int:
    args = parse_args(sys.argv[1:] if argv is None else argv)
    try:
        if args.json is not None:
            params = json.loads(args.json)
        elif args.input and args.input != "-":
            with open(args.input) as f:
                params = json.load(f)
        elif args.input == "-":
            params = json.load(sys.stdin)
        else:
            params = {}
    except (json.JSONDecodeError, OSError) as e:
        print(json.dumps({"error": "schema", "message": str(e)}))
        return EXIT_INPUT
    status, doc = run(args.command, params, args)
    if args.command == "acceptance" and status == EXIT_OK and not doc["all_passed"]:
        status = EXIT_FAIL
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    if status != EXIT_OK and "message" in doc:
        print(f"arith-sw: {doc['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
