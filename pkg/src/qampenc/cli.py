"""Command-line front end.

Every output starts with a metadata record (tool version, full config,
seed): a top-level ``meta`` key for JSON, a ``# meta {...}`` line for CSV.
Exit codes: 0 success, 2 invalid input, 3 internal invariant broken.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND, set_threads
from .errors import InvariantError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 2, 3


def _ints(text):
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _meta(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}
    return {"tool": "qampenc", "version": __version__, "backend": BACKEND,
            "config": cfg, "seed": getattr(args, "seed", None)}


def _json_out(args, payload):
    return json.dumps({"meta": _meta(args), **payload}, indent=1, sort_keys=True) + "\n"


def _csv_out(args, body):
    from .fileio import meta_line
    return meta_line(_meta(args)) + body


def _load(args):
    from .fileio import read_vector
    return read_vector(args.input)


def _pairs(z):
    return [[float(x.real), float(x.imag)] for x in np.asarray(z, dtype=np.complex128)]


# -- subcommands ---------------------------------------------------------------

def cmd_preprocess(args):
    from .preprocess import preprocess
    res = preprocess(_load(args), args.L, complex_split=args.complex)
    d = res.to_dict()
    if res.split is not None:
        d["B_R"] = d.pop("B")
    return _json_out(args, {"preprocess": d})


def _plan(args, values):
    from .encoder import build_plan
    from .preprocess import preprocess
    pre = preprocess(values, args.L, complex_split=args.complex)
    if pre.split is not None:
        return pre, build_plan(pre.split.B_R, args.M, pre.split.B_phi)
    return pre, build_plan(pre.B, args.M)


def cmd_encode(args):
    from .encoder import reduce_dense, run_branch_sim, run_dense_oracle
    from .simcore import fidelity
    pre, plan = _plan(args, _load(args))
    red, cps = run_branch_sim(plan, checkpoints=True)
    out = {"encode": red.to_dict()}
    out["encode"].update({"N": plan.N, "M": plan.M, "L": plan.L, "R": plan.R,
                          "qubits_declared": plan.qubits_declared, "qubits_total": plan.num_qubits,
                          "rho_circuit": pre.rho_circuit})
    flags = {}
    for cp in cps:
        if cp.name in ("psi4", "psi6") and cp.chunk == 0:
            flags[cp.name] = {"a0": _pairs(cp.a0), "a1": _pairs(cp.a1)}
    out["encode"]["checkpoints_chunk0"] = flags
    if args.dense_oracle:
        dense = run_dense_oracle(plan)
        dred, leak = reduce_dense(plan, dense)
        f = fidelity(dred.state, red.state)
        out["dense_oracle"] = {"fidelity": f, "ancilla_leak": leak,
                               "result": "match" if f >= 1 - 1e-9 and leak <= 1e-10 else "mismatch"}
    return _json_out(args, out)


def cmd_amplify(args):
    from .amplify import run_amplified_encoding
    _, plan = _plan(args, _load(args))
    res = run_amplified_encoding(plan)
    return _json_out(args, {"amplify": res.to_dict()})


def cmd_resources(args):
    from .resources import estimate_params, to_csv
    n = args.n
    N = 1 << n
    Ms = args.M if args.M else [1 << k for k in range(n + 1)]
    rho = args.rho if args.rho is not None else 1.0 / N
    ests = [estimate_params(n, M, args.L, rho) for M in Ms]
    if args.format == "csv":
        return _csv_out(args, to_csv(ests))
    return _json_out(args, {"resources": [e.to_dict() for e in ests]})


def cmd_sphere_stats(args):
    from .randstats import scaling_report, to_csv
    rows, trends = scaling_report(args.N, args.count, args.seed)
    if args.format == "json":
        return _json_out(args, {"sphere_stats": rows, "trends": trends})
    return _csv_out(args, to_csv(rows))


def cmd_image_density(args):
    from .imagery import curve_csv, density_scaling_curve, load_pgm, sector_density
    with open(args.input, "rb") as fh:
        img = load_pgm(fh.read())
    grids = args.grid
    if len(grids) == 1:
        g = sector_density(img, grids[0])
        if args.format == "csv":
            return _csv_out(args, g.to_csv())
        rho = [[None if math.isnan(x) else float(x) for x in row] for row in g.rho]
        return _json_out(args, {"image_density": {"n_s": g.n_s, "rho": rho, "mean_rho": g.mean_rho,
                                                  "undefined_sector_count": g.undefined_count}})
    rows, meta = density_scaling_curve(img, grids)
    if args.format == "csv":
        return _csv_out(args, curve_csv(rows))
    rows = [{k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in r.items()} for r in rows]
    meta["fit_anchors"] = {k: (None if isinstance(v, float) and math.isnan(v) else v)
                           for k, v in meta["fit_anchors"].items()}
    return _json_out(args, {"curve": rows, "curve_meta": meta})


def cmd_qft_check(args):
    from .qftdemo import run_qft_check
    from dataclasses import asdict
    rep = run_qft_check(_load(args), args.M, args.L, args.cutoff)
    return _json_out(args, {"qft_check": asdict(rep)})


# -- parser --------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="qampenc", description="Shallow amplitude encoder toolkit")
    p.add_argument("--version", action="version", version=f"qampenc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=("json",), vector=True):
        sp.add_argument("--output", "-o", help="write here instead of stdout")
        sp.add_argument("--format", choices=fmt, default=fmt[0])
        sp.add_argument("--threads", type=int, default=None, help="cap worker threads (else QAMPENC_THREADS)")
        if vector:
            sp.add_argument("--input", "-i", required=True, help="vector file (CSV or binary)")
            sp.add_argument("-L", type=int, default=6, help="bits per angle")
            sp.add_argument("--complex", action="store_true", help="modulus/phase encoding")

    sp = sub.add_parser("preprocess", help="angles, bit matrix B and densities")
    common(sp)
    sp.set_defaults(func=cmd_preprocess)

    for name, fn, hlp in (("encode", cmd_encode, "simulate the encoder"),
                          ("amplify", cmd_amplify, "encode and amplify"),
                          ("qft-check", cmd_qft_check, "encode, QFT, compare with the DFT")):
        sp = sub.add_parser(name, help=hlp)
        common(sp)
        sp.add_argument("-M", type=int, default=1, help="parallel index registers")
        if name == "encode":
            sp.add_argument("--dense-oracle", action="store_true", help="cross-check with the dense simulator")
        if name == "qft-check":
            sp.add_argument("--cutoff", type=int, default=None, help="drop QFT rotations 2pi/2^s with s > cutoff")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("resources", help="qubit and depth accounting")
    common(sp, ("csv", "json"), vector=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("-M", "--M", type=_ints, default=None, help="comma list (default powers of two)")
    sp.add_argument("-L", type=int, default=8)
    sp.add_argument("--rho", type=float, default=None, help="data density (default 1/N)")
    sp.set_defaults(func=cmd_resources)

    sp = sub.add_parser("sphere-stats", help="Monte Carlo max-share statistics")
    common(sp, ("csv", "json"), vector=False)
    sp.add_argument("--N", type=_ints, required=True, help="comma list of powers of two")
    sp.add_argument("--count", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_sphere_stats)

    sp = sub.add_parser("image-density", help="per-sector density of a PGM image")
    common(sp, ("csv", "json"), vector=False)
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--grid", type=_ints, required=True, help="sectors per side (comma list for a curve)")
    sp.set_defaults(func=cmd_image_density)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = args.threads if args.threads is not None else os.environ.get("QAMPENC_THREADS")
    try:
        if threads is not None:
            if int(threads) < 1:
                raise ValidationError("--threads must be >= 1")
            set_threads(int(threads))
        text = args.func(args)
    except (ValidationError, OSError) as e:
        print(f"qampenc: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except InvariantError as e:
        print(f"qampenc: internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
