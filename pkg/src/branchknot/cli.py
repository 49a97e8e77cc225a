"""Command-line front end.

Subcommands mirror the pipeline stages:

  analyze        validate input data, print orders/branch/plane geometry
  deform         sample generic parameters, build and save a family member
  double-points  locate self-intersections of the (possibly perturbed) map
  knot           trace the sphere slice, emit CSV polyline + braid JSON
  verify         run the full double-point / crossing-number identity check

Exit codes: 0 success, 2 input validation failure, 3 sampling exhausted,
4 identity violation, 5 slicing/braiding failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import deformation, intersect, knot
from .errors import (
    BranchOnSlice,
    BranchPointInRegion,
    ConformalityViolation,
    FormulaViolation,
    NonMonotoneFiberAngle,
    OpenCurve,
    OrderMismatch,
    OrderViolation,
    ProjectionPoleOnCurve,
    PushoffCollision,
    SamplingExhausted,
    TraceFailure,
)
from .weierstrass import WeierstrassData, branch_points, gauss_maps, symplectic_positivity

_EXIT_VALIDATION = 2
_EXIT_SAMPLING = 3
_EXIT_FORMULA = 4
_EXIT_TRACE = 5

_ERROR_CODES = [
    ((ConformalityViolation, OrderMismatch, OrderViolation,
      BranchPointInRegion, ValueError), _EXIT_VALIDATION),
    ((SamplingExhausted,), _EXIT_SAMPLING),
    ((FormulaViolation,), _EXIT_FORMULA),
    ((TraceFailure, OpenCurve, BranchOnSlice, NonMonotoneFiberAngle,
      PushoffCollision, ProjectionPoleOnCurve), _EXIT_TRACE),
]


def _dump(obj, path: Path | None, as_json: bool):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is not None:
        path.write_text(text + "\n")
    if as_json or path is None:
        print(text)


def _load_input(args) -> WeierstrassData:
    with open(args.input) as fh:
        data = json.load(fh)
    if args.tol:
        data["conf_tol"] = args.tol.get("conf_tol", data.get("conf_tol", 1e-10))
    return WeierstrassData.from_json_dict(data)


def _load_params(path: str) -> deformation.PerturbParams:
    with open(path) as fh:
        return deformation.PerturbParams.from_json_dict(json.load(fh))


def _orientation(args) -> int:
    return +1 if args.orientation == "+" else -1


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    w = _load_input(args)
    bps = branch_points(w)
    report = {
        "orders": [None if o is math.inf else int(o) for o in w.orders],
        "N": w.N,
        "branch_points": [[b.real, b.imag] for b in bps],
        "conformality_residual": w.conformality_residual(),
    }
    gauss = []
    for z in (0.3, 0.3j, -0.3, 0.2 + 0.2j):
        gp, gm = gauss_maps(w, z)
        def fmt(g):
            if g is None:
                return "undefined (degenerate chart)"
            return "inf" if g.at_infinity else [g.value.real, g.value.imag]
        gauss.append({"z": [z.real, z.imag],
                      "gamma_plus": fmt(gp), "gamma_minus": fmt(gm)})
    report["gauss_samples"] = gauss
    ring = 0.01 * np.exp(2j * np.pi * np.arange(32) / 32)
    report["symplectic_min_plus"] = min(symplectic_positivity(w, z, +1) for z in ring)
    report["symplectic_min_minus"] = min(symplectic_positivity(w, z, -1) for z in ring)

    out = Path(args.out_dir) / "analyze.json" if args.out_dir else None
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
    _dump(report, out, args.json)
    if not args.json:
        bp_text = ", ".join(f"{b:.4g}" for b in bps) if bps else "none"
        print(f"N={w.N} orders={report['orders']} branch_points=[{bp_text}] "
              f"conf_residual={report['conformality_residual']:.2e}",
              file=sys.stderr)
    return 0


def cmd_deform(args) -> int:
    w = _load_input(args)
    p = deformation.sample_generic(w, args.t, args.seed,
                                   orientation=_orientation(args))
    fm = deformation.build_family_member(w, p)
    ring = 0.3 * np.exp(2j * np.pi * np.arange(100) / 100)
    residual = deformation.gauss_invariance_residual(fm, ring)
    member = fm.to_json_dict()
    member["gauss_invariance_residual"] = residual
    out_dir = Path(args.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "params.json").write_text(
        json.dumps(p.to_json_dict(), indent=2, sort_keys=True) + "\n")
    _dump(member, out_dir / "member.json", args.json)
    if not args.json:
        print(f"gauss invariance residual: {residual:.3e}", file=sys.stderr)
    return 0


def cmd_double_points(args) -> int:
    w = _load_input(args)
    if args.params:
        fm = deformation.build_family_member(w, _load_params(args.params))
        w = fm.deformed
    dps = intersect.find_double_points(w, radius=args.radius,
                                       grid_n=args.grid_n,
                                       newton_tol=args.tol.get("newton_tol", 1e-12))
    payload = [dp.to_json_dict() for dp in dps]
    out = Path(args.out_dir) / "double_points.json" if args.out_dir else None
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
    _dump(payload, out, args.json)
    if not args.json:
        print(f"double points: {len(dps)}", file=sys.stderr)
    return 0


def cmd_knot(args) -> int:
    w = _load_input(args)
    if args.params:
        fm = deformation.build_family_member(w, _load_params(args.params))
        w = fm.deformed
    eta = args.eta if args.eta is not None else knot.select_eta(w)
    k = knot.trace_slice(w, eta)
    b = knot.braid_from_knot(k)
    e = knot.stable_crossing_number(k)
    lk = knot.linking_number_gauss(k)
    report = {
        "eta": eta,
        "n_strands": b.n_strands,
        "crossing_sum": e,
        "linking_gauss": lk,
        "self_linking": knot.self_linking(e, b.n_strands),
        "margin_plus": knot.contact_transversality_margin(k, +1),
        "margin_minus": knot.contact_transversality_margin(k, -1),
        "samples": int(k.samples.shape[0]),
    }
    out_dir = Path(args.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "knot.csv", "w", newline="") as fh:
        k.to_csv(fh)
    (out_dir / "braid.json").write_text(
        json.dumps(b.to_json_dict(), indent=2, sort_keys=True) + "\n")
    _dump(report, out_dir / "knot_report.json", args.json)
    if not args.json:
        print(f"winding={b.n_strands} e={e} gauss={lk:.3f}", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    w = _load_input(args)
    if args.params:
        p = _load_params(args.params)
    elif args.t is not None and w.N > 1:
        p = deformation.sample_generic(w, args.t, args.seed,
                                       orientation=_orientation(args))
    else:
        p = None
    eta = args.eta if args.eta is not None else knot.select_eta(w)
    try:
        report = knot.verify_double_point_formula(
            w, p, eta, radius=args.radius, grid_n=args.grid_n)
    except FormulaViolation as exc:
        if exc.report is not None:
            r = exc.report
            print(f"D={r.D} e={r.e} N={r.N} VIOLATION: {exc.args[0]}")
        raise
    print(f"D={report.D} e={report.e} N={report.N} sl={report.sl} OK")
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        _dump(report.to_json_dict(), out_dir / "verify.json", args.json)
    elif args.json:
        _dump(report.to_json_dict(), None, True)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _parse_tol(items) -> dict:
    out = {}
    for item in items or []:
        name, _, value = item.partition("=")
        v = float(value)
        if v <= 0:
            raise ValueError(f"tolerance {name} must be positive")
        out[name.replace("-", "_")] = v
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="branchknot", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, eta=False, deform=False, region=False):
        p.add_argument("--input", required=True, help="map data JSON file")
        p.add_argument("--out-dir", default=None, help="directory for output files")
        p.add_argument("--json", action="store_true",
                       help="print the JSON report to stdout")
        p.add_argument("--tol", action="append", metavar="NAME=VALUE",
                       help="tolerance override (repeatable)")
        if eta:
            p.add_argument("--eta", type=float, default=None,
                           help="slice radius (auto-scan when omitted)")
        if deform:
            p.add_argument("--t", type=float, default=None,
                           help="perturbation scale")
            p.add_argument("--seed", type=int, default=1, help="sampler seed")
            p.add_argument("--orientation", choices=["+", "-"], default="+")
            p.add_argument("--params", default=None,
                           help="explicit parameter JSON (overrides sampling)")
        if region:
            p.add_argument("--radius", type=float, default=0.5,
                           help="double-point search radius")
            p.add_argument("--grid-n", type=int, default=48,
                           help="seeding grid resolution")

    common(sub.add_parser("analyze", help="validate and summarize input data"))
    pd = sub.add_parser("deform", help="sample generic perturbation parameters")
    common(pd, deform=True)
    pdp = sub.add_parser("double-points", help="locate self-intersections")
    common(pdp, deform=True, region=True)
    pk = sub.add_parser("knot", help="trace the sphere slice and braid it")
    common(pk, eta=True, deform=True)
    pv = sub.add_parser("verify", help="check 2D = e - (N-1) end to end")
    common(pv, eta=True, deform=True, region=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.tol = _parse_tol(args.tol)
        if args.command == "deform" and args.t is None:
            raise SamplingExhausted("deform requires --t > 0")
        handler = {
            "analyze": cmd_analyze,
            "deform": cmd_deform,
            "double-points": cmd_double_points,
            "knot": cmd_knot,
            "verify": cmd_verify,
        }[args.command]
        return handler(args)
    except Exception as exc:
        for classes, code in _ERROR_CODES:
            if isinstance(exc, classes):
                print(f"{type(exc).__name__}: {exc.args[0] if exc.args else exc}",
                      file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
