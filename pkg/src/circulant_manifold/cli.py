"""Command-line interface: ``classify``, ``verify`` and ``components``.

Reports are JSON documents on stdout (``--json PATH`` also writes them to a
file).  Exit codes: 0 success, 1 input or domain error, 2 indeterminate
classification, 3 a cross-check exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .checks import run_checks
from .classifier import (DEFAULT_SAMPLES, DEFAULT_SEED, HOLD_TOLERANCE,
                         REJECT_MARGIN, ClassReport, SamplePlan, Tolerances,
                         classify, sample_points)
from .connection import christoffel_generic
from .corpus import NAMES, builtin
from .errors import CirculantError
from .expr import as_point
from .fundamental import f_closed, nijenhuis, theta_closed, theta_tilde
from .manifold import (MetricSpec, associated_metric_at, bundle_at,
                       inverse_closed, load_metric, metric_at, parse_box)

SCHEMA_VERSION = 1

EXIT_OK, EXIT_INPUT, EXIT_INDETERMINATE, EXIT_CHECK_FAILED = 0, 1, 2, 3


class InputError(Exception):
    pass


def _parse_consts(items: Sequence[str] | None) -> dict[str, float]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--const expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise InputError(f"--const {name}: {value!r} is not a number") from None
    return out


def resolve_metric(ref: str, constants: dict[str, float] | None = None) -> MetricSpec:
    """``builtin:<name>`` or a path to an ``.mspec`` file."""
    if ref.startswith("builtin:"):
        return builtin(ref.split(":", 1)[1], constants)
    return load_metric(ref, constants)


def _plan(args, spec: MetricSpec) -> SamplePlan:
    box = parse_box(args.box) if args.box else None
    return SamplePlan(n=args.samples, seed=args.seed, box=box or spec.box)


def _metric_block(ref: str, spec: MetricSpec) -> dict:
    return {
        "ref": ref,
        "name": spec.name,
        "A": str(spec.A), "B": str(spec.B), "C": str(spec.C),
        "constants": dict(sorted(spec.constants.items())),
        "domain": [str(c) for c in spec.domain],
    }


def _residual(r) -> dict:
    return {"absolute": r.absolute, "relative": r.relative}


def _header(command: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool": "circulant-manifold",
            "version": __version__, "command": command}


def _checks_block(results) -> dict:
    return {r.name: {"max_deviation": r.max_deviation, "tolerance": r.tolerance,
                     "passed": r.passed, "worst_point": list(r.worst_point)}
            for r in results}


def classify_report(ref: str, spec: MetricSpec, plan: SamplePlan, tol: Tolerances) -> tuple[dict, ClassReport]:
    report = classify(spec, plan, tol)
    cross = run_checks(spec, report.points)
    doc = _header("classify")
    doc.update({
        "metric": _metric_block(ref, spec),
        "seed": plan.seed,
        "samples": plan.n,
        "box": [list(r) for r in plan.box],
        "tolerances": {"hold": tol.hold, "reject": tol.reject},
        "most_specific": report.most_specific,
        "lattice_consistent": report.lattice_consistent,
        "indeterminate": report.indeterminate,
        "classes": {
            c: {"verdict": r.verdict, "residual": _residual(r.residual),
                "identity_verdict": r.identity_verdict, "identity": _residual(r.identity),
                "mismatches": r.mismatches}
            for c, r in report.results.items()
        },
        "identity_checks": {k: _residual(v) for k, v in report.identity_checks.items()},
        "theta_max": report.theta_max,
        "cross_checks": _checks_block(cross),
    })
    return doc, report


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False)
    print(text)
    if getattr(args, "json", None):
        Path(args.json).write_text(text + "\n")


def cmd_classify(args) -> int:
    if args.tolerance is not None and args.tolerance >= REJECT_MARGIN:
        raise InputError(f"--tolerance must be below the reject margin {REJECT_MARGIN}")
    tol = Tolerances(hold=args.tolerance if args.tolerance is not None else HOLD_TOLERANCE)
    spec = resolve_metric(args.metric, _parse_consts(args.const))
    doc, report = classify_report(args.metric, spec, _plan(args, spec), tol)
    _emit(doc, args)
    return EXIT_INDETERMINATE if report.indeterminate else EXIT_OK


def cmd_verify(args) -> int:
    refs = args.metric or [f"builtin:{n}" for n in NAMES]
    consts = _parse_consts(args.const)
    doc = _header("verify")
    doc.update({"seed": args.seed, "samples": args.samples, "metrics": []})
    ok = True
    for ref in refs:
        spec = resolve_metric(ref, consts if args.metric else None)
        plan = _plan(args, spec)
        results = run_checks(spec, sample_points(spec, plan), args.tolerance)
        passed = all(r.passed for r in results)
        ok &= passed
        doc["metrics"].append({
            "metric": _metric_block(ref, spec),
            "box": [list(r) for r in plan.box],
            "passed": passed,
            "max_deviation": max(r.max_deviation for r in results),
            "checks": _checks_block(results),
        })
    doc["passed"] = ok
    _emit(doc, args)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _matrix(m) -> list:
    return np.asarray(m, dtype=float).tolist()


def cmd_components(args) -> int:
    spec = resolve_metric(args.metric, _parse_consts(args.const))
    try:
        point = as_point(float(v) for v in args.point.split(","))
    except ValueError as exc:
        raise InputError(f"--point: {exc}") from None
    b = bundle_at(spec, point)
    ginv, inv = inverse_closed(b)
    th = theta_closed(b)
    doc = _header("components")
    doc.update({
        "metric": _metric_block(args.metric, spec),
        "point": list(point),
        "layout": {
            "matrices": "m[i][j], indices 1..4 in order",
            "christoffel": "gamma[k][i][j] = Gamma^k_ij",
            "F": "F[i][j][k] = F(e_i, e_j, e_k)",
            "nijenhuis": "N[i][j][k] = N_ij^k",
        },
        "jets": {c: {"value": getattr(b, c).value, "partials": list(getattr(b, c).grad)}
                 for c in "ABC"},
        "g": _matrix(metric_at(b)),
        "g_tilde": _matrix(associated_metric_at(b)),
        "g_inverse": _matrix(ginv),
        "inverse_data": {"Abar": inv.Abar, "Bbar": inv.Bbar, "Cbar": inv.Cbar, "D": inv.D},
        "christoffel": _matrix(christoffel_generic(b).gamma),
        "F": _matrix(f_closed(b).F),
        "theta": _matrix(th.theta),
        "theta_tilde": _matrix(theta_tilde(th).theta),
        "nijenhuis": _matrix(nijenhuis(b)),
    })
    _emit(doc, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circulant-manifold",
        description="Tensors and class membership of 4-dimensional circulant Riemannian product manifolds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, metric_required: bool):
        if metric_required:
            p.add_argument("--metric", required=True,
                           help="builtin:<name> (one of %s) or an .mspec file" % ", ".join(NAMES))
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--box", nargs="+", metavar="LO:HI",
                       help="sampling box, one range for all coordinates or four")
        p.add_argument("--const", action="append", metavar="NAME=VALUE",
                       help="override a constant declared by the metric (repeatable)")
        p.add_argument("--tolerance", type=float, default=None)
        p.add_argument("--json", metavar="PATH", help="also write the report to PATH")

    p = sub.add_parser("classify", help="decide class membership from sampled points")
    common(p, True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="check closed forms against first-principles oracles")
    common(p, False)
    p.add_argument("--metric", action="append",
                   help="metric to check (repeatable; default: every builtin)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("components", help="dump every tensor at one point")
    common(p, True)
    p.add_argument("--point", required=True, metavar="X1,X2,X3,X4")
    p.set_defaults(func=cmd_components)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.samples < 1:
            raise InputError("--samples must be at least 1")
        return args.func(args)
    except (InputError, CirculantError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
