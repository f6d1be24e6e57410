"""Batch front door: every experiment as a subcommand emitting a canonical
JSON report.

Exit codes: 0 success, 1 internal fault or bad configuration, 2 budget
refusal.  Flags may be preloaded from a JSON config file; explicit flags win.
Reports are byte-identical for a fixed config and seed; pass --timing to
attach wallclock (which intentionally breaks that identity).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .errors import BudgetExceeded, ContainmentError
from .fields import PrimeField
from .gates import run_all_gates, sample_tasks_for_type, _run_sample, SAMPLING_PRIME
from .incidence import (
    CIType,
    CompleteIntersection,
    curve_from_json,
    decompose_along_curve,
    enumerate_conics_on,
    enumerate_lines_on,
    expected_dims,
    fermat_hypersurface,
    jacobian_tangent_dim,
    normal_bundle_cohomology,
    random_complete_intersection,
    restrict_to_conic,
    restrict_to_line,
    split_quadric,
    threshold_warnings,
)
from .moduli import LineChartPoint
from .multlab import KIND_BY_NAME, exhaustive_dichotomy_scan
from .reporting import canonical_json, default_workers, make_report, parallel_map
from .schubert import conic_count_report, line_count_report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="fanolab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--config", help="JSON file with default flag values")
        p.add_argument("--timing", action="store_true", help="attach wallclock seconds")

    p = sub.add_parser("expected-dims", help="dimension formulas and range flags")
    p.add_argument("--n", type=int)
    p.add_argument("--type", dest="type_")
    common(p)

    p = sub.add_parser("count-lines", help="Grassmannian line count (expected dim 0)")
    p.add_argument("--n", type=int)
    p.add_argument("--type", dest="type_")
    common(p)

    p = sub.add_parser("count-conics", help="conic count over the quadric bundle (expected dim 0)")
    p.add_argument("--n", type=int)
    p.add_argument("--type", dest="type_")
    common(p)

    p = sub.add_parser("lemma-scan", help="exhaustive multiplication-map dichotomy scan")
    p.add_argument("--kind", choices=sorted(KIND_BY_NAME))
    p.add_argument("--type", dest="type_")
    p.add_argument("--q", type=int)
    p.add_argument("--budget", type=int, default=300_000)
    common(p)

    for name, what in (("enumerate-lines", "lines"), ("enumerate-conics", "conics")):
        p = sub.add_parser(name, help=f"exhaustive census of {what} on a fixture surface")
        p.add_argument("--n", type=int)
        p.add_argument("--type", dest="type_")
        p.add_argument("--q", type=int)
        p.add_argument("--fermat", action="store_true", help="use the Fermat form of the given degree")
        p.add_argument("--split-quadric", dest="split_quadric", action="store_true")
        p.add_argument("--seed", type=int, help="seeded random complete intersection")
        p.add_argument("--fixture", help="JSON fixture with the complete intersection")
        p.add_argument("--budget", type=int, default=200_000)
        common(p)

    p = sub.add_parser("smoothness-sample", help="seeded h1 = 0 sampling for one type")
    p.add_argument("--n", type=int)
    p.add_argument("--type", dest="type_")
    p.add_argument("--curve", choices=["lines", "smooth", "pair", "double", "all"], default="all")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--p", type=int, default=SAMPLING_PRIME)
    p.add_argument("--workers", type=int)
    common(p)

    p = sub.add_parser("analyze-curve", help="containment, cohomology, and rank data for one curve")
    p.add_argument("--fixture", required=True, help="complete intersection JSON")
    p.add_argument("--curve-file", required=True, help="curve JSON (line or conic chart point)")
    common(p)

    p = sub.add_parser("verify-suite", help="run the full acceptance grid")
    p.add_argument("--budget", type=int, default=300_000)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--workers", type=int)
    p.add_argument("--inject-fault", action="store_true", help="test-only: corrupt a fixture")
    common(p)

    return parser


def _merge_config(args):
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            defaults = json.load(fh)
        for key, value in defaults.items():
            attr = key.replace("-", "_")
            if getattr(args, attr, None) in (None, False):
                setattr(args, attr, value)
    return args


def _parse_type(args) -> CIType:
    if args.n is None or args.type_ is None:
        raise ValueError("--n and --type are required")
    degrees = tuple(int(x) for x in str(args.type_).split(","))
    return CIType(args.n, degrees)


def _surface(args) -> CompleteIntersection:
    t = _parse_type(args)
    if args.fixture:
        return CompleteIntersection.load(args.fixture)
    if args.q is None:
        raise ValueError("--q is required unless a fixture is given")
    field = PrimeField(args.q)
    if args.fermat:
        if t.c != 1:
            raise ValueError("--fermat needs a single degree")
        return fermat_hypersurface(field, t.n, t.degrees[0])
    if args.split_quadric:
        if t.degrees != (2,):
            raise ValueError("--split-quadric needs type 2")
        return split_quadric(field, t.n)
    if args.seed is not None:
        return random_complete_intersection(field, t, args.seed)
    raise ValueError("pick a surface: --fermat, --split-quadric, --seed, or --fixture")


def _config_echo(args) -> dict:
    skip = {"command", "out", "config", "timing", "func"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        out[key.rstrip("_")] = value
    return out


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def cmd_expected_dims(args):
    t = _parse_type(args)
    dims = expected_dims(t)
    return {"expected_dims": dims.to_json(), "type": t.label()}, threshold_warnings(t), 0


def cmd_count_lines(args):
    t = _parse_type(args)
    count, expansion = line_count_report(t)
    if t.expected_dim_lines() != 0:
        raise ValueError("line count needs expected dimension 0")
    return {
        "line_count": count,
        "schur_expansion": {f"{a},{b}": c for (a, b), c in sorted(expansion.items())},
    }, threshold_warnings(t), 0


def cmd_count_conics(args):
    t = _parse_type(args)
    a, b, expansion = conic_count_report(t)
    return {
        "conic_count": a,
        "paths": {"segre": a, "reduce": b},
        "schur_expansion": {",".join(map(str, lam)): c for lam, c in sorted(expansion.items())},
    }, threshold_warnings(t), 0


def cmd_lemma_scan(args):
    if args.kind is None or args.q is None:
        raise ValueError("--kind and --q are required")
    degrees = tuple(int(x) for x in str(args.type_).split(","))
    kind = KIND_BY_NAME[args.kind]
    rep = exhaustive_dichotomy_scan(kind, degrees, args.q, budget=args.budget)
    return rep.to_json(), [], 0


def cmd_enumerate_lines(args):
    X = _surface(args)
    lines = enumerate_lines_on(X, budget=args.budget)
    unobstructed = all(l.h0 == 0 and l.h1 == 0 for l in lines)
    return {
        "line_count": len(lines),
        "all_unobstructed": unobstructed,
        "lines": [
            {"point": l.line.to_json(), "h0": l.h0, "h1": l.h1, "smooth_point": l.smooth_point}
            for l in lines
        ],
    }, threshold_warnings(X.ci_type), 0


def cmd_enumerate_conics(args):
    X = _surface(args)
    census = enumerate_conics_on(X, budget=args.budget)
    by_kind = {}
    for rec in census.conics:
        by_kind[rec.kind.value] = by_kind.get(rec.kind.value, 0) + 1
    warnings = threshold_warnings(X.ci_type)
    if census.contained_planes:
        warnings = warnings + [
            f"{len(census.contained_planes)} plane(s) lie inside X; their conic families were skipped"
        ]
    return {
        "conic_count": len(census.conics),
        "by_kind": by_kind,
        "planes_scanned": census.planes_scanned,
        "contained_planes": len(census.contained_planes),
        "conics": [
            {
                "point": rec.conic.to_json(),
                "kind": rec.kind.value,
                "h0": rec.h0,
                "h1": rec.h1,
            }
            for rec in census.conics
        ],
    }, warnings, 0


def cmd_smoothness_sample(args):
    t = _parse_type(args)
    kinds = ("lines", "smooth", "pair", "double") if args.curve == "all" else (args.curve,)
    workers = args.workers if args.workers is not None else default_workers()
    results = {}
    for kind in kinds:
        tasks = sample_tasks_for_type(t, (kind,), args.samples, p=args.p)
        records = parallel_map(_run_sample, tasks, workers)
        results[kind] = {
            "samples": len(records),
            "h1_zero": sum(1 for r in records if r.h1 == 0),
            "euler_identity_holds": all(r.h0 - r.h1 == r.expected for r in records),
        }
    return {"type": t.label(), "p": args.p, "curves": results}, threshold_warnings(t), 0


def cmd_analyze_curve(args):
    X = CompleteIntersection.load(args.fixture)
    with open(args.curve_file, encoding="utf-8") as fh:
        curve = curve_from_json(json.load(fh))
    is_line = isinstance(curve, LineChartPoint)
    vecs = restrict_to_line(X, curve) if is_line else restrict_to_conic(X, curve)
    contained = all(c == 0 for vec in vecs for c in vec)
    results = {"curve": "line" if is_line else "conic", "contained": contained}
    if contained:
        dec_f = decompose_along_curve(X, curve, order="forward")
        dec_r = decompose_along_curve(X, curve, order="reverse")
        rep = normal_bundle_cohomology(X, curve)
        rk = rep.rank_report
        results.update(
            {
                "decomposition_identity": dec_f.verify_identity(X),
                "restrictions_order_independent": dec_f.restrictions == dec_r.restrictions,
                "cohomology": rep.to_json(),
                "rank_along_curve": {
                    "min_rank": rk.min_rank,
                    "smooth_certified": rk.smooth_certified,
                    "witnesses": [
                        {"component": w[0], "point": repr(w[1]), "ext_degree": w[2]}
                        for w in rk.witnesses
                    ],
                    "scan": rk.scan,
                },
                "jacobian_tangent_dim": jacobian_tangent_dim(X, curve),
            }
        )
    return results, [], 0


def cmd_verify_suite(args):
    workers = args.workers if args.workers is not None else default_workers()
    results, code = run_all_gates(
        budget=args.budget, samples=args.samples, workers=workers, inject_fault=args.inject_fault
    )
    payload = {"gates": [r.to_json() for r in results]}
    if code == 1:
        failed = [r.name for r in results if not r.passed and not r.skipped]
        payload["failed_gates"] = failed
    return payload, [], code


HANDLERS = {
    "expected-dims": cmd_expected_dims,
    "count-lines": cmd_count_lines,
    "count-conics": cmd_count_conics,
    "lemma-scan": cmd_lemma_scan,
    "enumerate-lines": cmd_enumerate_lines,
    "enumerate-conics": cmd_enumerate_conics,
    "smoothness-sample": cmd_smoothness_sample,
    "analyze-curve": cmd_analyze_curve,
    "verify-suite": cmd_verify_suite,
}


def run(argv) -> tuple[str, int]:
    """Parse, dispatch, and serialize; returns (report text, exit code)."""
    parser = build_parser()
    args = _merge_config(parser.parse_args(argv))
    start = time.time()
    try:
        results, warnings, code = HANDLERS[args.command](args)
    except BudgetExceeded as exc:
        report = make_report(args.command, _config_echo(args), {"error": str(exc)}, ["budget refused"])
        return canonical_json(report), 2
    except (ValueError, ContainmentError, OSError, KeyError) as exc:
        report = make_report(args.command, _config_echo(args), {"error": str(exc)}, ["fault"])
        return canonical_json(report), 1
    wall = time.time() - start if args.timing else None
    report = make_report(args.command, _config_echo(args), results, warnings, wallclock=wall)
    return canonical_json(report), code


def run_for_bytes(argv) -> bytes:
    text, _code = run(argv)
    return text.encode("utf-8")


def main(argv=None) -> int:
    try:
        text, code = run(argv if argv is not None else sys.argv[1:])
    except SystemExit as exc:
        return int(exc.code or 0)
    args_out = None
    argv_list = argv if argv is not None else sys.argv[1:]
    if "--out" in argv_list:
        args_out = argv_list[argv_list.index("--out") + 1]
    if args_out:
        with open(args_out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
