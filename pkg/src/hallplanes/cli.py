"""Command-line entry point.

Every command builds one plane, runs one computation and emits a report
(JSON by default).  Expected verdicts ship in ``claims.json``; the exit code
is 0 when every applicable claim and internal check holds, 1 when one fails
and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources

import numpy as np

from . import __version__, collineations, configs, constructions, kernels
from .coordsys import (
    HallPlaneError,
    HallSystem,
    QuadraticExtension,
    build_field,
    field_axiom_report,
    quasifield_report,
)
from .plane import BF, NBF, axiom_report, build_plane, export_incidence

SEED = 0
PAIR_CHOICES = ("canonical", "infinity", "canonical+infinity", "all")
SWEEP_TARGETS = constructions.CASE_TAGS + tuple(constructions.FAMILIES) + ("all",)


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument parsing


def _common(sub_parser):
    g = sub_parser.add_argument_group("plane")
    g.add_argument("--p", type=int, default=3, help="characteristic of the base field (default 3)")
    g.add_argument("--k", type=int, default=1, help="degree of the base field over F_p (default 1)")
    g.add_argument("--r", type=int, default=None, help="index of r in f(x) = x^2 - r x - s (default auto)")
    g.add_argument("--s", type=int, default=None, help="index of s in f(x) = x^2 - r x - s (default auto)")
    g.add_argument("--oracle", action="store_true", help="use the field plane of the same order")
    o = sub_parser.add_argument_group("output")
    o.add_argument("--out", default=None, help="write the report (or the incidence file) here")
    o.add_argument("--format", choices=("json", "text"), default="json")
    o.add_argument("--claims", default=None, help="claims manifest (default: the bundled one)")


def _search(sub_parser):
    g = sub_parser.add_argument_group("search")
    g.add_argument("--pairs", choices=PAIR_CHOICES, default="canonical")
    g.add_argument("--mode", choices=configs.MODES, default="nondegenerate")
    g.add_argument("--points", choices=configs.REGIMES, default="affine")
    g.add_argument("--budget", type=int, default=None, help="cap on outer search instances per pair")
    g.add_argument("--jobs", type=int, default=1, help="worker threads per pair")
    g.add_argument("--backend", choices=("auto", "cython", "python"), default="auto")


def _sampling(sub_parser):
    sub_parser.add_argument("--sample", type=int, default=None, help="random sample size instead of exhaustive")
    sub_parser.add_argument("--seed", type=int, default=SEED)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hallplanes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hallplanes {__version__}")
    top = parser.add_subparsers(dest="command", required=True)

    plane = top.add_parser("plane", help="build or export a plane")
    plane_sub = plane.add_subparsers(dest="target", required=True)
    _common(plane_sub.add_parser("build", help="build the plane and report its counts"))
    _common(plane_sub.add_parser("export", help="write the incidence file"))

    suite = top.add_parser("suite", help="axiom and collineation checks")
    suite_sub = suite.add_subparsers(dest="target", required=True)
    for name, text in (("axioms", "field, quasifield and plane axioms"), ("groups", "collineation groups")):
        p = suite_sub.add_parser(name, help=text)
        _common(p)
        _sampling(p)

    question = top.add_parser("question", help="answer a k+m question on line pairs")
    question.add_argument("target", choices=configs.QUESTIONS)
    _common(question)
    _search(question)

    sweep = top.add_parser("sweep", help="sweep a construction over every parameter assignment")
    sweep.add_argument("target", choices=SWEEP_TARGETS, metavar="case",
                       help="case tag, family name or 'all': " + ", ".join(SWEEP_TARGETS))
    _common(sweep)
    _sampling(sweep)

    witness = top.add_parser("witness", help="search for a configuration")
    witness.add_argument("target", choices=("desargues", "non-pappus"))
    _common(witness)
    witness.add_argument("--exhaustive", action="store_true",
                         help="non-pappus: fall back to every line pair after the orbit representatives")
    witness.add_argument("--backend", choices=("auto", "cython", "python"), default="auto")
    return parser


# --------------------------------------------------------------------------
# helpers


def jsonable(x):
    """Recursively convert numpy scalars, arrays and tuples to JSON types."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.str_):
        return str(x)
    return x


def make_plane(args):
    try:
        F = build_field(args.p, args.k)
    except HallPlaneError as exc:
        raise UsageError(str(exc)) from None
    if (args.r is None) != (args.s is None):
        raise UsageError("--r and --s must be given together")
    if args.r is not None and not (0 <= args.r < F.q and 0 <= args.s < F.q):
        raise UsageError(f"--r and --s must be element indices in 0..{F.q - 1}")
    cls = QuadraticExtension if args.oracle else HallSystem
    try:
        H = cls(F, args.r, args.s)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return build_plane(H)


def plane_spec(plane) -> dict:
    H = plane.coords
    F = H.basefield
    return {"p": F.p, "k": F.k, "q": H.q, "order": H.n, "r": H.r, "s": H.s, "kind": H.kind}


def load_claims(path=None) -> list[dict]:
    if path is None:
        text = resources.files("hallplanes").joinpath("claims.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)["claims"]


def _backend(args):
    name = getattr(args, "backend", "auto")
    if name == "auto":
        return None
    if name not in kernels.available():
        raise UsageError(f"backend {name!r} not available (have {kernels.available()})")
    return name


# --------------------------------------------------------------------------
# commands


def cmd_plane(args, plane) -> dict:
    counts = {
        "points": plane.num_points,
        "lines": plane.num_lines,
        "affine_points": plane.num_affine_points,
        "affine_lines": plane.num_affine_lines,
        "bf_lines": int((plane.line_class == BF).sum()),
        "nbf_lines": int((plane.line_class == NBF).sum()),
        "points_per_line": int(plane.line_points.shape[1]),
    }
    if args.target == "build":
        return {"counts": counts}
    if args.out is None:
        raise UsageError("plane export needs --out")
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        export_incidence(plane, fh)
    return {"counts": counts, "incidence_file": args.out, "rows": plane.num_lines}


def cmd_suite(args, plane) -> dict:
    H = plane.coords
    if args.target == "axioms":
        field = field_axiom_report(H.basefield)
        quasi = quasifield_report(H)
        sample = args.sample
        if sample is None and H.q > 3:
            sample = 20000
        geo = axiom_report(plane, sample=sample, seed=args.seed)
        required = ("f_rootless", "identity", "right_distributive", "left_multiplication_bijective",
                    "solve_right_factor_inverts")
        geo_flags = [v for k, v in geo.items() if isinstance(v, bool)]
        ok = all(field.values()) and all(quasi[k] for k in required) and all(geo_flags)
        return {"field": field, "coordinates": quasi, "plane": geo, "ok": ok,
                "commutative": quasi["non_commutative_witness"] is None,
                "associative": quasi["non_associative_witness"] is None,
                "left_distributive": quasi["non_left_distributive_witness"] is None}
    gens = collineations.group_generators(plane)
    gen_ok = [collineations.line_action_matches_points(plane, g) for g in gens]
    out = {"generators": {"count": len(gens), "preserve_incidence": all(gen_ok)}}
    if H.kind != "hall":
        out["ok"] = None
        out["note"] = "group checks describe the Hall plane"
        return out
    out["propositions"] = collineations.verify_group_propositions(plane)
    out["stabilizer_matrices"] = collineations.verify_stabilizers(H)
    out["line_stabilizers"] = collineations.verify_line_stabilizers(plane, sample=args.sample, seed=args.seed)
    canon_sample = args.sample if args.sample is not None else (None if H.q <= 3 else 500)
    out["canonicalization"] = collineations.verify_canonicalization(plane, sample=canon_sample, seed=args.seed)
    out["ok"] = all(gen_ok) and all(
        out[k]["ok"] for k in ("propositions", "stabilizer_matrices", "line_stabilizers", "canonicalization")
    )
    return out


def cmd_question(args, plane, timing) -> dict:
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    if args.budget is not None and args.budget < 1:
        raise UsageError("--budget must be positive")
    verdicts = configs.run_question(plane, args.target, args.pairs, mode=args.mode, points=args.points,
                                    jobs=args.jobs, budget=args.budget, backend=_backend(args))
    timing["per_pair"] = [round(v.elapsed, 6) for v in verdicts]
    rows = []
    for v in verdicts:
        d = v.to_dict()
        d.pop("elapsed")
        rows.append(d)
    return {
        "question": args.target,
        "pairs": args.pairs,
        "mode": args.mode,
        "points": args.points,
        "budget": args.budget,
        "summary": configs.summarize(verdicts),
        "witness_replay": all(configs.replay(plane, v) for v in verdicts),
        "verdicts": rows,
        "_verdicts": verdicts,
    }


def cmd_sweep(args, plane) -> dict:
    H = plane.coords
    if H.kind != "hall":
        raise UsageError("construction sweeps are defined on the Hall plane")
    if args.target == "all":
        families = list(constructions.FAMILIES)
    elif args.target in constructions.FAMILIES:
        families = [args.target]
    else:
        families = []
    if families:
        parts = [constructions.sweep_family(H, f, sample=args.sample, seed=args.seed) for f in families]
        cases = [c for p in parts for c in p["cases"]]
    else:
        s = constructions.public_summary(constructions.sweep_case(H, args.target, sample=args.sample,
                                                                  seed=args.seed))
        parts, cases = [], [s]
    ok = all(c["all_pappus"] and c["formulas_agree"] and c["pappus_line_as_claimed"] for c in cases)
    return {"target": args.target, "sample": args.sample, "families": parts if families else None,
            "cases": cases if not families else None, "ok": ok}


def cmd_witness(args, plane) -> dict:
    if args.target == "desargues":
        try:
            w = configs.exists_desargues(plane)
        except configs.NotFound:
            return {"found": False, "witness": None, "verified": True}
        lines = configs.desargues_lines(plane, w)
        return {"found": True, "witness": w.to_dict(), "lines": lines,
                "verified": configs.verify_desargues(plane, w)}
    searched = "all line pairs" if args.exhaustive else "one line pair per orbit"
    try:
        s = configs.find_non_pappus_witness(plane, exhaustive=args.exhaustive, backend=_backend(args))
    except configs.NotFound:
        return {"found": False, "searched": searched, "witness": None, "verified": True}
    out = configs.pappus_check(plane, s)
    return {"found": True, "searched": searched,
            "witness": {"l1": s.l1, "l2": s.l2, "points": list(s.points),
                        "cross_points": [out.A3, out.B3, out.C3]},
            "verified": not out.is_pappus}


# --------------------------------------------------------------------------
# claims


def _applies(claim, command, target, spec, opts) -> bool:
    if claim["command"] != command:
        return False
    if claim.get("target") is not None and claim["target"] != target:
        return False
    if claim.get("kind") is not None and claim["kind"] != spec["kind"]:
        return False
    if claim.get("q") is not None and spec["q"] not in claim["q"]:
        return False
    if spec["q"] < claim.get("min_q", 0):
        return False
    for key in ("mode", "points"):
        if claim.get(key) is not None and opts.get(key) not in (None, claim[key]):
            return False
    return True


def _question_status(claim, result):
    verdicts = [v for v in result["_verdicts"]
                if ("infinity" if v.case == collineations.INVOLVES_INFINITY else "affine") in claim["groups"]]
    if not verdicts:
        return None, None
    expect = claim["expect"]
    if "each_pair_affirmed" in expect:
        want = expect["each_pair_affirmed"]
        wrong = [v for v in verdicts if v.affirmed is not want and (v.exhaustive or v.affirmed is False)]
        if wrong:
            return "failed", {"pair": list(wrong[0].pair), "witness": wrong[0].witness}
        if any(not v.exhaustive for v in verdicts):
            return "inconclusive", None
        return "reproduced", None
    want = expect["affirmed"]
    failing = [v for v in verdicts if v.affirmed is False]
    if want:
        if failing:
            return "failed", {"pair": list(failing[0].pair), "witness": failing[0].witness}
        if any(not v.exhaustive for v in verdicts):
            return "inconclusive", None
        return "reproduced", None
    if failing:
        return "reproduced", {"pair": list(failing[0].pair), "witness": failing[0].witness}
    if any(not v.exhaustive for v in verdicts):
        return "inconclusive", None
    return "failed", {"pair": None, "witness": None}


def evaluate_claims(claims, command, target, spec, opts, result) -> list[dict]:
    out = []
    for claim in claims:
        if not _applies(claim, command, target, spec, opts):
            continue
        detail = None
        if command == "question":
            status, detail = _question_status(claim, result)
            if status is None:
                continue
        elif command == "witness":
            found = result["found"] and result["verified"]
            status = "reproduced" if found == claim["expect"]["found"] else "failed"
            if status == "failed":
                detail = {"witness": result.get("witness")}
        else:
            if any(result.get(k) is None for k in claim["expect"]):
                continue
            held = all(result[k] == v for k, v in claim["expect"].items())
            status = "reproduced" if held else "failed"
        out.append({"id": claim["id"], "statement": claim["statement"], "status": status, "detail": detail})
    return out


def internal_checks(command, result) -> list[dict]:
    if command == "question":
        return [{"id": "witness-replay", "ok": result["witness_replay"]}]
    if command == "witness":
        return [{"id": "witness-verified", "ok": result["verified"]}]
    return []


# --------------------------------------------------------------------------
# output


def render_text(x, indent=0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(x, dict):
        for k, v in x.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(x, list):
        for v in x:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(x))
    return "\n".join(lines)


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(e, (dict, list)) for e in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(e) for e in v) + "]"
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def serialize(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=False) + "\n"
    return render_text(report) + "\n"


# --------------------------------------------------------------------------
# main


def run(args) -> dict:
    t0 = time.perf_counter()
    plane = make_plane(args)
    spec = plane_spec(plane)
    claims = load_claims(args.claims)
    timing: dict = {}
    if args.command == "plane":
        result = cmd_plane(args, plane)
    elif args.command == "suite":
        result = cmd_suite(args, plane)
    elif args.command == "question":
        result = cmd_question(args, plane, timing)
    elif args.command == "sweep":
        result = cmd_sweep(args, plane)
    else:
        result = cmd_witness(args, plane)
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "target", "out", "format", "claims")}
    verdicts = evaluate_claims(claims, args.command, args.target, spec, opts, result)
    checks = internal_checks(args.command, result)
    failed = [c["id"] for c in verdicts if c["status"] == "failed"] + [c["id"] for c in checks if not c["ok"]]
    result = {k: v for k, v in result.items() if not k.startswith("_")}
    timing["wall_time"] = round(time.perf_counter() - t0, 6)
    return jsonable({
        "tool": "hallplanes",
        "version": __version__,
        "plane": spec,
        "command": [args.command, args.target],
        "options": opts,
        "seed": getattr(args, "seed", SEED),
        "result": result,
        "claims": verdicts,
        "checks": checks,
        "failed": failed,
        "exit_code": 1 if failed else 0,
        "timing": timing,
    })


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = run(args)
    except UsageError as exc:
        print(f"hallplanes: error: {exc}", file=sys.stderr)
        return 2
    text = serialize(report, args.format)
    if args.out is not None and args.command != "plane":
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for c in report["claims"]:
        if c["status"] == "failed":
            print(f"hallplanes: claim {c['id']} failed: {c['statement']} {json.dumps(c['detail'])}",
                  file=sys.stderr)
    for c in report["checks"]:
        if not c["ok"]:
            print(f"hallplanes: check {c['id']} failed", file=sys.stderr)
    return report["exit_code"]


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
