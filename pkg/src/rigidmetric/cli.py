"""Command-line front end.

Exit status: 0 when the command succeeds and the checked property holds,
1 when a property fails (the report carries a witness), 2 on bad input.
"""

from __future__ import annotations

import argparse
import dataclasses
import random
import sys
from pathlib import Path
from typing import Any, Sequence

from . import formats
from .amalgam import (
    amalgamate,
    amalgamate_pseudometric,
    oracle_pseudometric,
    quotient_to_metric,
    restriction_failures,
    verify_hub_formulas,
)
from .construct import BudgetExceeded, ConstructionConfig, build_stages, rigidity_report, trace_failures
from .discrete import (
    MIDDLE,
    WEAK,
    attach_discrete,
    discrete_character,
    discrete_character_bruteforce,
    find_middle_points,
)
from .extension import enumerate_extensions, f_extend
from .family import build_graph, induced_cycle_condition, path_weight, reduce_path
from .isometry import (
    Probe,
    enumerate_isometries,
    enumerate_isometries_bruteforce,
    generators,
    grid_probes,
    isometry_group,
    superuniversality_check,
)
from .rational import parse_grid, render_rat
from .space import MetricError, restrict, validate_space

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _labels(text: str) -> list[str]:
    return [p for p in (s.strip() for s in text.split(",")) if p]


def _sizes(text: str) -> dict[str, int]:
    """``"x=3,y=4"`` or a JSON file of ``{"x": 3}``."""
    if Path(text).is_file():
        doc = formats.load(text)
        if not isinstance(doc, dict):
            raise InputError("schedule file must hold an object of sizes")
        return {str(k): int(v) for k, v in doc.items()}
    out = {}
    for item in _labels(text):
        if "=" not in item:
            raise InputError(f"schedule item {item!r} is not of the form point=size")
        k, v = item.split("=", 1)
        out[k.strip()] = int(v)
    return out


def _grid(text: str):
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise InputError(f"--grid: {exc}") from None


def _emit(doc: Any, out: str | None) -> None:
    text = formats.dumps(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _space(path: str):
    return formats.space_from_json(formats.load(path), path)


# {{{ verbs


def cmd_validate(args) -> int:
    points, table, kind = formats.raw_space_from_json(formats.load(args.space), args.space)
    result = validate_space(points, table, kind)
    _emit(
        {
            "ok": result.ok,
            "violations": [
                {
                    "axiom": v.axiom,
                    "witness": list(v.witness),
                    "detail": v.detail,
                    **({"slack": render_rat(v.slack)} if v.slack is not None else {}),
                }
                for v in result.violations
            ],
        },
        args.out,
    )
    return EXIT_OK if result.ok else EXIT_FAIL


def cmd_restrict(args) -> int:
    _emit(formats.space_to_json(restrict(_space(args.space), _labels(args.points))), args.out)
    return EXIT_OK


def cmd_amalgamate(args) -> int:
    family = formats.family_from_json(formats.load(args.family))
    if family.hub is not None:
        result = amalgamate(family, oracle=args.oracle)
        doc = formats.amalgam_to_json(result)
        bad = verify_hub_formulas(result)
        doc["hub_formula_failures"] = [
            {"formula": f.formula, "members": [f.s, f.t], "witness": [f.x, f.y],
             "actual": render_rat(f.actual), "relayed": render_rat(f.relayed)}
            for f in bad
        ]
        _emit(doc, args.out)
        return EXIT_FAIL if bad else EXIT_OK
    graph = build_graph(family)
    cycles = induced_cycle_condition(family, graph)
    pseudo = oracle_pseudometric(family, graph) if args.oracle else amalgamate_pseudometric(family, graph)
    result = quotient_to_metric(pseudo, (), family)
    doc = formats.amalgam_to_json(result)
    doc["pseudometric"] = formats.space_to_json(pseudo)
    doc["induced_cycle_condition"] = {
        "holds": cycles.holds,
        "counterexample": list(cycles.counterexample) if cycles.counterexample else None,
    }
    fails = restriction_failures(pseudo, family)
    doc["restriction_failures"] = [
        {"member": s, "witness": [x, y], "member_distance": render_rat(a), "amalgam_distance": render_rat(b)}
        for s, x, y, a, b in fails
    ]
    _emit(doc, args.out)
    return EXIT_FAIL if (fails or not cycles.holds) else EXIT_OK


def cmd_extend(args) -> int:
    X = _space(args.space)
    if args.catalog:
        catalog = formats.catalog_from_json(formats.load(args.catalog))
    else:
        if not args.grid:
            raise InputError("extend needs --grid or --catalog")
        catalog = enumerate_extensions(X, _grid(args.grid), args.cap, stage=args.stage)
    result = f_extend(X, catalog)
    doc = formats.amalgam_to_json(result)
    doc["catalog"] = formats.catalog_to_json(catalog)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_attach(args) -> int:
    X = _space(args.space)
    skip = _labels(args.skip) if args.skip else []
    result, registry = attach_discrete(
        X, skip, _sizes(args.schedule), stage=args.stage, threshold=args.threshold
    )
    doc = formats.amalgam_to_json(result)
    doc["registry"] = formats.registry_to_json(registry)
    _emit(doc, args.out)
    return EXIT_OK


def cmd_middles(args) -> int:
    X = _space(args.space)
    found = find_middle_points(X, _labels(args.target), args.mode)
    _emit({"mode": args.mode, "target": _labels(args.target), "points": found}, args.out)
    return EXIT_OK


def cmd_tau(args) -> int:
    X = _space(args.space)
    pts = _labels(args.points) if args.points else list(X.points)
    fn = discrete_character_bruteforce if args.oracle else discrete_character
    _emit({"threshold": args.threshold, "tau": {p: fn(X, p, args.threshold) for p in pts}}, args.out)
    return EXIT_OK


def cmd_isometries(args) -> int:
    A = _space(args.source)
    B = _space(args.target) if args.target else A
    if args.oracle:
        maps = enumerate_isometries_bruteforce(A, B)
    else:
        maps = enumerate_isometries(A, B, limit=args.limit)
    _emit({"count": len(maps), "isometries": maps}, args.out)
    return EXIT_OK if maps else EXIT_FAIL


def cmd_rigidity(args) -> int:
    X = _space(args.space)
    group = isometry_group(X, limit=args.limit)
    gens = generators(group)
    doc = {
        "points": len(X),
        "group_size": len(group),
        "truncated": args.limit is not None and len(group) >= args.limit,
        "rigid": len(group) == 1,
        "generators": gens,
    }
    _emit(doc, args.out)
    return EXIT_OK if len(group) == 1 else EXIT_FAIL


def _load_probes(directory: Path) -> list[Probe]:
    out = []
    for path in sorted(directory.glob("*.json")):
        doc = formats.load(path)
        if not isinstance(doc, dict) or set(doc) - {"space", "sub"} or "space" not in doc:
            raise InputError(f"{path}: a probe is {{\"space\": <space>, \"sub\": [labels]}}")
        Y = formats.space_from_json(doc["space"], str(path))
        sub = tuple(doc.get("sub", []))
        for p in sub:
            Y.index(p)
        out.append(Probe(Y, sub))
    return out


def cmd_superuniversal(args) -> int:
    target = _space(args.target)
    grid = _grid(args.grid)
    if args.probes:
        probes = _load_probes(Path(args.probes))
    else:
        probes = grid_probes(grid, args.max_points)
    if args.sample is not None and args.sample < len(probes):
        probes = random.Random(args.seed).sample(probes, args.sample)
    core = _labels(args.core) if args.core else None
    report = superuniversality_check(target, probes, grid, core)
    rows = []
    for o in report.outcomes:
        rows.append(
            {
                "probe": formats.space_to_json(o.probe.space),
                "sub": list(o.probe.sub),
                "status": o.status,
                "embeddings_checked": o.embeddings_checked,
                "stuck": o.stuck,
            }
        )
    passed = sum(o.status == "pass" for o in report.outcomes)
    print(f"probes={len(rows)} pass={passed} fail={len(report.failures)}", file=sys.stderr)
    _emit({"holds": report.holds, "results": rows}, args.out)
    return EXIT_OK if report.holds else EXIT_FAIL


def cmd_construct(args) -> int:
    if args.config:
        config = formats.config_from_json(formats.load(args.config))
    else:
        if args.stages is None or args.threshold is None or args.grid is None or args.cap is None:
            raise InputError("construct needs --config or all of --stages --threshold --grid --cap")
        schedule = None
        if args.schedule:
            schedule = formats.schedule_from_json(formats.load(args.schedule))
        config = ConstructionConfig(
            stages=args.stages,
            threshold=args.threshold,
            grid=_grid(args.grid),
            cap=args.cap,
            schedule=schedule,
            distinct_sizes=not args.equal_sizes,
        )
    if args.budget is not None:
        config = dataclasses.replace(config, budget=args.budget)
    try:
        trace = build_stages(config)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = rigidity_report(trace, full_tau=args.full_tau)
    written = formats.write_trace(trace, report, Path(args.out))
    problems = trace_failures(trace)
    for p in written:
        print(p, file=sys.stderr)
    print(
        f"stage sizes {trace.stage_sizes()}; group size {report.group_size}; "
        f"{'rigid' if report.rigid else 'not rigid'}",
        file=sys.stderr,
    )
    if problems or (args.require_rigid and not report.ok):
        return EXIT_FAIL
    return EXIT_OK


def cmd_reduce_path(args) -> int:
    family = formats.family_from_json(formats.load(args.family))
    graph = build_graph(family)
    path = _labels(args.path)
    reduced = reduce_path(graph, path)
    _emit(
        {
            "path": path,
            "weight": render_rat(path_weight(graph, path)),
            "reduced": reduced,
            "reduced_weight": render_rat(path_weight(graph, reduced)),
        },
        args.out,
    )
    return EXIT_OK


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rigidmetric", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled probe sweeps")
    parser.add_argument("--budget", type=int, default=None, help="point-count budget for construct")
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, fn, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        return p

    p = verb("validate", cmd_validate, "check the metric axioms")
    p.add_argument("space")

    p = verb("restrict", cmd_restrict, "subspace on the given points")
    p.add_argument("space")
    p.add_argument("--points", required=True, help="comma-separated labels")

    p = verb("amalgamate", cmd_amalgamate, "amalgam of a family")
    p.add_argument("family")
    p.add_argument("--oracle", action="store_true", help="use the brute-force path enumeration")

    p = verb("extend", cmd_extend, "one-point extension closure over a grid catalog")
    p.add_argument("space")
    p.add_argument("--grid", help='candidate distances, e.g. "1/2,1"')
    p.add_argument("--cap", type=int, default=1, help="largest base subset")
    p.add_argument("--catalog", help="catalog file instead of --grid/--cap")
    p.add_argument("--stage", type=int, default=0)

    p = verb("attach", cmd_attach, "attach discrete sets of scheduled sizes")
    p.add_argument("space")
    p.add_argument("--schedule", required=True, help='"x=3,y=4" or a JSON file')
    p.add_argument("--skip", help="comma-separated points left without attachment")
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--stage", type=int, default=0)

    p = verb("middles", cmd_middles, "middle or weak middle points of a discrete set")
    p.add_argument("space")
    p.add_argument("--target", required=True)
    p.add_argument("--mode", choices=(MIDDLE, WEAK), default=MIDDLE)

    p = verb("tau", cmd_tau, "discrete characters")
    p.add_argument("space")
    p.add_argument("--threshold", type=int, required=True)
    p.add_argument("--points", help="comma-separated labels (default: all)")
    p.add_argument("--oracle", action="store_true")

    p = verb("isometries", cmd_isometries, "distance-preserving bijections")
    p.add_argument("source")
    p.add_argument("target", nargs="?")
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--oracle", action="store_true")

    p = verb("rigidity", cmd_rigidity, "isometry group size and generators")
    p.add_argument("space")
    p.add_argument("--limit", type=int, default=None)

    p = verb("superuniversal", cmd_superuniversal, "probe sweep for partial-isometry extension")
    p.add_argument("target")
    p.add_argument("probes", nargs="?", help="directory of probe files (default: generate from the grid)")
    p.add_argument("--grid", required=True)
    p.add_argument("--max-points", type=int, default=3)
    p.add_argument("--core", help="comma-separated labels the probe subsets must land in")
    p.add_argument("--sample", type=int, default=None, help="check a random sample of the probes")

    p = verb("construct", cmd_construct, "run the staged construction")
    p.add_argument("--config")
    p.add_argument("--stages", type=int)
    p.add_argument("--threshold", type=int)
    p.add_argument("--grid")
    p.add_argument("--cap", type=int)
    p.add_argument("--schedule", help="JSON file {stage: {point: size}}")
    p.add_argument("--equal-sizes", action="store_true", help="ablation: equal attachment sizes")
    p.add_argument("--full-tau", action="store_true")
    p.add_argument("--require-rigid", action="store_true", help="exit 1 unless the report is clean")
    p.set_defaults(out="trace")

    p = verb("reduce-path", cmd_reduce_path, "cut loops out of a walk in the family graph")
    p.add_argument("family")
    p.add_argument("--path", required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except (InputError, MetricError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
