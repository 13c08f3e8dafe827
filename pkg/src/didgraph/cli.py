"""Command-line entry point.

Every subcommand is a thin wrapper around a module function: it parses
arguments, loads JSON inputs, calls the function, and serializes the
result. Exit codes: 0 success, 1 analysis error (domain failures such as
cycles, singular systems, estimator errors), 2 usage error (bad flags,
malformed JSON, unknown files).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import SCHEMA_VERSION, __version__
from .bench import BenchConfig, BiasReport, emit_report, run_benchmark
from .errors import DidGraphError
from .graph import CausalDiagram, backdoor_check, minimal_sufficient_sets, open_paths_between, validate
from .poly import PolyExpr
from .scenarios import SCENARIO_NAMES, get_scenario
from .simulate import simulate
from .transform import compact


class UsageError(Exception):
    pass


def _load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from exc


def _load_diagram(path: str) -> CausalDiagram:
    return CausalDiagram.from_json_dict(_load_json_file(path))


def _csv_list(text: str) -> list[str]:
    return [part for part in (p.strip() for p in text.split(",")) if part]


def _cmd_validate(args) -> int:
    diagram = _load_diagram(args.graph)
    diagnostics = validate(diagram)
    for d in diagnostics:
        where = f" [{d.element}]" if d.element else ""
        print(f"{d.severity}: {d.code}: {d.message}{where}")
    errors = [d for d in diagnostics if d.severity == "error"]
    if not diagnostics:
        print("ok")
    return 1 if errors else 0


def _cmd_compact(args) -> int:
    diagram = _load_diagram(args.graph)
    result = compact(diagram, delta=args.delta)
    text = result.to_json()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_sets(args) -> int:
    diagram = _load_diagram(args.graph)
    sets = minimal_sufficient_sets(diagram, args.treatment, args.outcome)
    print(json.dumps([sorted(s) for s in sets]))
    return 0


def _cmd_trace(args) -> int:
    diagram = _load_diagram(args.graph)
    given = _csv_list(args.given) if args.given else []
    paths = open_paths_between(diagram, args.src, args.dst, given)
    total = PolyExpr.zero()
    for _, product in paths:
        total = total + product
    if args.json_out:
        payload = {
            "paths": [
                {"nodes": list(p), "product": str(expr)} for p, expr in paths
            ],
            "sum": str(total),
        }
        if args.assign:
            assignment = _load_json_file(args.assign)
            payload["value"] = total.evaluate(assignment)
        print(json.dumps(payload, indent=2))
    else:
        for nodes, expr in paths:
            print(f"{' - '.join(nodes)}: {expr}")
        print(str(total))
        if args.assign:
            assignment = _load_json_file(args.assign)
            print(f"= {total.evaluate(assignment):.10g}")
    return 0


def _cmd_identify(args) -> int:
    diagram = _load_diagram(args.graph)
    adjustment = _csv_list(args.set) if args.set else []
    verdict = backdoor_check(diagram, args.treatment, args.outcome, adjustment)
    print(
        json.dumps(
            {
                "status": verdict.status.value,
                "detail": verdict.detail,
                "open_paths": [list(p) for p in verdict.open_paths],
                "path_sum": None if verdict.path_sum is None else str(verdict.path_sum),
            },
            indent=2,
        )
    )
    return 0


def _cmd_simulate(args) -> int:
    scenario = get_scenario(args.scenario)
    data = simulate(scenario, args.n, args.mode, seed=args.seed)
    if args.layout == "long":
        text = data.to_csv()
    elif args.layout == "wide":
        text = data.to_wide().to_csv(index=False, lineterminator="\r\n")
    else:
        text = data.to_differenced().to_csv(index=False, lineterminator="\r\n")
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bench(args) -> int:
    raw = _load_json_file(args.config)
    config = BenchConfig.from_json_dict(raw)
    report = run_benchmark(config)
    emit_report(report, args.format, args.output)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="didgraph",
        description="Causal-diagram analysis and estimator laboratory "
        "for difference-in-differences designs.",
    )
    parser.add_argument(
        "--version", action="version",
        version=f"didgraph {__version__} (schema {SCHEMA_VERSION})",
    )
    parser.add_argument(
        "--json", dest="json_errors", action="store_true",
        help="emit machine-readable error JSON on stderr",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a diagram JSON file")
    p.add_argument("-g", "--graph", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("compact", help="marginalize outcome levels into changes")
    p.add_argument("-g", "--graph", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--delta", help="compact toward a single change node")
    p.set_defaults(func=_cmd_compact)

    p = sub.add_parser("sets", help="minimal sufficient adjustment sets")
    p.add_argument("-g", "--graph", required=True)
    p.add_argument("--treatment", required=True)
    p.add_argument("--outcome", required=True)
    p.set_defaults(func=_cmd_sets)

    p = sub.add_parser("trace", help="open paths and their symbolic sum")
    p.add_argument("-g", "--graph", required=True)
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    p.add_argument("--given", help="comma-separated conditioning set")
    p.add_argument("--assign", help="JSON file of coefficient values")
    p.add_argument("--json-out", action="store_true")
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("identify", help="offset-aware backdoor verdict")
    p.add_argument("-g", "--graph", required=True)
    p.add_argument("--treatment", required=True)
    p.add_argument("--outcome", required=True)
    p.add_argument("--set", default="", help="comma-separated adjustment set")
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("simulate", help="draw a panel from a named scenario")
    p.add_argument("--scenario", required=True, choices=SCENARIO_NAMES)
    p.add_argument("-n", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", default="gaussian", choices=["gaussian", "bernoulli"])
    p.add_argument("--layout", default="long", choices=["wide", "long", "differenced"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bench", help="run the replication benchmark")
    p.add_argument("--config", required=True, help="BenchConfig JSON file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", default="csv", choices=["csv", "json", "svg-bars"])
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="run the local analysis HTTP server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8724)
    p.set_defaults(func=_cmd_serve)

    return parser


def _emit_error(exc: Exception, as_json: bool, usage: bool) -> None:
    if as_json:
        payload = {
            "error": {
                "type": type(exc).__name__,
                "message": str(exc),
                "kind": "usage" if usage else "analysis",
            }
        }
        print(json.dumps(payload), file=sys.stderr)
    else:
        print(f"error: {exc}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        _emit_error(exc, args.json_errors, usage=True)
        return 2
    except DidGraphError as exc:
        _emit_error(exc, args.json_errors, usage=False)
        return 1


if __name__ == "__main__":
    sys.exit(main())
