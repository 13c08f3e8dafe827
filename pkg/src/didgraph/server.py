"""Local analysis HTTP server.

All handlers are thin wrappers over pure module functions; request and
response bodies reuse the file JSON schemas (diagram JSON, plan JSON,
benchmark config JSON). Domain failures map to HTTP 400 with a
structured error body; resource bounds (simulation size, benchmark
replications) are enforced before any work starts. CORS is open so the
bundled web UI can run from any local origin.
"""

from __future__ import annotations

from typing import Any, Mapping

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import SCHEMA_VERSION, __version__
from .align import classify, effective_adjustment_set
from .bench import BenchConfig, run_benchmark
from .errors import ConfigError, DidGraphError
from .estimators import TABLE_LABELS, resolve_kind
from .graph import CausalDiagram, backdoor_check, minimal_sufficient_sets, open_paths_between, validate
from .panel import plan_from_json
from .poly import PolyExpr
from .scenarios import SCENARIO_NAMES, get_scenario
from .simulate import simulate
from .transform import compact

MAX_SIMULATE_N = 50000
MAX_BENCH_REPS = 100


def _diagram(body: Mapping, key: str = "graph") -> CausalDiagram:
    if key not in body:
        raise ConfigError(f"missing {key!r} in request body")
    return CausalDiagram.from_json_dict(body[key])


def _require(body: Mapping, key: str) -> Any:
    if key not in body:
        raise ConfigError(f"missing {key!r} in request body")
    return body[key]


def create_app() -> FastAPI:
    app = FastAPI(title="didgraph", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(DidGraphError)
    async def _domain_error(_: Request, exc: DidGraphError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": {"type": type(exc).__name__, "message": str(exc)}},
        )

    @app.get("/api/scenarios")
    def scenarios() -> dict:
        out = []
        for name in SCENARIO_NAMES:
            sc = get_scenario(name)
            out.append(
                {
                    "name": name,
                    "description": sc.description,
                    "periods": list(sc.periods),
                    "treatments": {str(p): t for p, t in sc.treatments.items()},
                    "deltas": {str(p): d for p, d in sc.deltas.items()},
                    "families": {f: {str(p): n for p, n in by.items()}
                                 for f, by in sc.families.items()},
                    "truth": {str(p): str(t) for p, t in sc.truth.items()},
                    "assignment": dict(sc.assignment),
                    "estimators": list(TABLE_LABELS),
                    "natural": sc.natural.to_json_dict(),
                    "compact": sc.compact.to_json_dict(),
                }
            )
        return {"schema": SCHEMA_VERSION, "scenarios": out}

    @app.post("/api/validate")
    async def api_validate(request: Request) -> dict:
        body = await request.json()
        diagram = _diagram(body)
        diagnostics = validate(diagram)
        return {
            "ok": not any(d.severity == "error" for d in diagnostics),
            "diagnostics": [
                {
                    "code": d.code,
                    "severity": d.severity,
                    "message": d.message,
                    "element": d.element,
                }
                for d in diagnostics
            ],
        }

    @app.post("/api/compact")
    async def api_compact(request: Request) -> dict:
        body = await request.json()
        diagram = _diagram(body)
        result = compact(diagram, delta=body.get("delta"))
        return {"graph": result.to_json_dict()}

    @app.post("/api/sets")
    async def api_sets(request: Request) -> dict:
        body = await request.json()
        diagram = _diagram(body)
        sets = minimal_sufficient_sets(
            diagram, _require(body, "treatment"), _require(body, "outcome")
        )
        return {"sets": [sorted(s) for s in sets]}

    @app.post("/api/trace")
    async def api_trace(request: Request) -> dict:
        body = await request.json()
        diagram = _diagram(body)
        paths = open_paths_between(
            diagram, _require(body, "from"), _require(body, "to"),
            body.get("given", []),
        )
        total = PolyExpr.zero()
        for _, product in paths:
            total = total + product
        out: dict = {
            "paths": [{"nodes": list(p), "product": str(e)} for p, e in paths],
            "sum": str(total),
        }
        if "assign" in body:
            out["value"] = total.evaluate(body["assign"])
        return out

    @app.post("/api/identify")
    async def api_identify(request: Request) -> dict:
        body = await request.json()
        diagram = _diagram(body)
        verdict = backdoor_check(
            diagram, _require(body, "treatment"), _require(body, "outcome"),
            body.get("set", []),
        )
        return {
            "status": verdict.status.value,
            "detail": verdict.detail,
            "open_paths": [list(p) for p in verdict.open_paths],
            "path_sum": None if verdict.path_sum is None else str(verdict.path_sum),
        }

    @app.post("/api/align")
    async def api_align(request: Request) -> dict:
        body = await request.json()
        scenario = get_scenario(_require(body, "scenario"))
        kind = resolve_kind(_require(body, "estimator"))
        plan = plan_from_json(body.get("plan", []))
        target = int(body.get("target_period", scenario.periods[0]))
        effective = effective_adjustment_set(
            kind, plan, scenario.families,
            target_period=target, baseline_time=scenario.baseline_time,
        )
        category = classify(
            effective, scenario.compact,
            scenario.treatments[target], scenario.deltas[target],
            scenario.families,
        )
        return {
            "unclear": effective.unclear,
            "per_period": {
                str(p): sorted([f, pp] for f, pp in levels)
                for p, levels in effective.per_period.items()
            },
            "notes": list(effective.notes),
            "category": category,
        }

    @app.post("/api/simulate")
    async def api_simulate(request: Request) -> dict:
        body = await request.json()
        n = int(_require(body, "n"))
        if n > MAX_SIMULATE_N:
            raise ConfigError(f"n exceeds the server bound of {MAX_SIMULATE_N}")
        scenario = get_scenario(_require(body, "scenario"))
        data = simulate(
            scenario, n, body.get("mode", "gaussian"), seed=int(body.get("seed", 0))
        )
        return {"csv": data.to_csv()}

    @app.post("/api/bench")
    async def api_bench(request: Request) -> dict:
        body = await request.json()
        config = BenchConfig.from_json_dict(_require(body, "config"))
        if config.reps > MAX_BENCH_REPS:
            raise ConfigError(
                f"replications exceed the server bound of {MAX_BENCH_REPS}"
            )
        report = run_benchmark(config)
        return report.to_json_dict()

    return app
