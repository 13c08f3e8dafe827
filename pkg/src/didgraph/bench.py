"""Replication benchmark: estimator bias by scenario and adjustment plan.

For each grid cell (scenario x estimator x covariate plan x target
period) the engine simulates `reps` panels with seeds base+i, runs the
estimator, and reports mean bias against the scenario's truth polynomial
together with the Monte-Carlo standard error, the alignment category of
the cell's effective adjustment set, and (for the OLS-family estimators)
the exact population bias from the covariance algebra.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .align import EffectiveSet, classify, effective_adjustment_set
from .errors import ConfigError, DidGraphError
from .estimators import (
    LABEL_OF_KIND,
    EstimatorKind,
    EstimatorSpec,
    estimate,
    resolve_kind,
)
from .graph import AdjustStatus, backdoor_check, minimal_sufficient_sets
from .panel import CovariatePlan, PlanItem, plan_from_json
from .scenarios import ScenarioSpec, get_scenario
from .scm import implied_covariance, partial_regression
from .simulate import simulate

OLS_FAMILY = (EstimatorKind.DELTA_Y, EstimatorKind.HECKMAN_OR)

_WIDE_KINDS = (
    EstimatorKind.DELTA_Y,
    EstimatorKind.HECKMAN_OR,
    EstimatorKind.ABADIE_IPW,
    EstimatorKind.SZ_DR,
    EstimatorKind.MYINT_ATT,
    EstimatorKind.MYINT_ATE,
)
# dcdh sees only changes, so levels must be fed in as interaction columns;
# every other estimator takes the level columns directly (twfe plain then
# cancels them, which the report surfaces as an insufficient cell)
_INTERACT_KINDS = (EstimatorKind.DCDH,)

# Scripted misaligned adjustment sets per scenario and target period.
INSUFFICIENT_SETS: dict[str, dict[int, list[list[str]]]] = {
    "fig4": {1: [[]]},
    "s5_1": {1: [["Z1"]]},
    "s5_2": {1: [[]]},
    "s5_3_1": {1: [[]]},
    "s5_3_2": {1: [[], ["W0"]]},
    "s5_3_3": {1: [[], ["W0"]]},
    "s5_3_4": {1: [[]]},
    "s5_4": {1: [[]], 2: [[]]},
    "s5_4_feedback": {1: [[], ["W0", "W1"]], 2: [[]]},
}


@dataclass(frozen=True)
class Cell:
    scenario: str
    kind: EstimatorKind
    plan: CovariatePlan
    target_period: int = 1

    def plan_label(self) -> str:
        if not self.plan:
            return "-"
        parts = []
        for item in self.plan:
            if item.strategy == "as_is":
                parts.append(item.covariate)
            elif item.strategy == "copy":
                parts.append(f"{item.covariate}[{item.period}]dup")
            elif item.strategy == "interact":
                parts.append(f"{item.covariate}xP")
            elif item.strategy == "change":
                parts.append(f"d{item.covariate}")
        return "+".join(parts)


@dataclass(frozen=True)
class BenchConfig:
    scenarios: tuple[str, ...]
    n: int = 2000
    reps: int = 200
    mode: str = "bernoulli"
    seed: int = 0
    workers: int = 1
    estimators: tuple[EstimatorKind, ...] = tuple(EstimatorKind)
    cells: tuple[Cell, ...] | None = None  # None = default grid

    def __post_init__(self) -> None:
        if self.reps < 2:
            raise ConfigError("replications must be >= 2")
        if self.n < 50:
            raise ConfigError("n must be >= 50")
        if self.mode not in ("gaussian", "bernoulli"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        for name in self.scenarios:
            get_scenario(name)

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "BenchConfig":
        allowed = {"scenarios", "n", "reps", "mode", "seed", "workers",
                   "estimators", "cells"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        kinds = tuple(
            resolve_kind(k) for k in data.get("estimators", [k.value for k in EstimatorKind])
        )
        cells = None
        if "cells" in data:
            cells = tuple(
                Cell(
                    scenario=raw["scenario"],
                    kind=resolve_kind(raw["estimator"]),
                    plan=plan_from_json(raw.get("plan", [])),
                    target_period=int(raw.get("target_period", 1)),
                )
                for raw in data["cells"]
            )
        return cls(
            scenarios=tuple(data.get("scenarios", [])),
            n=int(data.get("n", 2000)),
            reps=int(data.get("reps", 200)),
            mode=str(data.get("mode", "bernoulli")),
            seed=int(data.get("seed", 0)),
            workers=int(data.get("workers", 1)),
            estimators=kinds,
            cells=cells,
        )


@dataclass(frozen=True)
class BiasRow:
    scenario: str
    estimator: str  # registry label
    plan: str
    target_period: int
    category: str
    mean_bias: float
    mc_se: float
    abs_bias: float
    analytic_bias: float | None
    reps: int
    errors: int
    note: str = ""


@dataclass(frozen=True)
class BiasReport:
    rows: tuple[BiasRow, ...]
    config: BenchConfig

    CSV_HEADER = (
        "scenario,estimator,plan,category,mean_bias,mc_se,abs_bias,"
        "analytic_bias,reps,errors"
    )

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            analytic = "" if r.analytic_bias is None else _num(r.analytic_bias)
            estimator = f'"{r.estimator}"' if "," in r.estimator else r.estimator
            lines.append(
                f"{r.scenario},{estimator},{r.plan},{r.category},"
                f"{_num(r.mean_bias)},{_num(r.mc_se)},{_num(r.abs_bias)},"
                f"{analytic},{r.reps},{r.errors}"
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "rows": [
                {
                    "scenario": r.scenario,
                    "estimator": r.estimator,
                    "plan": r.plan,
                    "target_period": r.target_period,
                    "category": r.category,
                    "mean_bias": r.mean_bias,
                    "mc_se": r.mc_se,
                    "abs_bias": r.abs_bias,
                    "analytic_bias": r.analytic_bias,
                    "reps": r.reps,
                    "errors": r.errors,
                    "note": r.note,
                }
                for r in self.rows
            ],
            "aggregates": self.category_aggregates(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)

    def category_aggregates(self) -> list[dict]:
        """Mean absolute bias per (scenario, category), both averaging
        orders: over cells and over all replications pooled by cell mean."""
        keys = sorted({(r.scenario, r.category) for r in self.rows})
        out = []
        for scenario, category in keys:
            rows = [
                r for r in self.rows
                if r.scenario == scenario and r.category == category
            ]
            out.append(
                {
                    "scenario": scenario,
                    "category": category,
                    "cells": len(rows),
                    "mean_abs_bias": float(np.mean([r.abs_bias for r in rows])),
                    "max_abs_bias": float(np.max([r.abs_bias for r in rows])),
                }
            )
        return out

    def to_svg(self) -> str:
        return _svg_report(self)


def _num(x: float) -> str:
    return f"{x:.12g}"


# -- grid construction -------------------------------------------------------


def _plan_for(kind: EstimatorKind, nodes: Sequence[str]) -> CovariatePlan:
    nodes = sorted(nodes)
    if kind in _INTERACT_KINDS:
        return tuple(PlanItem(n, "interact") for n in nodes)
    return tuple(PlanItem(n) for n in nodes)


def default_cells(
    scenario: ScenarioSpec, kinds: Sequence[EstimatorKind]
) -> list[Cell]:
    """Aligned cell per estimator plus scripted misaligned OLS cells."""
    cells: list[Cell] = []
    for period in scenario.periods:
        treatment = scenario.treatments[period]
        delta = scenario.deltas[period]
        minimal = minimal_sufficient_sets(scenario.compact, treatment, delta)
        aligned = sorted(minimal[0]) if minimal else None
        if aligned is not None:
            for kind in kinds:
                cells.append(
                    Cell(scenario.name, kind, _plan_for(kind, aligned), period)
                )
        for nodes in INSUFFICIENT_SETS.get(scenario.name, {}).get(period, []):
            for kind in OLS_FAMILY:
                if kind not in kinds:
                    continue
                cells.append(
                    Cell(scenario.name, kind, _plan_for(kind, nodes), period)
                )
    return cells


# -- oracle ------------------------------------------------------------------


def analytic_bias(
    scenario: ScenarioSpec,
    kind: EstimatorKind,
    effective: EffectiveSet,
    target_period: int = 1,
) -> float:
    """Exact population bias for OLS-family estimators in gaussian mode."""
    if kind not in OLS_FAMILY:
        raise ConfigError(f"no analytic bias oracle for {kind.value}")
    if effective.unclear:
        raise ConfigError("no analytic bias for an unclear effective set")
    nodes = []
    for family, period in sorted(effective.union()):
        nodes.append(scenario.families[family][period])
    sigma = implied_covariance(scenario.natural, scenario.assignment)
    beta = partial_regression(
        sigma, scenario.deltas[target_period], scenario.treatments[target_period], nodes
    )
    return beta - scenario.truth[target_period].evaluate(dict(scenario.assignment))


# -- run ---------------------------------------------------------------------


def _cell_note(scenario: ScenarioSpec, cell: Cell, effective: EffectiveSet) -> str:
    if effective.unclear:
        return "; ".join(effective.notes)
    nodes = [
        scenario.families[f][p] for f, p in sorted(effective.union())
        if p in scenario.families.get(f, {})
    ]
    treatment = scenario.treatments[cell.target_period]
    delta = scenario.deltas[cell.target_period]
    verdict = backdoor_check(scenario.compact, treatment, delta, nodes)
    if verdict.status == AdjustStatus.INVALID_DESCENDANT:
        return (
            "adjusts for a treatment-caused covariate: targets the direct "
            "effect rather than the total effect"
        )
    return "; ".join(effective.notes)


def run_benchmark(config: BenchConfig) -> BiasReport:
    rows: list[BiasRow] = []
    for name in config.scenarios:
        scenario = get_scenario(name)
        cells = (
            [c for c in config.cells if c.scenario == name]
            if config.cells is not None
            else default_cells(scenario, config.estimators)
        )
        if not cells:
            continue
        estimates: dict[int, list[float]] = {i: [] for i in range(len(cells))}
        errors = [0] * len(cells)
        prepared = []
        for cell in cells:
            effective = effective_adjustment_set(
                cell.kind,
                cell.plan,
                scenario.families,
                target_period=cell.target_period,
                baseline_time=scenario.baseline_time,
            )
            category = classify(
                effective,
                scenario.compact,
                scenario.treatments[cell.target_period],
                scenario.deltas[cell.target_period],
                scenario.families,
            )
            tokens = tuple(item.token(cell.target_period) for item in cell.plan)
            spec = EstimatorSpec(
                kind=cell.kind, covariates=tokens, target_period=cell.target_period
            )
            prepared.append((cell, effective, category, spec))

        def one_rep(i: int) -> list[float | None]:
            data = simulate(scenario, config.n, config.mode, seed=config.seed + i)
            out: list[float | None] = []
            for cell, _, _, spec in prepared:
                try:
                    planned = data.apply_plan(cell.plan, cell.target_period)
                    out.append(estimate(planned, spec).estimate)
                except DidGraphError:
                    out.append(None)
            return out

        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                results = list(pool.map(one_rep, range(config.reps)))
        else:
            results = [one_rep(i) for i in range(config.reps)]
        for rep_values in results:
            for j, value in enumerate(rep_values):
                if value is None:
                    errors[j] += 1
                else:
                    estimates[j].append(value)

        for j, (cell, effective, category, _) in enumerate(prepared):
            truth = scenario.truth[cell.target_period].evaluate(
                dict(scenario.assignment)
            )
            values = np.array(estimates[j])
            if len(values) >= 2:
                mean_bias = float(values.mean() - truth)
                mc_se = float(values.std(ddof=1) / math.sqrt(len(values)))
            else:
                mean_bias = math.nan
                mc_se = math.nan
            analytic: float | None = None
            if cell.kind in OLS_FAMILY and not effective.unclear:
                analytic = analytic_bias(scenario, cell.kind, effective, cell.target_period)
            rows.append(
                BiasRow(
                    scenario=name,
                    estimator=LABEL_OF_KIND[cell.kind],
                    plan=cell.plan_label(),
                    target_period=cell.target_period,
                    category=category,
                    mean_bias=mean_bias,
                    mc_se=mc_se,
                    abs_bias=abs(mean_bias),
                    analytic_bias=analytic,
                    reps=len(values),
                    errors=errors[j],
                    note=_cell_note(scenario, cell, effective),
                )
            )
    return BiasReport(rows=tuple(rows), config=config)


# -- output ------------------------------------------------------------------

_CATEGORY_COLORS = {
    "sufficient": "#2a9d8f",
    "insufficient": "#e76f51",
    "unclear": "#8d99ae",
}


def _svg_report(report: BiasReport) -> str:
    scenarios = sorted({r.scenario for r in report.rows})
    panel_width, bar_width, panel_pad, top = 40, 18, 60, 40
    max_bias = max((r.abs_bias for r in report.rows if math.isfinite(r.abs_bias)),
                   default=1.0) or 1.0
    height = 260
    chart_h = 170
    panels = []
    x_cursor = panel_pad
    for scenario in scenarios:
        rows = [r for r in report.rows if r.scenario == scenario]
        width = max(panel_width, len(rows) * bar_width)
        bars = []
        for i, r in enumerate(rows):
            h = 0.0 if not math.isfinite(r.abs_bias) else chart_h * r.abs_bias / max_bias
            color = _CATEGORY_COLORS.get(r.category, "#000000")
            x = x_cursor + i * bar_width
            bars.append(
                f'<rect x="{x}" y="{top + chart_h - h:.2f}" width="{bar_width - 3}" '
                f'height="{h:.2f}" fill="{color}">'
                f"<title>{r.scenario} | {r.estimator} | {r.plan} | {r.category} | "
                f"mean bias {r.mean_bias:.4f}</title></rect>"
            )
        panels.append(
            f'<g>{"".join(bars)}<text x="{x_cursor}" y="{top + chart_h + 18}" '
            f'font-size="11">{scenario}</text></g>'
        )
        x_cursor += width + panel_pad
    legend = "".join(
        f'<rect x="{panel_pad + i * 120}" y="8" width="12" height="12" fill="{c}"/>'
        f'<text x="{panel_pad + i * 120 + 16}" y="18" font-size="11">{name}</text>'
        for i, (name, c) in enumerate(_CATEGORY_COLORS.items())
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{x_cursor}" '
        f'height="{height}">{legend}{"".join(panels)}</svg>'
    )


def emit_report(report: BiasReport, fmt: str, path: str) -> None:
    if not report.rows:
        raise ConfigError("empty report")
    if fmt == "csv":
        text = report.to_csv()
    elif fmt == "json":
        text = report.to_json()
    elif fmt == "svg-bars":
        text = report.to_svg()
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
