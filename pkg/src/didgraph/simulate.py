"""Seeded panel simulation from scenario structural models.

Nodes are drawn in topological order. Non-treatment stochastic nodes are
linear parent combinations plus Gaussian error with the standardized
error variance (1 minus explained). Deterministic nodes (outcome deltas
and flagged covariates) are exact linear combinations. Treatments are
either the same linear Gaussian rule (gaussian mode) or Bernoulli draws
from an inverse-logit of the scaled linear index (bernoulli mode), with
the intercept solved by bisection so the treated share is close to 0.5.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from .errors import ConfigError
from .graph import Role
from .panel import PanelDataset
from .scenarios import ScenarioSpec
from .scm import node_error_variances
from .transform import _fresh_symbols

LOGIT_SCALE = 1.5


def _invlogit(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def _bisect_intercept(index: np.ndarray, target: float = 0.5) -> float:
    lo, hi = -30.0, 30.0
    for _ in range(100):
        mid = (lo + hi) / 2.0
        if float(np.mean(_invlogit(LOGIT_SCALE * index + mid))) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def simulate(
    scenario: ScenarioSpec,
    n: int,
    mode: str = "gaussian",
    seed: int = 0,
) -> PanelDataset:
    """Draw a rectangular panel of n units; deterministic given (seed, n, mode)."""
    if n < 2:
        raise ConfigError("n must be >= 2")
    if mode not in ("gaussian", "bernoulli"):
        raise ConfigError(f"unknown mode {mode!r}")
    diagram = _fresh_symbols(scenario.natural)
    assignment = dict(scenario.assignment)
    error_var = node_error_variances(diagram, assignment)
    rng = np.random.default_rng(seed)

    values: dict[str, np.ndarray] = {}
    for name in diagram.topological_order:
        node = diagram.node(name)
        parents = diagram.parent_map[name]
        index = np.zeros(n)
        for e in parents:
            assert e.coeff is not None
            index = index + e.coeff.evaluate(assignment) * values[e.src]
        if node.role == Role.TREATMENT and mode == "bernoulli":
            intercept = _bisect_intercept(index)
            prob = _invlogit(LOGIT_SCALE * index + intercept)
            values[name] = rng.binomial(1, prob).astype(float)
        elif node.is_deterministic():
            values[name] = index
        else:
            std = float(np.sqrt(max(error_var[name], 0.0)))
            values[name] = index + rng.normal(0.0, std, size=n)

    columns: dict[str, np.ndarray] = {"unit": np.arange(n)}
    for period in sorted(scenario.treatments):
        node = scenario.treatments[period]
        columns.setdefault(node, values[node])
    level_names = sorted(
        (m.name for m in diagram.nodes if m.role == Role.OUTCOME_LEVEL),
        key=lambda s: diagram.node(s).time or 0,
    )
    for name in level_names:
        columns[name] = values[name]
    for period in scenario.periods:
        columns[scenario.deltas[period]] = values[scenario.deltas[period]]
    for family in sorted(scenario.families):
        for period, node in sorted(scenario.families[family].items()):
            columns[node] = values[node]
    wide = pd.DataFrame(columns)
    return PanelDataset(scenario=scenario, wide=wide, mode=mode, seed=seed)
