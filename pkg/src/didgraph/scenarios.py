"""Built-in two- and three-period panel scenarios.

Each scenario ships a natural diagram (outcome levels plus delta nodes),
a default coefficient assignment, the covariate-family layout, and the
true estimand polynomial per target period. Coefficients default to 0.3;
a few symbols are raised so that time-varying effects differ across
periods and insufficient adjustment sets produce visible bias. All
defaults are overridable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from .errors import ConfigError
from .graph import CausalDiagram, EdgeSpec, Form, NodeSpec, Role
from .poly import PolyExpr
from .transform import build_delta_nodes, compact

SCENARIO_NAMES = (
    "fig1",
    "fig4",
    "s5_1",
    "s5_2",
    "s5_3_1",
    "s5_3_2",
    "s5_3_3",
    "s5_3_4",
    "s5_4",
    "s5_4_feedback",
)


@dataclass(frozen=True)
class ScenarioSpec:
    """One benchmark scenario: diagram, defaults, truths, layout."""

    name: str
    description: str
    natural: CausalDiagram
    assignment: Mapping[str, float]
    treatments: Mapping[int, str]  # target period -> treatment node
    deltas: Mapping[int, str]  # target period -> delta node
    truth: Mapping[int, PolyExpr]  # target period -> estimand polynomial
    families: Mapping[str, Mapping[int, str]]  # family -> period -> node
    periods: tuple[int, ...] = (1,)
    baseline_time: int = 0

    @property
    def compact(self) -> CausalDiagram:
        return _compact_of(self.name)

    def with_assignment(self, overrides: Mapping[str, float]) -> "ScenarioSpec":
        merged = dict(self.assignment)
        unknown = set(overrides) - set(merged)
        if unknown:
            raise ConfigError(f"unknown coefficient symbols: {sorted(unknown)}")
        merged.update(overrides)
        return ScenarioSpec(
            name=self.name,
            description=self.description,
            natural=self.natural,
            assignment=merged,
            treatments=self.treatments,
            deltas=self.deltas,
            truth=self.truth,
            families=self.families,
            periods=self.periods,
            baseline_time=self.baseline_time,
        )


def _n(
    name: str,
    time: int,
    role: Role,
    observed: bool = True,
    deterministic: bool = False,
) -> NodeSpec:
    return NodeSpec(
        name=name, time=time, observed=observed, role=role, deterministic=deterministic
    )


def _e(src: str, dst: str, coeff: str | int) -> EdgeSpec:
    if isinstance(coeff, int):
        return EdgeSpec(src, dst, PolyExpr.const(coeff))
    return EdgeSpec(src, dst, PolyExpr.parse(coeff))


def _base_nodes(extra_periods: int = 0) -> list[NodeSpec]:
    nodes = [
        _n("A1", 1, Role.TREATMENT),
        _n("Y0", 0, Role.OUTCOME_LEVEL),
        _n("Y1", 1, Role.OUTCOME_LEVEL),
        _n("V0", 0, Role.LATENT_CONFOUNDER, observed=False),
        _n("S0", 0, Role.LATENT_CONFOUNDER, observed=False),
    ]
    if extra_periods:
        nodes.insert(3, _n("Y2", 2, Role.OUTCOME_LEVEL))
    return nodes


def _base_edges() -> list[EdgeSpec]:
    return [
        _e("A1", "Y1", "a"),
        _e("V0", "Y0", "c"),
        _e("V0", "Y1", "c"),
        _e("V0", "A1", "b"),
        _e("S0", "Y0", "d"),
        _e("S0", "Y1", "e"),
    ]


def _natural(nodes: list[NodeSpec], edges: list[EdgeSpec]) -> CausalDiagram:
    diagram = CausalDiagram(tuple(nodes), tuple(edges), Form.NATURAL)
    return build_delta_nodes(diagram, baseline_time=0)


_DEFAULTS = {s: 0.3 for s in "abcdefghijklmnpq"}


def _assign(symbols: str, **overrides: float) -> dict[str, float]:
    out = {s: _DEFAULTS[s] for s in symbols}
    out.update(overrides)
    return out


def _two_period(
    name: str,
    description: str,
    nodes: list[NodeSpec],
    edges: list[EdgeSpec],
    assignment: dict[str, float],
    families: dict[str, dict[int, str]],
    truth: PolyExpr | None = None,
) -> ScenarioSpec:
    return ScenarioSpec(
        name=name,
        description=description,
        natural=_natural(nodes, edges),
        assignment=assignment,
        treatments={1: "A1"},
        deltas={1: "dY1"},
        truth={1: truth if truth is not None else PolyExpr.symbol("a")},
        families=families,
        periods=(1,),
    )


def _build_fig1() -> ScenarioSpec:
    return _two_period(
        "fig1",
        "No observed covariates; both confounders satisfy constancy "
        "(equi-confounding), so the unadjusted contrast identifies the effect.",
        _base_nodes(),
        _base_edges(),
        _assign("abcde", e=0.45),
        families={},
    )


def _build_fig4() -> ScenarioSpec:
    nodes = _base_nodes() + [_n("W0", 0, Role.COVARIATE)]
    edges = _base_edges() + [
        _e("W0", "Y0", "f"),
        _e("W0", "Y1", "h"),
        _e("W0", "A1", "g"),
    ]
    return _two_period(
        "fig4",
        "One observed baseline confounder with a time-varying outcome "
        "effect; {W0} is required for identification.",
        nodes,
        edges,
        _assign("abcdefgh", e=0.45, g=0.4, h=0.45),
        families={"W": {0: "W0"}},
    )


def _build_s5_1() -> ScenarioSpec:
    nodes = _base_nodes() + [
        _n("W0", 0, Role.COVARIATE),
        _n("Z0", 0, Role.COVARIATE),
        _n("Z1", 1, Role.COVARIATE, deterministic=True),
        _n("Q0", 0, Role.COVARIATE),
    ]
    edges = _base_edges() + [
        _e("W0", "Y0", "f"),
        _e("W0", "Y1", "f"),
        _e("W0", "A1", "g"),
        _e("Z0", "W0", "i"),
        _e("Z0", "Y0", "h"),
        _e("Z1", "Y1", "h"),
        _e("Z0", "Z1", 1),
        _e("Q0", "Z1", "j"),
    ]
    return _two_period(
        "s5_1",
        "A time-varying covariate whose level persists (unit carryover) "
        "with a constant outcome effect; backdoor paths offset, so the "
        "empty set is sufficient but adjusting for Z1 alone breaks it.",
        nodes,
        edges,
        # strong Z0->W0->A1 confounding and Q0->Z1 mixing make the bias
        # from wrongly adjusting for Z1 clearly visible in the benchmark,
        # while the unadjusted contrast stays exactly unbiased
        _assign("abcdefghij", c=0.2, d=0.2, e=0.35, f=0.15,
                g=0.6, h=0.45, i=0.6, j=0.7),
        families={"W": {0: "W0"}, "Z": {0: "Z0", 1: "Z1"}, "Q": {0: "Q0"}},
    )


def _build_s5_2() -> ScenarioSpec:
    nodes = _base_nodes() + [
        _n("W0", 0, Role.COVARIATE),
        _n("Z0", 0, Role.COVARIATE),
        _n("Z1", 1, Role.COVARIATE),
    ]
    edges = _base_edges() + [
        _e("W0", "Y0", "f"),
        _e("W0", "Y1", "f"),
        _e("W0", "A1", "g"),
        _e("Z0", "W0", "i"),
        _e("Z0", "Z1", "j"),
        _e("Z0", "Y0", "h"),
        _e("Z1", "Y1", "k"),
    ]
    return _two_period(
        "s5_2",
        "A time-varying covariate with drift and a time-varying outcome "
        "effect; {W0} or {Z0} is minimally sufficient.",
        nodes,
        edges,
        _assign("abcdefghijk", e=0.45, g=0.45, i=0.45, k=0.45),
        families={"W": {0: "W0"}, "Z": {0: "Z0", 1: "Z1"}},
    )


def _build_s5_3_1() -> ScenarioSpec:
    nodes = _base_nodes() + [
        _n("W0", 0, Role.COVARIATE),
        _n("W1", 1, Role.COVARIATE),
    ]
    edges = _base_edges() + [
        _e("W0", "Y0", "f"),
        _e("W0", "A1", "g"),
        _e("W0", "W1", "i"),
        _e("W1", "Y1", "h"),
    ]
    return _two_period(
        "s5_3_1",
        "A time-varying confounder measured at both periods whose later "
        "value is driven only by its baseline; {W0} suffices.",
        nodes,
        edges,
        _assign("abcdefghi", e=0.45),
        families={"W": {0: "W0", 1: "W1"}},
    )


def _build_s5_3_2() -> ScenarioSpec:
    nodes = _base_nodes() + [
        _n("W0", 0, Role.COVARIATE),
        _n("W1", 1, Role.COVARIATE),
        _n("Z0", 0, Role.COVARIATE),
    ]
    edges = _base_edges() + [
        _e("W0", "Y0", "f"),
        _e("W0", "A1", "g"),
        _e("W0", "W1", "k"),
        _e("W1", "Y1", "h"),
        _e("Z0", "W1", "j"),
        _e("Z0", "A1", "i"),
    ]
    return _two_period(
        "s5_3_2",
        "The later confounder value has a second observed driver that "
        "also affects treatment; {W0,Z0} or {W0,W1} is minimally "
        "sufficient.",
        nodes,
        edges,
        # h raised so the two unadjusted confounding channels do not
        # nearly cancel at the default assignment
        _assign("abcdefghijk", e=0.45, h=0.45, i=0.45, j=0.45),
        families={"W": {0: "W0", 1: "W1"}, "Z": {0: "Z0"}},
    )


def _build_s5_3_3() -> ScenarioSpec:
    nodes = _base_nodes() + [
        _n("W0", 0, Role.COVARIATE),
        _n("W1", 1, Role.COVARIATE),
    ]
    edges = _base_edges() + [
        _e("W0", "Y0", "f"),
        _e("W0", "A1", "g"),
        _e("W0", "W1", "j"),
        _e("W1", "Y1", "h"),
        _e("V0", "W1", "i"),
    ]
    return _two_period(
        "s5_3_3",
        "The later confounder value is partly driven by an unobserved "
        "confounder; both {W0,W1} members are needed.",
        nodes,
        edges,
        # h raised so the unadjusted confounding channels do not nearly
        # cancel at the default assignment
        _assign("abcdefghij", e=0.45, b=0.45, h=0.45, i=0.45),
        families={"W": {0: "W0", 1: "W1"}},
    )


def _build_s5_3_4() -> ScenarioSpec:
    nodes = _base_nodes() + [
        _n("W0", 0, Role.COVARIATE),
        _n("W1", 1, Role.COVARIATE),
    ]
    edges = _base_edges() + [
        _e("W0", "Y0", "f"),
        _e("W0", "A1", "g"),
        _e("W0", "W1", "j"),
        _e("W1", "Y1", "h"),
        _e("A1", "W1", "i"),
    ]
    return _two_period(
        "s5_3_4",
        "The later covariate value is caused by treatment (a mediator); "
        "adjusting for it would block part of the effect, so the target "
        "is the total effect a + i*h with {W0} only.",
        nodes,
        edges,
        _assign("abcdefghij", e=0.45, h=0.45, i=0.45),
        families={"W": {0: "W0", 1: "W1"}},
        truth=PolyExpr.parse("a + i*h"),
    )


def _build_s5_4() -> ScenarioSpec:
    nodes = _base_nodes(extra_periods=1) + [
        _n("W0", 0, Role.COVARIATE),
        _n("W1", 1, Role.COVARIATE),
        _n("W2", 2, Role.COVARIATE),
    ]
    edges = _base_edges() + [
        _e("A1", "Y2", "a"),
        _e("V0", "Y2", "c"),
        _e("S0", "Y2", "l"),
        _e("W0", "Y0", "f"),
        _e("W0", "A1", "g"),
        _e("W0", "W1", "i"),
        _e("W1", "W2", "j"),
        _e("W1", "Y1", "h"),
        _e("W2", "Y2", "k"),
    ]
    return ScenarioSpec(
        name="s5_4",
        description=(
            "Three periods with a static treatment and an evolving "
            "covariate chain; {W0} suffices for both post periods."
        ),
        natural=_natural(nodes, edges),
        assignment=_assign("abcdefghijkl", e=0.45, k=0.45, l=0.4),
        treatments={1: "A1", 2: "A1"},
        deltas={1: "dY1", 2: "dY2"},
        truth={1: PolyExpr.symbol("a"), 2: PolyExpr.symbol("a")},
        families={"W": {0: "W0", 1: "W1", 2: "W2"}},
        periods=(1, 2),
    )


def _build_s5_4_feedback() -> ScenarioSpec:
    nodes = _base_nodes(extra_periods=1) + [
        _n("A2", 2, Role.TREATMENT),
        _n("W0", 0, Role.COVARIATE),
        _n("W1", 1, Role.COVARIATE),
        _n("W2", 2, Role.COVARIATE),
    ]
    edges = [
        _e("A1", "Y1", "a"),
        _e("A2", "Y2", "a"),
        _e("A1", "A2", "p"),
        _e("V0", "Y0", "c"),
        _e("V0", "Y1", "c"),
        _e("V0", "Y2", "c"),
        _e("V0", "A1", "b"),
        _e("V0", "A2", "b"),
        _e("S0", "Y0", "d"),
        _e("S0", "Y1", "e"),
        _e("S0", "Y2", "q"),
        _e("W0", "Y0", "f"),
        _e("W0", "A1", "g"),
        _e("W0", "W1", "j"),
        _e("W1", "W2", "k"),
        _e("W1", "Y1", "i"),
        _e("W1", "A2", "l"),
        _e("A1", "W1", "h"),
        _e("A2", "W2", "m"),
        _e("W2", "Y2", "n"),
    ]
    return ScenarioSpec(
        name="s5_4_feedback",
        description=(
            "Dynamic treatment with treatment-confounder feedback: the "
            "period-1 covariate mediates the first treatment and "
            "confounds the second. Targets are total effects a + h*i at "
            "period 1 and a + m*n at period 2."
        ),
        natural=_natural(nodes, edges),
        # f, g raised so the unadjusted contrast is clearly biased at both
        # target periods (the W0 backdoor persists through A1->A2)
        assignment=_assign("abcdefghijklmnpq", e=0.45, q=0.4, h=0.45, m=0.45,
                           f=0.45, g=0.45),
        treatments={1: "A1", 2: "A2"},
        deltas={1: "dY1", 2: "dY2"},
        truth={1: PolyExpr.parse("a + h*i"), 2: PolyExpr.parse("a + m*n")},
        families={"W": {0: "W0", 1: "W1", 2: "W2"}},
        periods=(1, 2),
    )


_BUILDERS = {
    "fig1": _build_fig1,
    "fig4": _build_fig4,
    "s5_1": _build_s5_1,
    "s5_2": _build_s5_2,
    "s5_3_1": _build_s5_3_1,
    "s5_3_2": _build_s5_3_2,
    "s5_3_3": _build_s5_3_3,
    "s5_3_4": _build_s5_3_4,
    "s5_4": _build_s5_4,
    "s5_4_feedback": _build_s5_4_feedback,
}


@lru_cache(maxsize=None)
def get_scenario(name: str) -> ScenarioSpec:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ConfigError(
            f"unknown scenario {name!r}; choose from {list(SCENARIO_NAMES)}"
        ) from None
    return builder()


@lru_cache(maxsize=None)
def _compact_of(name: str) -> CausalDiagram:
    return compact(get_scenario(name).natural)


def all_scenarios() -> list[ScenarioSpec]:
    return [get_scenario(name) for name in SCENARIO_NAMES]
