"""Effective adjustment sets: what each estimator actually conditions on.

Supplying a covariate to an estimator is not the same as adjusting for
it: wide estimators default to baseline values of time-varying
covariates, two-period regressions cancel time-constant columns, change
regressions difference levels away, and group-membership weighting has
no clean characterization. The rule table below encodes those behaviors
so benchmark cells can be stratified into sufficient / insufficient /
unclear before any data is simulated.

The table maps estimator kinds to named rules and is data, not code:
new estimators can register an existing rule name via register_rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import ConfigError, UnknownNodeError
from .estimators import EstimatorKind
from .graph import AdjustStatus, CausalDiagram, backdoor_check
from .panel import CovariatePlan, PlanItem

Level = tuple[str, int]  # (family, period)


@dataclass(frozen=True)
class EffectiveSet:
    """Per-period effective conditioning levels, or the unclear marker."""

    unclear: bool = False
    per_period: Mapping[int, frozenset[Level]] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def union(self) -> frozenset[Level]:
        out: set[Level] = set()
        for levels in self.per_period.values():
            out |= levels
        return frozenset(out)


ALIGN_RULES: dict[EstimatorKind, str] = {
    EstimatorKind.DELTA_Y: "wide_levels",
    EstimatorKind.MYINT_ATT: "wide_levels",
    EstimatorKind.MYINT_ATE: "wide_levels",
    EstimatorKind.HECKMAN_OR: "wide_levels",
    EstimatorKind.ABADIE_IPW: "wide_levels",
    EstimatorKind.SZ_DR: "wide_levels",
    EstimatorKind.TWFE: "two_period_pooled",
    EstimatorKind.TWFE_AUGMENTED: "per_period_split",
    EstimatorKind.STUART_TIME_PS: "per_period_split",
    EstimatorKind.DCDH: "changes_only",
    EstimatorKind.STUART_GROUP_PS: "unclear",
}


def register_rule(kind: EstimatorKind, rule: str) -> None:
    if rule not in _RULE_NAMES:
        raise ConfigError(f"unknown alignment rule {rule!r}")
    ALIGN_RULES[kind] = rule


@dataclass(frozen=True)
class _Item:
    """Resolved plan item: what information the produced column carries."""

    kind: str  # level | family | interaction | change
    family: str
    period: int | None = None


def _resolve_item(
    item: PlanItem,
    families: Mapping[str, Mapping[int, str]],
    baseline_time: int,
) -> _Item:
    if item.strategy == "copy":
        if item.period is None:
            raise ConfigError(f"copy of {item.covariate!r} needs a period")
        return _Item("level", item.covariate, item.period)
    if item.strategy == "change":
        return _Item("change", item.covariate)
    if item.strategy == "interact":
        base = _resolve_token(item.covariate, families, baseline_time)
        if base.kind == "family":
            return _Item("interaction", base.family, None)
        return _Item("interaction", base.family, base.period)
    return _resolve_token(item.covariate, families, baseline_time)


def _resolve_token(
    token: str,
    families: Mapping[str, Mapping[int, str]],
    baseline_time: int,
) -> _Item:
    if token in families:
        return _Item("family", token)
    for family, by_period in families.items():
        for period, node in by_period.items():
            if node == token:
                return _Item("level", family, period)
    raise ConfigError(f"unknown covariate token {token!r}")


def _family_value_period(
    families: Mapping[str, Mapping[int, str]], family: str, period: int
) -> int:
    usable = [p for p in families[family] if p <= period]
    if not usable:
        raise ConfigError(f"family {family!r} has no value at period {period}")
    return max(usable)


def effective_adjustment_set(
    kind: EstimatorKind,
    plan: CovariatePlan,
    families: Mapping[str, Mapping[int, str]],
    target_period: int = 1,
    baseline_time: int = 0,
) -> EffectiveSet:
    """Apply the rule table to a covariate plan."""
    rule = ALIGN_RULES[kind]
    items = [_resolve_item(item, families, baseline_time) for item in plan]
    return _RULE_NAMES[rule](items, families, target_period, baseline_time)


def _rule_unclear(items, families, target, baseline) -> EffectiveSet:
    return EffectiveSet(
        unclear=True,
        notes=("group-membership weighting has no clean effective set",),
    )


def _rule_wide_levels(items, families, target, baseline) -> EffectiveSet:
    levels: set[Level] = set()
    notes: list[str] = []
    for item in items:
        if item.kind == "level":
            levels.add((item.family, item.period))
        elif item.kind == "family":
            period = _family_value_period(families, item.family, baseline)
            levels.add((item.family, period))
            notes.append(
                f"family {item.family!r} enters through its baseline value only"
            )
        elif item.kind == "interaction":
            return EffectiveSet(
                unclear=True,
                notes=("interaction columns are period-dependent and cannot "
                       "enter a wide-layout fit",),
            )
    # a change column pins the target-period level only jointly with the
    # baseline level it was differenced against
    for item in items:
        if item.kind != "change":
            continue
        base_period = _family_value_period(families, item.family, baseline)
        if (item.family, base_period) in levels:
            post_period = _family_value_period(families, item.family, target)
            levels.add((item.family, post_period))
            notes.append(
                f"change in {item.family!r} plus its baseline level pins the "
                f"period-{post_period} level"
            )
        else:
            return EffectiveSet(
                unclear=True,
                notes=(f"change in {item.family!r} without its baseline level "
                       "conditions on a difference, not a level",),
            )
    return EffectiveSet(per_period={target: frozenset(levels)}, notes=tuple(notes))


def _rule_two_period_pooled(items, families, target, baseline) -> EffectiveSet:
    levels: set[Level] = set()
    notes: list[str] = []
    for item in items:
        if item.kind in ("level", "change"):
            notes.append(
                "time-constant regressors cancel from the implied difference"
            )
        elif item.kind == "family":
            pre = _family_value_period(families, item.family, baseline)
            post = _family_value_period(families, item.family, target)
            if pre == post:
                notes.append(
                    "time-constant regressors cancel from the implied difference"
                )
            else:
                return EffectiveSet(
                    unclear=True,
                    notes=(f"time-varying covariate {item.family!r} with a pooled "
                           "coefficient has an ambiguous effective set",),
                )
        elif item.kind == "interaction":
            # an interaction column varies over time, and a single pooled
            # coefficient on it has no clean effective-set interpretation
            return EffectiveSet(
                unclear=True,
                notes=(f"time-varying column on {item.family!r} with a pooled "
                       "coefficient has an ambiguous effective set",),
            )
    return EffectiveSet(per_period={target: frozenset(levels)}, notes=tuple(notes))


def _rule_per_period_split(items, families, target, baseline) -> EffectiveSet:
    pre: set[Level] = set()
    post: set[Level] = set()
    notes: list[str] = []
    for item in items:
        if item.kind == "level":
            pre.add((item.family, item.period))
            post.add((item.family, item.period))
        elif item.kind == "family":
            pre.add((item.family, _family_value_period(families, item.family, baseline)))
            post.add((item.family, _family_value_period(families, item.family, target)))
        elif item.kind == "interaction":
            period = (
                item.period
                if item.period is not None
                else _family_value_period(families, item.family, target)
            )
            post.add((item.family, period))
        elif item.kind == "change":
            return EffectiveSet(
                unclear=True,
                notes=("a change column under per-period coefficients conditions "
                       "on a difference, not a level",),
            )
    if pre != post:
        notes.append("effective set splits by period")
    return EffectiveSet(
        per_period={baseline: frozenset(pre), target: frozenset(post)},
        notes=tuple(notes),
    )


def _rule_changes_only(items, families, target, baseline) -> EffectiveSet:
    levels: set[Level] = set()
    notes: list[str] = []
    for item in items:
        if item.kind == "level":
            notes.append(
                f"level of {item.family!r} differences out to zero and is dropped"
            )
        elif item.kind == "interaction":
            period = (
                item.period
                if item.period is not None
                else _family_value_period(families, item.family, target)
            )
            levels.add((item.family, period))
            notes.append(
                f"interaction column differences to the period-{period} level "
                f"of {item.family!r}"
            )
        else:
            return EffectiveSet(
                unclear=True,
                notes=(f"conditioning on changes in {item.family!r} is not level "
                       "adjustment",),
            )
    return EffectiveSet(per_period={target: frozenset(levels)}, notes=tuple(notes))


_RULE_NAMES = {
    "unclear": _rule_unclear,
    "wide_levels": _rule_wide_levels,
    "two_period_pooled": _rule_two_period_pooled,
    "per_period_split": _rule_per_period_split,
    "changes_only": _rule_changes_only,
}


def classify(
    effective: EffectiveSet,
    diagram: CausalDiagram,
    treatment: str,
    outcome: str,
    families: Mapping[str, Mapping[int, str]],
) -> str:
    """sufficient / insufficient / unclear for one effective set."""
    if effective.unclear:
        return "unclear"
    for levels in effective.per_period.values():
        nodes = []
        for family, period in sorted(levels):
            by_period = families.get(family, {})
            if period not in by_period:
                raise UnknownNodeError(f"{family}[{period}]")
            nodes.append(by_period[period])
        verdict = backdoor_check(diagram, treatment, outcome, nodes)
        if verdict.status != AdjustStatus.SUFFICIENT:
            return "insufficient"
    return "sufficient"
