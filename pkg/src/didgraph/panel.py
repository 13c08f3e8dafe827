"""Panel datasets: wide/long/differenced layouts and covariate columns.

The wide frame (one row per unit) is canonical; long and differenced
views are derived from it and reshaping is lossless. Covariate columns
are tracked in a registry describing what each column means (a node at a
period, a time-constant copy, an interaction with the period indicator,
or a change), which is what downstream alignment rules consume.

Covariate tokens accepted by estimators:
  - a node column name ("W0"), meaning that period's value used as a
    time-constant regressor;
  - a family name ("W"), meaning the family's per-period values in long
    layouts and the baseline value in wide layouts (the common software
    default for time-varying covariates);
  - a derived column produced by apply_plan (copy/interaction/change).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from .errors import ConfigError, EstimatorError
from .scenarios import ScenarioSpec


@dataclass(frozen=True)
class ColumnInfo:
    """What a covariate token means.

    kind: node | copy | family | interaction | change
    period: source period for node/copy, target period for change
    base: underlying token for interaction, family name for change
    """

    name: str
    kind: str
    family: str | None = None
    period: int | None = None
    base: str | None = None


@dataclass(frozen=True)
class PlanItem:
    """One covariate-handling instruction.

    strategy: as_is | copy | interact | change
    covariate: a family name (as_is/copy/change) or, for interact, any
    token whose long value should be multiplied by the period indicator.
    period: required for copy (which period's value to freeze).
    """

    covariate: str
    strategy: str = "as_is"
    period: int | None = None

    def token(self, target_period: int) -> str:
        if self.strategy == "as_is":
            return self.covariate
        if self.strategy == "copy":
            return f"{self.covariate}{self.period}_dup"
        if self.strategy == "interact":
            return f"{self.covariate}_x_P"
        if self.strategy == "change":
            return f"d{self.covariate}{target_period}"
        raise ConfigError(f"unknown strategy {self.strategy!r}")


CovariatePlan = tuple[PlanItem, ...]


def plan_from_json(items: Sequence[Mapping]) -> CovariatePlan:
    out = []
    for raw in items:
        unknown = set(raw) - {"covariate", "strategy", "period"}
        if unknown:
            raise ConfigError(f"unknown plan fields: {sorted(unknown)}")
        out.append(
            PlanItem(
                covariate=str(raw["covariate"]),
                strategy=str(raw.get("strategy", "as_is")),
                period=raw.get("period"),
            )
        )
    return tuple(out)


@dataclass(frozen=True)
class PanelDataset:
    """Immutable rectangular panel tied to its generating scenario."""

    scenario: ScenarioSpec
    wide: pd.DataFrame
    columns: Mapping[str, ColumnInfo] = field(default_factory=dict)
    mode: str = "gaussian"
    seed: int = 0

    @property
    def n_units(self) -> int:
        return len(self.wide)

    @property
    def periods(self) -> tuple[int, ...]:
        return (self.scenario.baseline_time,) + tuple(self.scenario.periods)

    def treatment_col(self, period: int) -> str:
        try:
            return self.scenario.treatments[period]
        except KeyError:
            raise ConfigError(f"no treatment defined for period {period}") from None

    def delta_col(self, period: int) -> str:
        try:
            return self.scenario.deltas[period]
        except KeyError:
            raise ConfigError(f"no outcome change for period {period}") from None

    def column_info(self, token: str) -> ColumnInfo:
        if token in self.columns:
            return self.columns[token]
        if token in self.scenario.families:
            return ColumnInfo(name=token, kind="family", family=token)
        for family, by_period in self.scenario.families.items():
            for period, node in by_period.items():
                if node == token:
                    return ColumnInfo(
                        name=token, kind="node", family=family, period=period
                    )
        raise EstimatorError("panel", f"unknown covariate token {token!r}")

    # -- per-token value resolution ------------------------------------

    def family_value_at(self, family: str, period: int) -> np.ndarray:
        """Family value at a period, carrying the latest earlier value
        forward when the family has no node for that period."""
        by_period = self.scenario.families.get(family)
        if not by_period:
            raise EstimatorError("panel", f"unknown covariate family {family!r}")
        usable = [p for p in by_period if p <= period]
        if not usable:
            raise EstimatorError(
                "panel", f"family {family!r} has no value at or before period {period}"
            )
        return self.wide[by_period[max(usable)]].to_numpy(dtype=float)

    def wide_value(self, token: str, target_period: int) -> tuple[np.ndarray, str]:
        """Per-unit regressor for wide-layout estimators.

        Returns (values, note); note records implicit resolution such as
        a family collapsing to its baseline value.
        """
        info = self.column_info(token)
        if info.kind in ("node", "copy", "change"):
            return self.wide[info.name].to_numpy(dtype=float), ""
        if info.kind == "family":
            values = self.family_value_at(info.family or token, self.scenario.baseline_time)
            return values, f"family {token!r} resolved to its baseline value"
        if info.kind == "interaction":
            raise EstimatorError(
                "panel",
                f"interaction column {token!r} is period-dependent and has no "
                "wide-layout value",
            )
        raise EstimatorError("panel", f"unsupported token kind {info.kind!r}")

    def long_value(self, token: str, period: int, target_period: int) -> np.ndarray:
        """Per-unit regressor value at one period for long-layout fits."""
        info = self.column_info(token)
        if info.kind in ("node", "copy", "change"):
            return self.wide[info.name].to_numpy(dtype=float)
        if info.kind == "family":
            return self.family_value_at(info.family or token, period)
        if info.kind == "interaction":
            base = self.long_value(info.base or "", period, target_period)
            indicator = 1.0 if period != self.scenario.baseline_time else 0.0
            return base * indicator
        raise EstimatorError("panel", f"unsupported token kind {info.kind!r}")

    def diff_value(self, token: str, target_period: int) -> np.ndarray | None:
        """Covariate change between baseline and target period; None when
        the token differences out to zero (time-constant regressor)."""
        post = self.long_value(token, target_period, target_period)
        base = self.long_value(token, self.scenario.baseline_time, target_period)
        delta = post - base
        if np.allclose(delta, 0.0):
            return None
        return delta

    # -- plans -----------------------------------------------------------

    def apply_plan(self, plan: CovariatePlan, target_period: int = 1) -> "PanelDataset":
        """Materialize plan columns; idempotent per plan item."""
        wide = self.wide
        registry = dict(self.columns)
        for item in plan:
            token = item.token(target_period)
            if item.strategy == "as_is":
                self.column_info(item.covariate)  # must resolve
                continue
            info: ColumnInfo
            if item.strategy == "copy":
                if item.period is None:
                    raise ConfigError(f"copy of {item.covariate!r} needs a period")
                values = pd.Series(
                    self.family_value_at(item.covariate, item.period), index=wide.index
                )
                info = ColumnInfo(
                    name=token, kind="copy", family=item.covariate, period=item.period
                )
            elif item.strategy == "interact":
                base_info = self.column_info(item.covariate)
                values = None
                info = ColumnInfo(
                    name=token,
                    kind="interaction",
                    family=base_info.family,
                    period=base_info.period,
                    base=item.covariate,
                )
            elif item.strategy == "change":
                post = self.family_value_at(item.covariate, target_period)
                base = self.family_value_at(item.covariate, self.scenario.baseline_time)
                values = pd.Series(post - base, index=wide.index)
                info = ColumnInfo(
                    name=token,
                    kind="change",
                    family=item.covariate,
                    period=target_period,
                    base=item.covariate,
                )
            else:
                raise ConfigError(f"unknown strategy {item.strategy!r}")
            if token in registry:
                if registry[token] != info:
                    raise ConfigError(f"column name collision: {token!r}")
                continue
            if values is not None:
                if token in wide.columns:
                    raise ConfigError(f"column name collision: {token!r}")
                wide = wide.assign(**{token: values})
            registry[token] = info
        return replace(self, wide=wide, columns=registry)

    # -- layouts --------------------------------------------------------

    def to_wide(self) -> pd.DataFrame:
        return self.wide.copy()

    def _treatment_status_at(self, period: int) -> np.ndarray:
        if period == self.scenario.baseline_time:
            return np.zeros(self.n_units)
        usable = [p for p in self.scenario.treatments if p <= period]
        col = self.scenario.treatments[max(usable)]
        return self.wide[col].to_numpy(dtype=float)

    def to_long(self) -> pd.DataFrame:
        """One row per unit-period: unit, period, A, Y, family columns."""
        families = sorted(self.scenario.families)
        frames = []
        for period in self.periods:
            block = pd.DataFrame(
                {
                    "unit": self.wide["unit"].to_numpy(),
                    "period": period,
                    "A": self._treatment_status_at(period),
                    "Y": self.wide[f"Y{period}"].to_numpy(dtype=float),
                }
            )
            for family in families:
                block[family] = self.family_value_at(family, period)
            frames.append(block)
        out = pd.concat(frames, ignore_index=True)
        return out.sort_values(["unit", "period"], kind="stable").reset_index(drop=True)

    def to_differenced(self) -> pd.DataFrame:
        """One row per unit: treatments, outcome changes, covariate changes."""
        cols: dict[str, np.ndarray] = {"unit": self.wide["unit"].to_numpy()}
        for period in sorted(self.scenario.treatments):
            name = self.scenario.treatments[period]
            cols[name] = self.wide[name].to_numpy(dtype=float)
        for period in self.scenario.periods:
            cols[self.delta_col(period)] = self.wide[self.delta_col(period)].to_numpy(
                dtype=float
            )
        for family in sorted(self.scenario.families):
            by_period = self.scenario.families[family]
            base_period = self.scenario.baseline_time
            if base_period not in by_period:
                continue
            for period in self.scenario.periods:
                if period in by_period:
                    cols[f"d{family}{period}"] = (
                        self.wide[by_period[period]].to_numpy(dtype=float)
                        - self.wide[by_period[base_period]].to_numpy(dtype=float)
                    )
        return pd.DataFrame(cols)

    def to_csv(self) -> str:
        """Long layout as RFC-4180 CSV, deterministic row order."""
        long = self.to_long()
        buffer = io.StringIO()
        writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        header = ["unit", "period", "A", "Y"] + sorted(self.scenario.families)
        writer.writerow(header)
        for _, row in long.iterrows():
            writer.writerow(
                [int(row["unit"]), int(row["period"])]
                + [_fmt(row[c]) for c in header[2:]]
            )
        return buffer.getvalue()


def _fmt(value: float) -> str:
    if float(value) == int(value):
        return str(int(value))
    return repr(float(value))


def wide_from_long(long: pd.DataFrame, scenario: ScenarioSpec) -> pd.DataFrame:
    """Invert to_long; exact round-trip for rectangular panels."""
    units = sorted(long["unit"].unique())
    baseline = scenario.baseline_time
    by_unit_period = long.set_index(["unit", "period"])
    cols: dict[str, list[float]] = {"unit": list(units)}
    periods = sorted(long["period"].unique())
    for period in periods:
        cols[f"Y{period}"] = [by_unit_period.loc[(u, period), "Y"] for u in units]
    for period, node in sorted(scenario.treatments.items()):
        cols[node] = [by_unit_period.loc[(u, period), "A"] for u in units]
    for family, by_period in sorted(scenario.families.items()):
        for period, node in sorted(by_period.items()):
            cols[node] = [by_unit_period.loc[(u, period), family] for u in units]
    frame = pd.DataFrame(cols)
    for period in scenario.periods:
        frame[scenario.deltas[period]] = frame[f"Y{period}"] - frame[f"Y{baseline}"]
    return frame
