"""The difference-in-differences estimator collection.

Every estimator is a pure function of (PanelDataset, EstimatorSpec) and
returns a point estimate plus diagnostics. Estimators differ in the data
layout they fit on (wide outcome changes, stacked two-period long data,
or unit-level differences) and in how supplied covariates enter, which
is exactly what the alignment rules in `align` characterize.

Registry labels (stable public identifiers):

    label                 kind              procedure
    --------------------  ----------------  ---------------------------------
    dY(X)                 delta_y           OLS of outcome change on A and X
    Y(X) TWFE             twfe              two-period interaction OLS,
                                            pooled covariate coefficients
    Y(X:P) TWFE           twfe_augmented    same, covariates interacted with
                                            the period indicator
    e(dY(dX))             dcdh              control-group fit on covariate
                                            changes, difference of residuals
    e(dY(X))              heckman_or        control-group outcome regression,
                                            average treated residual
    w(X) dY               abadie_ipw        odds-weighted control mean of
                                            outcome changes vs treated mean
    w(X)e(dY(X)) DR       sz_dr             doubly robust: weights applied to
                                            outcome-regression residuals
    wg(X) Y               stuart_group_ps   multinomial group-membership
                                            weights, weighted TWFE
    wt(X) Y               stuart_time_ps    per-period propensity weights,
                                            weighted TWFE
    wt_ATT(X) dY          myint_att         per-period ATT weights on changes
    wt_ATE(X) dY          myint_ate         stabilized ATE weights on changes
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import EstimatorError, KernelError
from .kernels import DesignMatrix, design, logistic, multinomial, ols
from .panel import PanelDataset


class EstimatorKind(str, Enum):
    DELTA_Y = "delta_y"
    TWFE = "twfe"
    TWFE_AUGMENTED = "twfe_augmented"
    DCDH = "dcdh"
    HECKMAN_OR = "heckman_or"
    ABADIE_IPW = "abadie_ipw"
    SZ_DR = "sz_dr"
    STUART_GROUP_PS = "stuart_group_ps"
    STUART_TIME_PS = "stuart_time_ps"
    MYINT_ATT = "myint_att"
    MYINT_ATE = "myint_ate"


TABLE_LABELS: dict[str, EstimatorKind] = {
    "dY(X)": EstimatorKind.DELTA_Y,
    "Y(X) TWFE": EstimatorKind.TWFE,
    "Y(X:P) TWFE": EstimatorKind.TWFE_AUGMENTED,
    "e(dY(dX))": EstimatorKind.DCDH,
    "e(dY(X))": EstimatorKind.HECKMAN_OR,
    "w(X) dY": EstimatorKind.ABADIE_IPW,
    "w(X)e(dY(X)) DR": EstimatorKind.SZ_DR,
    "wg(X) Y": EstimatorKind.STUART_GROUP_PS,
    "wt(X) Y": EstimatorKind.STUART_TIME_PS,
    "wt_ATT(X) dY": EstimatorKind.MYINT_ATT,
    "wt_ATE(X) dY": EstimatorKind.MYINT_ATE,
}

LABEL_OF_KIND = {kind: label for label, kind in TABLE_LABELS.items()}

_EXTREME_PS = 1.0 - 1e-6


@dataclass(frozen=True)
class EstimatorSpec:
    kind: EstimatorKind
    covariates: tuple[str, ...] = ()
    target_period: int = 1
    options: Mapping[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    n_treated: int
    n_control: int
    diagnostics: Mapping[str, object] = field(default_factory=dict)


def resolve_kind(name: str) -> EstimatorKind:
    if name in TABLE_LABELS:
        return TABLE_LABELS[name]
    try:
        return EstimatorKind(name)
    except ValueError:
        raise EstimatorError(name, "unknown estimator kind or label") from None


def estimate(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    """Dispatch to the estimator implementation for spec.kind."""
    handler = _HANDLERS[spec.kind]
    try:
        return handler(data, spec)
    except KernelError as exc:
        raise EstimatorError(spec.kind.value, str(exc)) from exc


# -- shared pieces -----------------------------------------------------------


def _groups(data: PanelDataset, spec: EstimatorSpec) -> tuple[np.ndarray, np.ndarray]:
    a = data.wide[data.treatment_col(spec.target_period)].to_numpy(dtype=float)
    dy = data.wide[data.delta_col(spec.target_period)].to_numpy(dtype=float)
    if a.min() == a.max():
        raise EstimatorError(spec.kind.value, "both treated and control units required")
    return a, dy


def _wide_columns(
    data: PanelDataset, tokens: Sequence[str], target_period: int
) -> tuple[list[tuple[str, np.ndarray]], list[str]]:
    cols = []
    notes = []
    for token in tokens:
        values, note = data.wide_value(token, target_period)
        cols.append((token, values))
        if note:
            notes.append(note)
    return cols, notes


def _weighted_group_means(
    dy: np.ndarray, a: np.ndarray, w_treated: np.ndarray, w_control: np.ndarray
) -> float:
    treated = a == 1
    wt = w_treated / w_treated.sum()
    wc = w_control / w_control.sum()
    return float(wt @ dy[treated] - wc @ dy[~treated])


def _fit_ps(
    data: PanelDataset, spec: EstimatorSpec, tokens: Sequence[str], a: np.ndarray
) -> tuple[np.ndarray, kernels.FitResult]:
    cols, _ = _wide_columns(data, tokens, spec.target_period)
    dm = design([("const", np.ones(len(a)))] + cols)
    fit = logistic(dm, a)
    e = kernels.predict_logit(dm, fit.beta)
    return e, fit


def _check_positivity(kind: EstimatorKind, e: np.ndarray, a: np.ndarray) -> None:
    if np.any(e > _EXTREME_PS) or np.any(e < 1.0 - _EXTREME_PS):
        raise EstimatorError(kind.value, "extreme propensity score (positivity)")


# -- wide estimators ---------------------------------------------------------


def est_delta_y(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    a, dy = _groups(data, spec)
    cols, notes = _wide_columns(data, spec.covariates, spec.target_period)
    dm = design([("const", np.ones(len(a))), ("A", a)] + cols)
    fit = ols(dm, dy)
    return EstimateResult(
        estimate=fit.coef("A"),
        n_treated=int((a == 1).sum()),
        n_control=int((a == 0).sum()),
        diagnostics={"notes": notes},
    )


def est_heckman_or(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    a, dy = _groups(data, spec)
    cols, notes = _wide_columns(data, spec.covariates, spec.target_period)
    control = a == 0
    if control.sum() < len(cols) + 1:
        raise EstimatorError(spec.kind.value, "fewer controls than parameters")
    dm_control = design(
        [("const", np.ones(int(control.sum())))]
        + [(name, values[control]) for name, values in cols]
    )
    fit = ols(dm_control, dy[control])
    dm_all = design([("const", np.ones(len(a)))] + cols)
    predicted = dm_all.x @ fit.beta
    residual = dy - predicted
    return EstimateResult(
        estimate=float(residual[a == 1].mean()),
        n_treated=int((a == 1).sum()),
        n_control=int(control.sum()),
        diagnostics={"notes": notes},
    )


def est_dcdh(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    a, dy = _groups(data, spec)
    control = a == 0
    if not control.any():
        raise EstimatorError(spec.kind.value, "no control units")
    cols = []
    dropped = []
    for token in spec.covariates:
        delta = data.diff_value(token, spec.target_period)
        if delta is None:
            dropped.append(token)
            continue
        cols.append((f"d_{token}", delta))
    dm_control = design(
        [("const", np.ones(int(control.sum())))]
        + [(name, values[control]) for name, values in cols]
    )
    fit = ols(dm_control, dy[control])
    dm_all = design([("const", np.ones(len(a)))] + cols)
    residual = dy - dm_all.x @ fit.beta
    diagnostics: dict[str, object] = {}
    if dropped:
        diagnostics["dropped_columns"] = dropped
        diagnostics["warning"] = (
            "time-constant covariates difference out to zero and were dropped"
        )
    return EstimateResult(
        estimate=float(residual[a == 1].mean() - residual[control].mean()),
        n_treated=int((a == 1).sum()),
        n_control=int(control.sum()),
        diagnostics=diagnostics,
    )


def est_abadie_ipw(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    a, dy = _groups(data, spec)
    e, fit = _fit_ps(data, spec, spec.covariates, a)
    _check_positivity(spec.kind, e, a)
    odds = e / (1.0 - e)
    w_treated = np.ones(int((a == 1).sum()))
    w_control = odds[a == 0]
    return EstimateResult(
        estimate=_weighted_group_means(dy, a, w_treated, w_control),
        n_treated=int((a == 1).sum()),
        n_control=int((a == 0).sum()),
        diagnostics={
            "ps_converged": fit.converged,
            "weight_min": float(w_control.min()),
            "weight_max": float(w_control.max()),
        },
    )


def est_sz_dr(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    a, dy = _groups(data, spec)
    ps_tokens = tuple(spec.options.get("ps_covariates", spec.covariates))  # type: ignore[arg-type]
    or_tokens = tuple(spec.options.get("or_covariates", spec.covariates))  # type: ignore[arg-type]
    e, ps_fit = _fit_ps(data, spec, ps_tokens, a)
    _check_positivity(spec.kind, e, a)
    cols, _ = _wide_columns(data, or_tokens, spec.target_period)
    control = a == 0
    dm_control = design(
        [("const", np.ones(int(control.sum())))]
        + [(name, values[control]) for name, values in cols]
    )
    or_fit = ols(dm_control, dy[control])
    dm_all = design([("const", np.ones(len(a)))] + cols)
    residual = dy - dm_all.x @ or_fit.beta
    odds = e / (1.0 - e)
    w_treated = np.ones(int((a == 1).sum()))
    w_control = odds[control]
    return EstimateResult(
        estimate=_weighted_group_means(residual, a, w_treated, w_control),
        n_treated=int((a == 1).sum()),
        n_control=int(control.sum()),
        diagnostics={"ps_converged": ps_fit.converged, "or_converged": or_fit.converged},
    )


def _myint(data: PanelDataset, spec: EstimatorSpec, ate: bool) -> EstimateResult:
    a, dy = _groups(data, spec)
    e, fit = _fit_ps(data, spec, spec.covariates, a)
    _check_positivity(spec.kind, e, a)
    if ate:
        share = float(a.mean())
        w_treated = share / e[a == 1]
        w_control = (1.0 - share) / (1.0 - e[a == 0])
    else:
        w_treated = np.ones(int((a == 1).sum()))
        w_control = e[a == 0] / (1.0 - e[a == 0])
    return EstimateResult(
        estimate=_weighted_group_means(dy, a, w_treated, w_control),
        n_treated=int((a == 1).sum()),
        n_control=int((a == 0).sum()),
        diagnostics={
            "ps_converged": fit.converged,
            "weight_min": float(min(w_treated.min(), w_control.min())),
            "weight_max": float(max(w_treated.max(), w_control.max())),
        },
    )


def est_myint_att(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    return _myint(data, spec, ate=False)


def est_myint_ate(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    return _myint(data, spec, ate=True)


# -- long (two-period) estimators --------------------------------------------


def _stack(
    data: PanelDataset, spec: EstimatorSpec
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, list[int]]:
    """Stack baseline and target-period rows: y, group A, period P."""
    base = data.scenario.baseline_time
    target = spec.target_period
    a = data.wide[data.treatment_col(target)].to_numpy(dtype=float)
    y0 = data.wide[f"Y{base}"].to_numpy(dtype=float)
    y1 = data.wide[f"Y{target}"].to_numpy(dtype=float)
    y = np.concatenate([y0, y1])
    a_long = np.concatenate([a, a])
    p_long = np.concatenate([np.zeros(len(a)), np.ones(len(a))])
    units = np.concatenate([np.arange(len(a)), np.arange(len(a))])
    return y, a_long, p_long, units, [base, target]


def _long_covariate(
    data: PanelDataset, token: str, periods: list[int], target: int
) -> np.ndarray:
    return np.concatenate(
        [data.long_value(token, period, target) for period in periods]
    )


def _twfe(
    data: PanelDataset, spec: EstimatorSpec, augmented: bool,
    weights: np.ndarray | None = None, tokens: Sequence[str] | None = None,
) -> EstimateResult:
    y, a_long, p_long, _, periods = _stack(data, spec)
    columns: list[tuple[str, np.ndarray]] = [
        ("const", np.ones(len(y))),
        ("A", a_long),
        ("P", p_long),
        ("A:P", a_long * p_long),
    ]
    used = spec.covariates if tokens is None else tuple(tokens)
    for token in used:
        values = _long_covariate(data, token, periods, spec.target_period)
        columns.append((token, values))
        if augmented:
            columns.append((f"{token}:P", values * p_long))
    dm = DesignMatrix(
        x=np.column_stack([v for _, v in columns]),
        names=tuple(name for name, _ in columns),
        weights=weights,
    )
    fit = ols(dm, y)
    a = data.wide[data.treatment_col(spec.target_period)].to_numpy(dtype=float)
    return EstimateResult(
        estimate=fit.coef("A:P"),
        n_treated=int((a == 1).sum()),
        n_control=int((a == 0).sum()),
        diagnostics={},
    )


def est_twfe(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    return _twfe(data, spec, augmented=False)


def est_twfe_augmented(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    return _twfe(data, spec, augmented=True)


def est_stuart_group_ps(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    y, a_long, p_long, _, periods = _stack(data, spec)
    n_rows = len(y)
    # group coding: 0 = treated/pre (reference), 1 = treated/post,
    # 2 = control/pre, 3 = control/post
    g = np.where(a_long == 1, p_long, 2 + p_long).astype(int)
    if len(np.unique(g)) < 4:
        raise EstimatorError(spec.kind.value, "empty treatment-by-period cell")
    cols = [("const", np.ones(n_rows))]
    for token in spec.covariates:
        cols.append((token, _long_covariate(data, token, periods, spec.target_period)))
    dm = design(cols)
    fit = multinomial(dm, g)
    probs = kernels.predict_multinomial(dm, fit.beta, 4)
    own = probs[np.arange(n_rows), g]
    if np.any(own < 1e-10):
        raise EstimatorError(spec.kind.value, "vanishing group probability")
    weights = probs[:, 0] / own
    result = _twfe(data, spec, augmented=False, weights=weights, tokens=())
    diag = dict(result.diagnostics)
    diag.update(
        {
            "ps_converged": fit.converged,
            "weight_min": float(weights.min()),
            "weight_max": float(weights.max()),
            "effective_set": "unclear",
        }
    )
    return EstimateResult(result.estimate, result.n_treated, result.n_control, diag)


def est_stuart_time_ps(data: PanelDataset, spec: EstimatorSpec) -> EstimateResult:
    y, a_long, p_long, _, periods = _stack(data, spec)
    n = len(y) // 2
    weights = np.zeros(len(y))
    converged = True
    for block, period in enumerate(periods):
        rows = slice(block * n, (block + 1) * n)
        cols = [("const", np.ones(n))]
        for token in spec.covariates:
            cols.append((token, data.long_value(token, period, spec.target_period)))
        dm = design(cols)
        a = a_long[rows]
        fit = logistic(dm, a)
        converged = converged and fit.converged
        e = kernels.predict_logit(dm, fit.beta)
        if np.any(e > _EXTREME_PS) or np.any(e < 1.0 - _EXTREME_PS):
            raise EstimatorError(spec.kind.value, "extreme propensity score (positivity)")
        weights[rows] = np.where(a == 1, 1.0 / e, 1.0 / (1.0 - e))
    result = _twfe(data, spec, augmented=False, weights=weights, tokens=())
    diag = dict(result.diagnostics)
    diag.update(
        {
            "ps_converged": converged,
            "weight_min": float(weights.min()),
            "weight_max": float(weights.max()),
        }
    )
    return EstimateResult(result.estimate, result.n_treated, result.n_control, diag)


_HANDLERS = {
    EstimatorKind.DELTA_Y: est_delta_y,
    EstimatorKind.TWFE: est_twfe,
    EstimatorKind.TWFE_AUGMENTED: est_twfe_augmented,
    EstimatorKind.DCDH: est_dcdh,
    EstimatorKind.HECKMAN_OR: est_heckman_or,
    EstimatorKind.ABADIE_IPW: est_abadie_ipw,
    EstimatorKind.SZ_DR: est_sz_dr,
    EstimatorKind.STUART_GROUP_PS: est_stuart_group_ps,
    EstimatorKind.STUART_TIME_PS: est_stuart_time_ps,
    EstimatorKind.MYINT_ATT: est_myint_att,
    EstimatorKind.MYINT_ATE: est_myint_ate,
}
