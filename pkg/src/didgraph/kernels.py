"""Deterministic numerical fitting primitives.

OLS uses a column-pivoted QR decomposition (rank failures name the
dependent column). Logistic and multinomial likelihoods are maximized by
damped Newton steps (iteratively reweighted least squares in the binary
case) with a step-halving line search; a tiny ridge jitter stabilizes
near-singular Gram matrices. All tolerances live in one config record.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .errors import PreconditionError, RankDeficiencyError, SeparationError


@dataclass(frozen=True)
class Tolerances:
    ols_pivot_rtol: float = 1e-10
    grad_tol: float = 1e-8
    max_iter: int = 100
    separation_norm: float = 1e4
    ridge_jitter: float = 1e-10
    prob_clip: float = 1e-12


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class DesignMatrix:
    """Named design matrix with optional nonnegative observation weights."""

    x: np.ndarray
    names: tuple[str, ...]
    weights: np.ndarray | None = None

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "x", x)
        if x.ndim != 2:
            raise PreconditionError("design must be 2-dimensional")
        if len(self.names) != x.shape[1]:
            raise PreconditionError("column name count mismatch")
        if len(set(self.names)) != len(self.names):
            raise PreconditionError("duplicate column names")
        if not np.all(np.isfinite(x)):
            raise PreconditionError("design contains NaN/Inf")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            object.__setattr__(self, "weights", w)
            if w.shape != (x.shape[0],):
                raise PreconditionError("weight length mismatch")
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise PreconditionError("weights must be finite and nonnegative")


@dataclass(frozen=True)
class FitResult:
    coefficients: Mapping[str, float]
    converged: bool
    iterations: int
    gradient_norm: float
    beta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    extra: Mapping[str, object] = field(default_factory=dict)

    def coef(self, name: str) -> float:
        return self.coefficients[name]


def design(
    columns: Sequence[tuple[str, np.ndarray]], weights: np.ndarray | None = None
) -> DesignMatrix:
    names = tuple(name for name, _ in columns)
    x = np.column_stack([np.asarray(v, dtype=float) for _, v in columns])
    return DesignMatrix(x=x, names=names, weights=weights)


def ols(
    dm: DesignMatrix, y: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> FitResult:
    """Weighted least squares via column-pivoted QR."""
    y = np.asarray(y, dtype=float)
    n, p = dm.x.shape
    if n < p:
        raise PreconditionError(f"n={n} < p={p}")
    if not np.all(np.isfinite(y)):
        raise PreconditionError("response contains NaN/Inf")
    x = dm.x
    if dm.weights is not None:
        sw = np.sqrt(dm.weights)
        x = x * sw[:, None]
        y = y * sw
    q, r, piv = scipy.linalg.qr(x, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    scale = diag[0] if diag.size and diag[0] > 0 else 1.0
    for k in range(p):
        if diag[k] < tol.ols_pivot_rtol * scale:
            raise RankDeficiencyError(dm.names[piv[k]])
    rhs = q.T @ y
    beta_piv = scipy.linalg.solve_triangular(r, rhs)
    beta = np.empty(p)
    beta[piv] = beta_piv
    grad = x.T @ (y - x @ beta)
    return FitResult(
        coefficients={name: float(b) for name, b in zip(dm.names, beta)},
        converged=True,
        iterations=1,
        gradient_norm=float(np.linalg.norm(grad)),
        beta=beta,
    )


def predict_logit(dm: DesignMatrix, beta: np.ndarray, clip: float = 1e-12) -> np.ndarray:
    p = 1.0 / (1.0 + np.exp(-(dm.x @ beta)))
    return np.clip(p, clip, 1.0 - clip)


def logistic(
    dm: DesignMatrix, y: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> FitResult:
    """Bernoulli maximum likelihood via damped IRLS."""
    y = np.asarray(y, dtype=float)
    if set(np.unique(y)) - {0.0, 1.0}:
        raise PreconditionError("logistic response must be 0/1")
    if y.min() == y.max():
        raise PreconditionError("logistic response has a single class")
    w_obs = dm.weights if dm.weights is not None else np.ones(len(y))
    x = dm.x
    beta = np.zeros(x.shape[1])

    def loglik(b: np.ndarray) -> float:
        eta = x @ b
        return float(np.sum(w_obs * (y * eta - np.logaddexp(0.0, eta))))

    ll = loglik(beta)
    grad_norm = np.inf
    for iteration in range(1, tol.max_iter + 1):
        p = predict_logit(dm, beta, tol.prob_clip)
        grad = x.T @ (w_obs * (y - p))
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= tol.grad_tol:
            # a "converged" fit that classifies every observation with
            # overwhelming margin only happens under perfect separation,
            # where clipping silences the true (nonvanishing) gradient
            margins = (2.0 * y - 1.0) * (x @ beta)
            if np.all(margins > 10.0):
                raise SeparationError(
                    "all observations classified with extreme margin; "
                    "likely perfect separation"
                )
            return _finish(dm, beta, True, iteration - 1, grad_norm)
        variance = w_obs * p * (1.0 - p)
        hess = x.T @ (x * variance[:, None])
        hess = hess + tol.ridge_jitter * np.eye(len(beta))
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            raise SeparationError("singular information matrix") from None
        # step halving keeps the log-likelihood non-decreasing (up to
        # rounding, so Newton steps near the optimum are not rejected)
        scale = 1.0
        for _ in range(30):
            candidate = beta + scale * step
            if loglik(candidate) >= ll - 1e-12 * (1.0 + abs(ll)):
                break
            scale /= 2.0
        beta = beta + scale * step
        ll = loglik(beta)
        if float(np.linalg.norm(beta)) > tol.separation_norm:
            raise SeparationError(
                f"coefficient norm exceeded {tol.separation_norm:g}; "
                "likely perfect separation"
            )
    return _finish(dm, beta, False, tol.max_iter, grad_norm)


def _finish(
    dm: DesignMatrix, beta: np.ndarray, converged: bool, iterations: int, gnorm: float
) -> FitResult:
    return FitResult(
        coefficients={name: float(b) for name, b in zip(dm.names, beta)},
        converged=converged,
        iterations=iterations,
        gradient_norm=gnorm,
        beta=beta,
    )


def predict_multinomial(dm: DesignMatrix, beta: np.ndarray, k: int) -> np.ndarray:
    """Class probabilities, reference class 0 with logit fixed at zero."""
    n, p = dm.x.shape
    logits = np.zeros((n, k))
    logits[:, 1:] = dm.x @ beta.reshape(k - 1, p).T
    logits -= logits.max(axis=1, keepdims=True)
    expl = np.exp(logits)
    return expl / expl.sum(axis=1, keepdims=True)


def multinomial(
    dm: DesignMatrix, g: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> FitResult:
    """Multinomial maximum likelihood; classes must be 0..K-1, all present."""
    g = np.asarray(g, dtype=int)
    classes = np.unique(g)
    k = int(classes.max()) + 1
    if set(classes.tolist()) != set(range(k)) or k < 2:
        raise PreconditionError("multinomial classes must be 0..K-1, all present")
    x = dm.x
    n, p = x.shape
    w_obs = dm.weights if dm.weights is not None else np.ones(n)
    onehot = np.zeros((n, k))
    onehot[np.arange(n), g] = 1.0
    beta = np.zeros(p * (k - 1))

    def loglik(b: np.ndarray) -> float:
        probs = predict_multinomial(dm, b, k)
        return float(np.sum(w_obs * np.log(probs[np.arange(n), g] + 1e-300)))

    ll = loglik(beta)
    grad_norm = np.inf
    for iteration in range(1, tol.max_iter + 1):
        probs = predict_multinomial(dm, beta, k)
        resid = (onehot - probs)[:, 1:] * w_obs[:, None]
        # class-major flattening, matching the block layout of the Hessian
        grad = (resid.T @ x).reshape(-1)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= tol.grad_tol:
            return _finish_multi(dm, beta, True, iteration - 1, grad_norm, k)
        hess = np.zeros((p * (k - 1), p * (k - 1)))
        for a in range(1, k):
            for b_cls in range(1, k):
                if a == b_cls:
                    wab = w_obs * probs[:, a] * (1.0 - probs[:, a])
                else:
                    wab = -w_obs * probs[:, a] * probs[:, b_cls]
                block = x.T @ (x * wab[:, None])
                hess[
                    (a - 1) * p : a * p, (b_cls - 1) * p : b_cls * p
                ] = block
        hess += tol.ridge_jitter * np.eye(len(beta))
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            raise SeparationError("singular information matrix") from None
        scale = 1.0
        for _ in range(30):
            if loglik(beta + scale * step) >= ll - 1e-12 * (1.0 + abs(ll)):
                break
            scale /= 2.0
        beta = beta + scale * step
        ll = loglik(beta)
        if float(np.linalg.norm(beta)) > tol.separation_norm:
            raise SeparationError("diverging multinomial fit")
    return _finish_multi(dm, beta, False, tol.max_iter, grad_norm, k)


def _finish_multi(
    dm: DesignMatrix, beta: np.ndarray, converged: bool, iterations: int,
    gnorm: float, k: int,
) -> FitResult:
    p = dm.x.shape[1]
    mat = beta.reshape(k - 1, p)
    coeffs = {
        f"{cls}|{name}": float(mat[cls - 1, j])
        for cls in range(1, k)
        for j, name in enumerate(dm.names)
    }
    return FitResult(
        coefficients=coeffs,
        converged=converged,
        iterations=iterations,
        gradient_norm=gnorm,
        beta=beta,
        extra={"k": k},
    )
