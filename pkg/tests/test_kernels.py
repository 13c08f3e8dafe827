"""Numerical kernels: OLS, logistic, multinomial, and their failure modes."""

import numpy as np
import pytest

from didgraph.errors import (
    PreconditionError,
    RankDeficiencyError,
    SeparationError,
)
from didgraph.kernels import (
    design,
    logistic,
    multinomial,
    ols,
    predict_logit,
    predict_multinomial,
)


def _rng():
    return np.random.default_rng(12)


# -- OLS ------------------------------------------------------------------------


def test_ols_matches_lstsq():
    rng = _rng()
    x = rng.normal(size=(200, 3))
    beta_true = np.array([1.0, -2.0, 0.5])
    y = x @ beta_true + rng.normal(size=200)
    dm = design([("x1", x[:, 0]), ("x2", x[:, 1]), ("x3", x[:, 2])])
    fit = ols(dm, y)
    expected, *_ = np.linalg.lstsq(x, y, rcond=None)
    assert np.allclose(fit.beta, expected, atol=1e-10)
    assert fit.coef("x2") == pytest.approx(expected[1], abs=1e-10)
    assert fit.converged


def test_ols_weighted():
    rng = _rng()
    x = rng.normal(size=(300, 2))
    y = x @ np.array([2.0, 1.0]) + rng.normal(size=300)
    w = rng.uniform(0.5, 2.0, size=300)
    dm = design([("a", x[:, 0]), ("b", x[:, 1])], weights=w)
    fit = ols(dm, y)
    sw = np.sqrt(w)
    expected, *_ = np.linalg.lstsq(x * sw[:, None], y * sw, rcond=None)
    assert np.allclose(fit.beta, expected, atol=1e-10)


def test_ols_rank_deficiency_names_column():
    rng = _rng()
    x1 = rng.normal(size=100)
    dm = design([("x1", x1), ("x1_again", 2.0 * x1)])
    with pytest.raises(RankDeficiencyError) as err:
        ols(dm, rng.normal(size=100))
    assert "x1" in str(err.value)


def test_ols_preconditions():
    with pytest.raises(PreconditionError):
        ols(design([("a", np.ones(2)), ("b", np.ones(2)), ("c", np.ones(2))]),
            np.ones(2))
    with pytest.raises(PreconditionError):
        design([("a", np.array([1.0, np.nan]))])
    with pytest.raises(PreconditionError):
        design([("a", np.ones(3)), ("a", np.ones(3))])
    with pytest.raises(PreconditionError):
        design([("a", np.ones(3))], weights=np.array([-1.0, 1.0, 1.0]))


# -- logistic ---------------------------------------------------------------------


def _logit_data(n=200000, beta=(0.4, -0.8)):
    rng = _rng()
    x = rng.normal(size=(n, len(beta)))
    p = 1.0 / (1.0 + np.exp(-(x @ np.asarray(beta))))
    return x, rng.binomial(1, p).astype(float)


def test_logistic_recovers_coefficients():
    x, y = _logit_data()
    dm = design([("x1", x[:, 0]), ("x2", x[:, 1])])
    fit = logistic(dm, y)
    assert fit.converged
    assert fit.gradient_norm <= 1e-8
    assert fit.coef("x1") == pytest.approx(0.4, abs=0.02)
    assert fit.coef("x2") == pytest.approx(-0.8, abs=0.02)


def test_logistic_against_1d_grid_oracle():
    """Damped IRLS lands on the same optimum as a brute scalar search."""
    rng = _rng()
    x = rng.normal(size=(3000, 1))
    y = rng.binomial(1, 1.0 / (1.0 + np.exp(-1.2 * x[:, 0]))).astype(float)

    def nll(b):
        eta = b * x[:, 0]
        return -np.sum(y * eta - np.logaddexp(0.0, eta))

    grid = np.linspace(0.5, 2.0, 3001)
    oracle = grid[np.argmin([nll(b) for b in grid])]
    fit = logistic(design([("x", x[:, 0])]), y)
    assert fit.coef("x") == pytest.approx(oracle, abs=1e-3)


def test_logistic_weighted_replication_equivalence():
    """Integer weights behave like row replication."""
    rng = _rng()
    x = rng.normal(size=(400, 1))
    y = rng.binomial(1, 0.5, size=400).astype(float)
    w = rng.integers(1, 4, size=400).astype(float)
    weighted = logistic(design([("x", x[:, 0]), ("c", np.ones(400))], weights=w), y)
    xr = np.repeat(x[:, 0], w.astype(int))
    yr = np.repeat(y, w.astype(int))
    replicated = logistic(design([("x", xr), ("c", np.ones(len(xr)))]), yr)
    assert weighted.coef("x") == pytest.approx(replicated.coef("x"), abs=1e-6)


def test_logistic_separation():
    x = np.concatenate([np.full(50, -1.0), np.full(50, 1.0)])
    y = (x > 0).astype(float)
    with pytest.raises(SeparationError):
        logistic(design([("x", x), ("c", np.ones(100))]), y)


def test_logistic_single_class():
    with pytest.raises(PreconditionError):
        logistic(design([("c", np.ones(10))]), np.ones(10))
    with pytest.raises(PreconditionError):
        logistic(design([("c", np.ones(10))]), np.full(10, 0.5))


def test_predict_logit_clipped():
    dm = design([("x", np.array([-1000.0, 1000.0]))])
    p = predict_logit(dm, np.array([1.0]))
    assert p[0] >= 1e-12 and p[1] <= 1 - 1e-12


# -- multinomial ------------------------------------------------------------------


def test_multinomial_reduces_to_logistic_for_two_classes():
    x, y = _logit_data(n=20000, beta=(0.6,))
    dm = design([("x", x[:, 0])])
    multi = multinomial(dm, y.astype(int))
    binary = logistic(dm, y)
    assert multi.coefficients["1|x"] == pytest.approx(binary.coef("x"), abs=1e-6)


def test_multinomial_gradient_zero_and_probs_normalized():
    rng = _rng()
    n = 5000
    x = rng.normal(size=(n, 2))
    logits = np.column_stack([np.zeros(n), x @ [0.5, -0.2], x @ [-0.3, 0.4]])
    probs = np.exp(logits) / np.exp(logits).sum(axis=1, keepdims=True)
    g = np.array([rng.choice(3, p=p) for p in probs])
    dm = design([("x1", x[:, 0]), ("x2", x[:, 1])])
    fit = multinomial(dm, g)
    assert fit.converged and fit.gradient_norm <= 1e-8
    predicted = predict_multinomial(dm, fit.beta, 3)
    assert np.allclose(predicted.sum(axis=1), 1.0, atol=1e-12)
    assert fit.coefficients["1|x1"] == pytest.approx(0.5, abs=0.1)
    assert fit.coefficients["2|x2"] == pytest.approx(0.4, abs=0.1)


def test_multinomial_requires_contiguous_classes():
    dm = design([("c", np.ones(10))])
    with pytest.raises(PreconditionError):
        multinomial(dm, np.array([0, 0, 0, 0, 0, 3, 3, 3, 3, 3]))
