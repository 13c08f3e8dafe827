"""Covariance algebra for standardized linear SCMs.

Stochastic nodes follow the standardized convention: each one's
structural-error variance is 1 minus the variance explained by its
parents, so every stochastic node has unit variance and path-tracing
sums equal model covariances exactly. Deterministic nodes (delta nodes,
or nodes flagged deterministic) carry no error term; their variances are
implied by their parents and are not renormalized.

Covariances are computed by the topological recursion
sigma(u, v) = sum_p w_p * sigma(u, p) over the parents p of the later
node v, which reproduces the path-tracing sums and stays exact when
deterministic nodes have non-unit variance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AdmissibilityError,
    AssignmentError,
    CapacityError,
    SingularityError,
)
from .graph import CausalDiagram, UnknownNodeError
from .poly import PolyExpr
from .transform import _fresh_symbols

_TERM_CAP = 1_000_000
_COND_CAP = 1e12


def diagram_symbols(diagram: CausalDiagram) -> frozenset[str]:
    """All symbols appearing on edges (unlabeled edges get fresh names)."""
    labeled = _fresh_symbols(diagram)
    out: set[str] = set()
    for e in labeled.edges:
        assert e.coeff is not None
        out |= e.coeff.symbols()
    return frozenset(out)


class _SymbolicCovariance:
    def __init__(self, diagram: CausalDiagram):
        self.diagram = _fresh_symbols(diagram)
        order = self.diagram.topological_order
        self.rank = {name: i for i, name in enumerate(order)}
        self.cache: dict[tuple[str, str], PolyExpr] = {}
        self.term_budget = _TERM_CAP

    def _spend(self, poly: PolyExpr) -> PolyExpr:
        self.term_budget -= sum(1 for _ in poly.terms())
        if self.term_budget < 0:
            raise CapacityError("path-tracing term budget exceeded")
        return poly

    def cov(self, u: str, v: str) -> PolyExpr:
        if self.rank[u] > self.rank[v]:
            u, v = v, u
        key = (u, v)
        if key in self.cache:
            return self.cache[key]
        if u == v:
            node = self.diagram.node(u)
            if node.is_deterministic():
                result = self._bilinear(u)
            else:
                result = PolyExpr.one()
        else:
            result = PolyExpr.zero()
            for e in self.diagram.parent_map[v]:
                assert e.coeff is not None
                result = result + e.coeff * self.cov(u, e.src)
        self.cache[key] = self._spend(result)
        return result

    def _bilinear(self, name: str) -> PolyExpr:
        total = PolyExpr.zero()
        parents = self.diagram.parent_map[name]
        for e1 in parents:
            for e2 in parents:
                assert e1.coeff is not None and e2.coeff is not None
                total = total + e1.coeff * e2.coeff * self.cov(e1.src, e2.src)
        return total


def trek_covariance(diagram: CausalDiagram, u: str, v: str) -> PolyExpr:
    """Symbolic model covariance between two nodes via path tracing.

    sigma(n, n) = 1 for stochastic nodes; deterministic nodes get their
    implied variance.
    """
    diagram.node(u)
    diagram.node(v)
    return _SymbolicCovariance(diagram).cov(u, v)


@dataclass(frozen=True)
class ImpliedCovariance:
    """Node-indexed symmetric covariance matrix."""

    order: tuple[str, ...]
    matrix: np.ndarray  # shape (k, k)

    def index(self, name: str) -> int:
        try:
            return self.order.index(name)
        except ValueError:
            raise UnknownNodeError(name) from None

    def entry(self, u: str, v: str) -> float:
        return float(self.matrix[self.index(u), self.index(v)])

    def submatrix(self, names: Sequence[str]) -> np.ndarray:
        idx = [self.index(n) for n in names]
        return self.matrix[np.ix_(idx, idx)]

    def vector(self, names: Sequence[str], target: str) -> np.ndarray:
        idx = [self.index(n) for n in names]
        return self.matrix[idx, self.index(target)]


def node_error_variances(
    diagram: CausalDiagram, assignment: Mapping[str, float]
) -> dict[str, float]:
    """Structural-error variance per node under the assignment.

    Raises AdmissibilityError when a stochastic node's explained
    variance reaches 1.
    """
    sigma = implied_covariance(diagram, assignment)
    labeled = _fresh_symbols(diagram)
    out: dict[str, float] = {}
    for name in labeled.topological_order:
        node = labeled.node(name)
        if node.is_deterministic():
            out[name] = 0.0
            continue
        parents = labeled.parent_map[name]
        if not parents:
            out[name] = 1.0
            continue
        w = np.array([e.coeff.evaluate(assignment) for e in parents])
        sub = sigma.submatrix([e.src for e in parents])
        out[name] = 1.0 - float(w @ sub @ w)
    return out


def implied_covariance(
    diagram: CausalDiagram, assignment: Mapping[str, float]
) -> ImpliedCovariance:
    """Numeric covariance matrix of the standardized linear SCM."""
    labeled = _fresh_symbols(diagram)
    missing = diagram_symbols(labeled) - set(assignment)
    if missing:
        raise AssignmentError(f"assignment missing symbols: {sorted(missing)}")
    order = labeled.topological_order
    k = len(order)
    idx = {name: i for i, name in enumerate(order)}
    mat = np.zeros((k, k))
    for i, name in enumerate(order):
        node = labeled.node(name)
        parents = labeled.parent_map[name]
        if not parents:
            mat[i, i] = 0.0 if node.is_deterministic() else 1.0
            continue
        w = np.array([e.coeff.evaluate(assignment) for e in parents])
        pidx = [idx[e.src] for e in parents]
        cross = w @ mat[pidx, :]
        mat[i, :] = cross
        mat[:, i] = cross
        explained = float(w @ mat[np.ix_(pidx, pidx)] @ w)
        if node.is_deterministic():
            mat[i, i] = explained
        else:
            if explained >= 1.0 - 1e-12:
                raise AdmissibilityError(name, explained)
            mat[i, i] = 1.0
    return ImpliedCovariance(order=tuple(order), matrix=mat)


def partial_regression(
    sigma: ImpliedCovariance, y: str, a: str, z: Iterable[str]
) -> float:
    """Coefficient on a in the population projection of y on (a, z)."""
    zs = sorted(set(z))
    names = [a] + zs
    sub = sigma.submatrix(names)
    if np.linalg.cond(sub) >= _COND_CAP:
        raise SingularityError(f"covariance submatrix for {names} is singular")
    beta = np.linalg.solve(sub, sigma.vector(names, y))
    return float(beta[0])


def sample_admissible(
    diagram: CausalDiagram,
    rng: np.random.Generator,
    low: float = -0.4,
    high: float = 0.4,
    max_attempts: int = 200,
) -> dict[str, float]:
    """Rejection-sample a coefficient assignment with admissible variances."""
    symbols = sorted(diagram_symbols(diagram))
    for _ in range(max_attempts):
        assignment = {s: float(rng.uniform(low, high)) for s in symbols}
        try:
            implied_covariance(diagram, assignment)
        except AdmissibilityError:
            continue
        return assignment
    raise AdmissibilityError(
        "<sampling>", float("nan")
    )  # pragma: no cover - scenario graphs accept quickly


def identity_check(
    diagram: CausalDiagram,
    y: str,
    a: str,
    z: Iterable[str],
    claim: PolyExpr,
    trials: int = 20,
    seed: int = 0,
    tol: float = 1e-8,
) -> bool:
    """Randomized polynomial identity test of a partial-regression claim.

    True iff the partial regression coefficient matches the claim within
    tol at every one of `trials` random admissible assignments.
    """
    if trials < 1:
        raise AssignmentError("trials must be >= 1")
    zs = list(z)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        assignment = sample_admissible(diagram, rng)
        sigma = implied_covariance(diagram, assignment)
        beta = partial_regression(sigma, y, a, zs)
        if abs(beta - claim.evaluate(assignment)) > tol:
            return False
    return True
