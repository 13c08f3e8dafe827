"""Causal diagrams: typed DAGs with d-separation and backdoor queries.

Diagrams are immutable; every query is a pure function. Two forms exist:
"natural" diagrams carry outcome-level nodes plus deterministic delta
nodes, "compact" diagrams have outcome levels marginalized away so that
adjustment-set reasoning can use the standard backdoor criterion.

Sufficiency is decided symbolically: a conditioning set is sufficient
when the polynomial sum of coefficient products over all open backdoor
paths is identically zero. Offsetting paths (equal labels with opposite
signs) therefore count as blocked, matching the equal-label convention
used to encode constancy constraints on diagram edges.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    CapacityError,
    CyclicGraphError,
    FormError,
    ParseError,
    UnknownNodeError,
)
from .poly import PolyExpr


class Role(str, Enum):
    TREATMENT = "treatment"
    OUTCOME_LEVEL = "outcome_level"
    OUTCOME_DELTA = "outcome_delta"
    COVARIATE = "covariate"
    LATENT_CONFOUNDER = "latent_confounder"
    OTHER = "other"


class Form(str, Enum):
    NATURAL = "natural"
    COMPACT = "compact"


class AdjustStatus(str, Enum):
    SUFFICIENT = "sufficient"
    INSUFFICIENT = "insufficient"
    INVALID_DESCENDANT = "invalid_descendant"
    INVALID_UNOBSERVED = "invalid_unobserved"


@dataclass(frozen=True)
class NodeSpec:
    """One diagram node.

    post/baseline bind an outcome_delta node to the two outcome_level
    nodes it differences. deterministic marks nodes with no structural
    error term (delta nodes are always deterministic).
    """

    name: str
    time: int | None = None
    observed: bool = True
    role: Role = Role.OTHER
    post: str | None = None
    baseline: str | None = None
    deterministic: bool = False

    def is_deterministic(self) -> bool:
        return self.deterministic or self.role == Role.OUTCOME_DELTA


@dataclass(frozen=True)
class EdgeSpec:
    """Directed edge with an optional symbolic coefficient label."""

    src: str
    dst: str
    coeff: PolyExpr | None = None

    def label(self) -> str | None:
        return None if self.coeff is None else str(self.coeff).replace(" ", "")


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str  # "error" | "warning"
    message: str
    element: str


@dataclass(frozen=True)
class AdjustmentVerdict:
    """Backdoor verdict for one conditioning set.

    open_paths are witnesses (node-name sequences) when insufficient;
    path_sum is the symbolic sum of open-path coefficient products
    (zero polynomial means all open paths offset exactly).
    """

    status: AdjustStatus
    open_paths: tuple[tuple[str, ...], ...] = ()
    path_sum: PolyExpr | None = None
    detail: str = ""


@dataclass(frozen=True)
class CausalDiagram:
    nodes: tuple[NodeSpec, ...]
    edges: tuple[EdgeSpec, ...]
    form: Form = Form.NATURAL

    # -- structure ---------------------------------------------------------

    @cached_property
    def node_map(self) -> dict[str, NodeSpec]:
        return {n.name: n for n in self.nodes}

    @cached_property
    def parent_map(self) -> dict[str, tuple[EdgeSpec, ...]]:
        out: dict[str, list[EdgeSpec]] = {n.name: [] for n in self.nodes}
        for e in self.edges:
            if e.dst in out:
                out[e.dst].append(e)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def child_map(self) -> dict[str, tuple[EdgeSpec, ...]]:
        out: dict[str, list[EdgeSpec]] = {n.name: [] for n in self.nodes}
        for e in self.edges:
            if e.src in out:
                out[e.src].append(e)
        return {k: tuple(v) for k, v in out.items()}

    def node(self, name: str) -> NodeSpec:
        try:
            return self.node_map[name]
        except KeyError:
            raise UnknownNodeError(name) from None

    def parents(self, name: str) -> tuple[str, ...]:
        self.node(name)
        return tuple(e.src for e in self.parent_map.get(name, ()))

    def children(self, name: str) -> tuple[str, ...]:
        self.node(name)
        return tuple(e.dst for e in self.child_map.get(name, ()))

    def edge(self, src: str, dst: str) -> EdgeSpec | None:
        for e in self.edges:
            if e.src == src and e.dst == dst:
                return e
        return None

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        indeg = {n.name: 0 for n in self.nodes}
        for e in self.edges:
            if e.dst in indeg and e.src in indeg:
                indeg[e.dst] += 1
        ready = sorted(n for n, d in indeg.items() if d == 0)
        order: list[str] = []
        while ready:
            cur = ready.pop(0)
            order.append(cur)
            changed = False
            for e in self.child_map.get(cur, ()):
                indeg[e.dst] -= 1
                if indeg[e.dst] == 0:
                    ready.append(e.dst)
                    changed = True
            if changed:
                ready.sort()
        if len(order) != len(self.nodes):
            raise CyclicGraphError("diagram contains a directed cycle")
        return tuple(order)

    def is_acyclic(self) -> bool:
        try:
            self.topological_order
            return True
        except CyclicGraphError:
            return False

    def descendants(self, name: str) -> frozenset[str]:
        self.node(name)
        seen = {name}
        stack = [name]
        while stack:
            cur = stack.pop()
            for e in self.child_map.get(cur, ()):
                if e.dst not in seen:
                    seen.add(e.dst)
                    stack.append(e.dst)
        return frozenset(seen)

    def ancestors(self, name: str) -> frozenset[str]:
        self.node(name)
        seen = {name}
        stack = [name]
        while stack:
            cur = stack.pop()
            for e in self.parent_map.get(cur, ()):
                if e.src not in seen:
                    seen.add(e.src)
                    stack.append(e.src)
        return frozenset(seen)

    def with_edges(self, edges: Iterable[EdgeSpec]) -> "CausalDiagram":
        return CausalDiagram(self.nodes, tuple(edges), self.form)

    # -- JSON ---------------------------------------------------------------

    def to_json_dict(self) -> dict:
        nodes = []
        for n in self.nodes:
            item: dict = {"name": n.name, "observed": n.observed, "role": n.role.value}
            if n.time is not None:
                item["time"] = n.time
            if n.post is not None:
                item["post"] = n.post
            if n.baseline is not None:
                item["baseline"] = n.baseline
            if n.deterministic:
                item["deterministic"] = True
            nodes.append(item)
        edges = []
        for e in self.edges:
            item = {"src": e.src, "dst": e.dst}
            if e.coeff is not None:
                if e.coeff.is_constant():
                    value = e.coeff.constant_value()
                    item["coeff"] = (
                        int(value) if value.denominator == 1 else float(value)
                    )
                else:
                    item["coeff"] = e.label()
            edges.append(item)
        return {"form": self.form.value, "nodes": nodes, "edges": edges}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "CausalDiagram":
        if not isinstance(data, Mapping):
            raise ParseError("graph JSON must be an object")
        allowed_top = {"form", "nodes", "edges"}
        unknown = set(data) - allowed_top
        if unknown:
            raise ParseError(f"unknown graph fields: {sorted(unknown)}")
        try:
            form = Form(data.get("form", "natural"))
        except ValueError:
            raise ParseError(f"unknown form: {data.get('form')!r}") from None
        node_fields = {"name", "time", "observed", "role", "post", "baseline", "deterministic"}
        nodes = []
        for raw in data.get("nodes", []):
            unknown = set(raw) - node_fields
            if unknown:
                raise ParseError(f"unknown node fields: {sorted(unknown)}")
            if "name" not in raw:
                raise ParseError("node missing name")
            try:
                role = Role(raw.get("role", "other"))
            except ValueError:
                raise ParseError(f"unknown role: {raw.get('role')!r}") from None
            nodes.append(
                NodeSpec(
                    name=str(raw["name"]),
                    time=raw.get("time"),
                    observed=bool(raw.get("observed", True)),
                    role=role,
                    post=raw.get("post"),
                    baseline=raw.get("baseline"),
                    deterministic=bool(raw.get("deterministic", False)),
                )
            )
        edge_fields = {"src", "dst", "coeff"}
        edges = []
        for raw in data.get("edges", []):
            unknown = set(raw) - edge_fields
            if unknown:
                raise ParseError(f"unknown edge fields: {sorted(unknown)}")
            if "src" not in raw or "dst" not in raw:
                raise ParseError("edge missing src/dst")
            coeff_raw = raw.get("coeff")
            if coeff_raw is None:
                coeff = None
            elif isinstance(coeff_raw, bool):
                raise ParseError("edge coeff must be a string or number")
            elif isinstance(coeff_raw, (int, float)):
                coeff = PolyExpr.const(coeff_raw)
            elif isinstance(coeff_raw, str):
                coeff = PolyExpr.parse(coeff_raw)
            else:
                raise ParseError("edge coeff must be a string or number")
            edges.append(EdgeSpec(str(raw["src"]), str(raw["dst"]), coeff))
        return cls(tuple(nodes), tuple(edges), form)

    @classmethod
    def from_json(cls, text: str) -> "CausalDiagram":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        return cls.from_json_dict(data)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def validate(diagram: CausalDiagram) -> list[Diagnostic]:
    """Check every diagram invariant; empty list means valid."""
    out: list[Diagnostic] = []
    seen: set[str] = set()
    for n in diagram.nodes:
        if n.name in seen:
            out.append(Diagnostic("duplicate_node", "error", "duplicate node name", n.name))
        seen.add(n.name)
        if n.role == Role.LATENT_CONFOUNDER and n.observed:
            out.append(
                Diagnostic(
                    "latent_observed", "error",
                    "latent_confounder must be unobserved", n.name,
                )
            )
        if n.role == Role.OUTCOME_DELTA and diagram.form == Form.NATURAL:
            if n.post is None or n.baseline is None:
                out.append(
                    Diagnostic(
                        "delta_unbound", "error",
                        "outcome_delta must declare post and baseline", n.name,
                    )
                )
            else:
                for ref in (n.post, n.baseline):
                    other = diagram.node_map.get(ref)
                    if other is None or other.role != Role.OUTCOME_LEVEL:
                        out.append(
                            Diagnostic(
                                "delta_bad_binding", "error",
                                f"delta references {ref!r} which is not an outcome_level node",
                                n.name,
                            )
                        )
                post = diagram.node_map.get(n.post)
                base = diagram.node_map.get(n.baseline)
                if (
                    post is not None and base is not None
                    and post.time is not None and base.time is not None
                    and post.time <= base.time
                ):
                    out.append(
                        Diagnostic(
                            "delta_time_order", "error",
                            "post period must be later than baseline period", n.name,
                        )
                    )
        if diagram.form == Form.COMPACT and n.role == Role.OUTCOME_LEVEL:
            out.append(
                Diagnostic(
                    "level_in_compact", "error",
                    "compact form must not contain outcome_level nodes", n.name,
                )
            )

    seen_edges: set[tuple[str, str]] = set()
    for e in diagram.edges:
        key = (e.src, e.dst)
        elem = f"{e.src}->{e.dst}"
        if e.src == e.dst:
            out.append(Diagnostic("self_loop", "error", "self-loop edge", elem))
        if key in seen_edges:
            out.append(Diagnostic("duplicate_edge", "error", "duplicate edge", elem))
        seen_edges.add(key)
        for endpoint in key:
            if endpoint not in diagram.node_map:
                out.append(
                    Diagnostic("unknown_endpoint", "error", "edge endpoint not a node", endpoint)
                )

    if diagram.form == Form.NATURAL:
        for n in diagram.nodes:
            if n.role != Role.OUTCOME_DELTA or n.post is None or n.baseline is None:
                continue
            expected = {
                (n.post, PolyExpr.const(1)),
                (n.baseline, PolyExpr.const(-1)),
            }
            got = {
                (e.src, e.coeff)
                for e in diagram.parent_map.get(n.name, ())
                if e.coeff is not None
            }
            incoming = diagram.parent_map.get(n.name, ())
            if len(incoming) != 2 or got != expected:
                out.append(
                    Diagnostic(
                        "delta_edges", "error",
                        "delta node must have exactly the +1 post and -1 baseline edges",
                        n.name,
                    )
                )
        for e in diagram.edges:
            src = diagram.node_map.get(e.src)
            dst = diagram.node_map.get(e.dst)
            if (
                src is not None and dst is not None
                and src.role == Role.OUTCOME_LEVEL and dst.role == Role.TREATMENT
            ):
                out.append(
                    Diagnostic(
                        "outcome_into_treatment", "warning",
                        "edge from an outcome level into a treatment defeats "
                        "difference-in-differences identification",
                        f"{e.src}->{e.dst}",
                    )
                )

    if not any(d.code == "unknown_endpoint" or d.code == "self_loop" for d in out):
        if not diagram.is_acyclic():
            out.append(Diagnostic("cycle", "error", "diagram contains a directed cycle", ""))
    return out


# ---------------------------------------------------------------------------
# d-separation
# ---------------------------------------------------------------------------


def d_separated(
    diagram: CausalDiagram,
    x: Iterable[str],
    y: Iterable[str],
    z: Iterable[str],
) -> bool:
    """True iff z blocks every path between x and y (standard d-separation)."""
    xs = frozenset(x)
    ys = frozenset(y)
    zs = frozenset(z)
    for name in xs | ys | zs:
        diagram.node(name)
    if xs & ys:
        raise FormError("x and y must be disjoint")
    diagram.topological_order  # raises on cycles

    anc_z: set[str] = set()
    for name in zs:
        anc_z |= diagram.ancestors(name)

    # Reachability over (node, direction) states; direction is how we
    # arrived: "up" = via an edge out of the node, "down" = into the node.
    start = [(s, "up") for s in xs]
    visited: set[tuple[str, str]] = set()
    stack = list(start)
    while stack:
        node, direction = stack.pop()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node in ys and node not in zs:
            return False
        if direction == "up" and node not in zs:
            for e in diagram.parent_map.get(node, ()):
                stack.append((e.src, "up"))
            for e in diagram.child_map.get(node, ()):
                stack.append((e.dst, "down"))
        elif direction == "down":
            if node not in zs:
                for e in diagram.child_map.get(node, ()):
                    stack.append((e.dst, "down"))
            if node in anc_z:
                for e in diagram.parent_map.get(node, ()):
                    stack.append((e.src, "up"))
    return True


def open_paths_between(
    diagram: CausalDiagram,
    src: str,
    dst: str,
    z: frozenset[str],
) -> list[tuple[tuple[str, ...], PolyExpr]]:
    """All simple paths src..dst open given z, with coefficient products.

    Unlabeled edges contribute fresh symbols so they can never cancel.
    """
    anc_z: set[str] = set()
    for name in z:
        anc_z |= diagram.ancestors(name)

    def edge_poly(e: EdgeSpec) -> PolyExpr:
        if e.coeff is not None:
            return e.coeff
        return PolyExpr.symbol(f"u_{e.src}_{e.dst}")

    results: list[tuple[tuple[str, ...], PolyExpr]] = []

    def extend(path: list[str], arrived_into: bool | None, product: PolyExpr) -> None:
        # arrived_into: whether the previous edge points into path[-1];
        # None at the start node.
        node = path[-1]
        if node == dst:
            results.append((tuple(path), product))
            return
        for e in diagram.child_map.get(node, ()):  # next edge leaves node
            if e.dst in path:
                continue
            if arrived_into is not None and node in z:
                continue  # non-collider blocked by conditioning
            extend(path + [e.dst], True, product * edge_poly(e))
        for e in diagram.parent_map.get(node, ()):  # next edge enters node
            if e.src in path:
                continue
            if arrived_into is not None:
                if arrived_into:
                    # both adjacent edges point into node: collider, open
                    # only if node or a descendant is conditioned on
                    if node not in anc_z:
                        continue
                elif node in z:
                    continue
            extend(path + [e.src], False, product * edge_poly(e))

    if src == dst:
        return []
    extend([src], None, PolyExpr.one())
    return results


def backdoor_check(
    diagram: CausalDiagram,
    treatment: str,
    outcome: str,
    z: Iterable[str],
) -> AdjustmentVerdict:
    """Backdoor criterion on a compact diagram, with symbolic offsetting.

    The conditioning set is sufficient when it contains only observed
    non-descendants of the treatment and the symbolic sum over all open
    backdoor paths is the zero polynomial.
    """
    if diagram.form != Form.COMPACT:
        raise FormError(
            "backdoor_check requires a compact diagram; call compact() on "
            "the natural diagram first"
        )
    diagram.node(treatment)
    diagram.node(outcome)
    zs = frozenset(z)
    for name in zs:
        diagram.node(name)
    desc = diagram.descendants(treatment)
    bad_desc = sorted(n for n in zs if n in desc and n != treatment)
    if bad_desc:
        return AdjustmentVerdict(
            AdjustStatus.INVALID_DESCENDANT,
            detail=f"descendants of {treatment}: {bad_desc}",
        )
    unobserved = sorted(n for n in zs if not diagram.node(n).observed)
    if unobserved:
        return AdjustmentVerdict(
            AdjustStatus.INVALID_UNOBSERVED,
            detail=f"unobserved members: {unobserved}",
        )

    # Remove the treatment's outgoing edges: remaining open paths from
    # treatment to outcome are exactly the open backdoor paths.
    pruned = diagram.with_edges(e for e in diagram.edges if e.src != treatment)
    paths = open_paths_between(pruned, treatment, outcome, zs)
    total = PolyExpr.zero()
    for _, product in paths:
        total = total + product
    if total.is_zero():
        detail = "offsetting paths cancel exactly" if paths else ""
        return AdjustmentVerdict(AdjustStatus.SUFFICIENT, path_sum=total, detail=detail)
    return AdjustmentVerdict(
        AdjustStatus.INSUFFICIENT,
        open_paths=tuple(sorted(p for p, _ in paths)),
        path_sum=total,
    )


def default_candidates(
    diagram: CausalDiagram, treatment: str, outcome: str
) -> tuple[str, ...]:
    desc = diagram.descendants(treatment)
    names = [
        n.name
        for n in diagram.nodes
        if n.observed
        and n.name not in desc
        and n.role != Role.OUTCOME_DELTA
        and n.name != outcome
    ]
    return tuple(sorted(names))


def minimal_sufficient_sets(
    diagram: CausalDiagram,
    treatment: str,
    outcome: str,
    candidates: Sequence[str] | None = None,
    cap: int = 20,
) -> list[frozenset[str]]:
    """All minimal sufficient adjustment sets among candidate subsets.

    Exhaustive search by size with superset pruning; deterministic order
    (size, then lexicographic member tuple).
    """
    if diagram.form != Form.COMPACT:
        raise FormError("minimal_sufficient_sets requires a compact diagram")
    diagram.node(treatment)
    diagram.node(outcome)
    if candidates is None:
        pool = default_candidates(diagram, treatment, outcome)
    else:
        pool = tuple(sorted(set(candidates)))
        for name in pool:
            diagram.node(name)
    if len(pool) > cap:
        raise CapacityError(
            f"{len(pool)} candidates exceeds exhaustive-search cap {cap}"
        )
    found: list[frozenset[str]] = []
    for size in range(len(pool) + 1):
        for combo in itertools.combinations(pool, size):
            subset = frozenset(combo)
            if any(prev <= subset for prev in found):
                continue
            verdict = backdoor_check(diagram, treatment, outcome, subset)
            if verdict.status == AdjustStatus.SUFFICIENT:
                found.append(subset)
    return sorted(found, key=lambda s: (len(s), tuple(sorted(s))))
