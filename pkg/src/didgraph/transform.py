"""Delta-node construction and natural-to-compact projection.

compact() marginalizes the outcome-level nodes out of a natural diagram:
each parent of the post or baseline outcome receives a direct edge into
the delta node with symbolic coefficient coeff(post) - coeff(baseline),
and edges whose difference is the zero polynomial are dropped. Equal
labels on the two outcome levels therefore become a missing edge, which
is how a constancy (equi-confounding) assumption is encoded graphically.
"""

from __future__ import annotations

from .errors import TransformError, UnknownNodeError
from .graph import CausalDiagram, EdgeSpec, Form, NodeSpec, Role
from .poly import PolyExpr


def _fresh_symbols(diagram: CausalDiagram) -> CausalDiagram:
    """Assign a deterministic fresh symbol to every unlabeled edge."""
    edges = []
    for e in diagram.edges:
        if e.coeff is None:
            edges.append(EdgeSpec(e.src, e.dst, PolyExpr.symbol(f"u_{e.src}_{e.dst}")))
        else:
            edges.append(e)
    return diagram.with_edges(edges)


def build_delta_nodes(diagram: CausalDiagram, baseline_time: int = 0) -> CausalDiagram:
    """Add one delta node per post-period outcome level; idempotent.

    The new node for period t is named dY{t} (or reuses an existing
    binding) and carries the deterministic +1/-1 edges from its post and
    baseline outcome levels.
    """
    if diagram.form != Form.NATURAL:
        raise TransformError("build_delta_nodes requires a natural diagram")
    levels = [
        n for n in diagram.nodes if n.role == Role.OUTCOME_LEVEL and n.time is not None
    ]
    baselines = [n for n in levels if n.time == baseline_time]
    if len(baselines) != 1:
        raise TransformError(
            f"expected exactly one outcome_level node at baseline period "
            f"{baseline_time}, found {len(baselines)}"
        )
    baseline = baselines[0]
    posts = sorted(
        (n for n in levels if n.time is not None and n.time > baseline_time),
        key=lambda n: n.time,  # type: ignore[arg-type, return-value]
    )
    if not posts:
        raise TransformError("no post-period outcome_level nodes to difference")

    existing = {
        (n.post, n.baseline): n.name
        for n in diagram.nodes
        if n.role == Role.OUTCOME_DELTA
    }
    names = {n.name for n in diagram.nodes}
    nodes = list(diagram.nodes)
    edges = list(diagram.edges)
    for post in posts:
        if (post.name, baseline.name) in existing:
            continue
        delta_name = f"dY{post.time}"
        if delta_name in names:
            raise TransformError(f"delta name collision: {delta_name!r}")
        names.add(delta_name)
        nodes.append(
            NodeSpec(
                name=delta_name,
                time=post.time,
                observed=True,
                role=Role.OUTCOME_DELTA,
                post=post.name,
                baseline=baseline.name,
            )
        )
        edges.append(EdgeSpec(post.name, delta_name, PolyExpr.const(1)))
        edges.append(EdgeSpec(baseline.name, delta_name, PolyExpr.const(-1)))
    return CausalDiagram(tuple(nodes), tuple(edges), Form.NATURAL)


def _check_marginalizable(diagram: CausalDiagram) -> None:
    for n in diagram.nodes:
        if n.role != Role.OUTCOME_LEVEL:
            continue
        for child in diagram.children(n.name):
            if diagram.node(child).role != Role.OUTCOME_DELTA:
                raise TransformError(
                    f"outcome_level node {n.name!r} has non-delta child "
                    f"{child!r}; marginalization would be invalid"
                )
        for parent in diagram.parents(n.name):
            if diagram.node(parent).role == Role.OUTCOME_LEVEL:
                raise TransformError(
                    f"outcome_level node {n.name!r} has an outcome_level "
                    f"parent {parent!r}; marginalization would be invalid"
                )


def compact(diagram: CausalDiagram, delta: str | None = None) -> CausalDiagram:
    """Project a natural diagram to compact form.

    With delta=None all delta nodes are compacted (the union); with a
    named delta only that node is retained among the deltas.
    """
    if diagram.form != Form.NATURAL:
        raise TransformError("compact requires a natural diagram")
    diagram = _fresh_symbols(diagram)
    _check_marginalizable(diagram)

    deltas = [n for n in diagram.nodes if n.role == Role.OUTCOME_DELTA]
    if delta is not None:
        if delta not in diagram.node_map:
            raise UnknownNodeError(delta)
        chosen = [n for n in deltas if n.name == delta]
        if not chosen:
            raise TransformError(f"{delta!r} is not an outcome_delta node")
        deltas = chosen
    if not deltas:
        raise TransformError("no outcome_delta node to compact around")
    for d in deltas:
        if d.post is None or d.baseline is None:
            raise TransformError(f"delta node {d.name!r} is unbound")

    keep_names = {
        n.name
        for n in diagram.nodes
        if n.role != Role.OUTCOME_LEVEL
        and (n.role != Role.OUTCOME_DELTA or n in deltas)
    }
    nodes = tuple(n for n in diagram.nodes if n.name in keep_names)

    edges: list[EdgeSpec] = []
    for e in diagram.edges:
        src_role = diagram.node(e.src).role
        dst_role = diagram.node(e.dst).role
        if src_role == Role.OUTCOME_LEVEL or dst_role == Role.OUTCOME_LEVEL:
            continue
        if e.src in keep_names and e.dst in keep_names:
            edges.append(e)

    for d in deltas:
        post_in = {e.src: e.coeff for e in diagram.parent_map[d.post]}
        base_in = {e.src: e.coeff for e in diagram.parent_map[d.baseline]}
        parents = sorted(set(post_in) | set(base_in))
        for p in parents:
            coeff = (post_in.get(p) or PolyExpr.zero()) - (
                base_in.get(p) or PolyExpr.zero()
            )
            if coeff.is_zero():
                continue
            edges.append(EdgeSpec(p, d.name, coeff))

    return CausalDiagram(nodes, tuple(edges), Form.COMPACT)
