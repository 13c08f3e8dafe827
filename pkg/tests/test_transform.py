"""Natural-to-compact transform: delta construction and marginalization."""

import pytest

from didgraph.errors import TransformError, UnknownNodeError
from didgraph.graph import CausalDiagram, EdgeSpec, Form, NodeSpec, Role, validate
from didgraph.poly import PolyExpr
from didgraph.scenarios import get_scenario
from didgraph.transform import build_delta_nodes, compact

# Expected compact edge lists, frozen as (src, dst, label) triples.
COMPACT_EDGES = {
    "fig1": [
        ("A1", "dY1", "a"),
        ("S0", "dY1", "e-d"),
        ("V0", "A1", "b"),
    ],
    "fig4": [
        ("A1", "dY1", "a"),
        ("S0", "dY1", "e-d"),
        ("V0", "A1", "b"),
        ("W0", "A1", "g"),
        ("W0", "dY1", "h-f"),
    ],
    "s5_1": [
        ("A1", "dY1", "a"),
        ("Q0", "Z1", "j"),
        ("S0", "dY1", "e-d"),
        ("V0", "A1", "b"),
        ("W0", "A1", "g"),
        ("Z0", "W0", "i"),
        ("Z0", "Z1", "1"),
        ("Z0", "dY1", "-h"),
        ("Z1", "dY1", "h"),
    ],
    "s5_2": [
        ("A1", "dY1", "a"),
        ("S0", "dY1", "e-d"),
        ("V0", "A1", "b"),
        ("W0", "A1", "g"),
        ("Z0", "W0", "i"),
        ("Z0", "Z1", "j"),
        ("Z0", "dY1", "-h"),
        ("Z1", "dY1", "k"),
    ],
    "s5_3_1": [
        ("A1", "dY1", "a"),
        ("S0", "dY1", "e-d"),
        ("V0", "A1", "b"),
        ("W0", "A1", "g"),
        ("W0", "W1", "i"),
        ("W0", "dY1", "-f"),
        ("W1", "dY1", "h"),
    ],
    "s5_3_2": [
        ("A1", "dY1", "a"),
        ("S0", "dY1", "e-d"),
        ("V0", "A1", "b"),
        ("W0", "A1", "g"),
        ("W0", "W1", "k"),
        ("W0", "dY1", "-f"),
        ("W1", "dY1", "h"),
        ("Z0", "A1", "i"),
        ("Z0", "W1", "j"),
    ],
    "s5_3_3": [
        ("A1", "dY1", "a"),
        ("S0", "dY1", "e-d"),
        ("V0", "A1", "b"),
        ("V0", "W1", "i"),
        ("W0", "A1", "g"),
        ("W0", "W1", "j"),
        ("W0", "dY1", "-f"),
        ("W1", "dY1", "h"),
    ],
    "s5_3_4": [
        ("A1", "W1", "i"),
        ("A1", "dY1", "a"),
        ("S0", "dY1", "e-d"),
        ("V0", "A1", "b"),
        ("W0", "A1", "g"),
        ("W0", "W1", "j"),
        ("W0", "dY1", "-f"),
        ("W1", "dY1", "h"),
    ],
    "s5_4": [
        ("A1", "dY1", "a"),
        ("A1", "dY2", "a"),
        ("S0", "dY1", "e-d"),
        ("S0", "dY2", "l-d"),
        ("V0", "A1", "b"),
        ("W0", "A1", "g"),
        ("W0", "W1", "i"),
        ("W0", "dY1", "-f"),
        ("W0", "dY2", "-f"),
        ("W1", "W2", "j"),
        ("W1", "dY1", "h"),
        ("W2", "dY2", "k"),
    ],
    "s5_4_feedback": [
        ("A1", "A2", "p"),
        ("A1", "W1", "h"),
        ("A1", "dY1", "a"),
        ("A2", "W2", "m"),
        ("A2", "dY2", "a"),
        ("S0", "dY1", "e-d"),
        ("S0", "dY2", "q-d"),
        ("V0", "A1", "b"),
        ("V0", "A2", "b"),
        ("W0", "A1", "g"),
        ("W0", "W1", "j"),
        ("W0", "dY1", "-f"),
        ("W0", "dY2", "-f"),
        ("W1", "A2", "l"),
        ("W1", "W2", "k"),
        ("W1", "dY1", "i"),
        ("W2", "dY2", "n"),
    ],
}


def test_compact_golden_edge_lists():
    for name, expected in COMPACT_EDGES.items():
        got = sorted((e.src, e.dst, e.label()) for e in get_scenario(name).compact.edges)
        assert got == sorted(expected), name


def test_equi_confounding_edge_dropped():
    """A confounder with equal effects on both outcome levels loses its
    edge into the change node (V0 in every scenario, W0 in fig1/fig4-style)."""
    fig1 = get_scenario("fig1").compact
    assert fig1.edge("V0", "dY1") is None
    fig4 = get_scenario("fig4").compact
    assert fig4.edge("V0", "dY1") is None
    # fig4's W0 has unequal effects f, h so its delta edge survives as h-f
    assert fig4.edge("W0", "dY1").label() == "h-f"


def test_compact_form_and_levels_removed():
    c = get_scenario("fig4").compact
    assert c.form == Form.COMPACT
    assert all(n.role != Role.OUTCOME_LEVEL for n in c.nodes)
    assert validate(c) == []


def test_compact_single_delta_selection():
    natural = get_scenario("s5_4").natural
    only_first = compact(natural, delta="dY1")
    names = {n.name for n in only_first.nodes}
    assert "dY1" in names and "dY2" not in names
    with pytest.raises(UnknownNodeError):
        compact(natural, delta="nope")


def test_compact_requires_natural():
    with pytest.raises(TransformError):
        compact(get_scenario("fig1").compact)


def _levels_only():
    nodes = (
        NodeSpec("A1", time=1, observed=True, role=Role.TREATMENT),
        NodeSpec("Y0", time=0, observed=True, role=Role.OUTCOME_LEVEL),
        NodeSpec("Y1", time=1, observed=True, role=Role.OUTCOME_LEVEL),
        NodeSpec("S0", time=0, observed=True, role=Role.COVARIATE),
    )
    edges = (
        EdgeSpec("A1", "Y1", PolyExpr.symbol("a")),
        EdgeSpec("S0", "Y0", PolyExpr.symbol("d")),
        EdgeSpec("S0", "Y1", PolyExpr.symbol("e")),
    )
    return CausalDiagram(form=Form.NATURAL, nodes=nodes, edges=edges)


def test_build_delta_nodes():
    with_deltas = build_delta_nodes(_levels_only())
    delta = with_deltas.node("dY1")
    assert delta.role == Role.OUTCOME_DELTA
    assert delta.post == "Y1" and delta.baseline == "Y0"
    assert with_deltas.edge("Y1", "dY1").coeff == PolyExpr.const(1)
    assert with_deltas.edge("Y0", "dY1").coeff == PolyExpr.const(-1)
    assert validate(with_deltas) == []
    # idempotent
    again = build_delta_nodes(with_deltas)
    assert again.nodes == with_deltas.nodes and again.edges == with_deltas.edges
    # and compacting it produces the expected two edges
    c = compact(with_deltas)
    got = sorted((e.src, e.dst, e.label()) for e in c.edges)
    assert got == [("A1", "dY1", "a"), ("S0", "dY1", "e-d")]


def test_marginalization_blocked_by_level_child():
    base = _levels_only()
    extra = CausalDiagram(
        form=Form.NATURAL,
        nodes=base.nodes + (NodeSpec("M", time=1, observed=True, role=Role.COVARIATE),),
        edges=base.edges + (EdgeSpec("Y0", "M", PolyExpr.symbol("m")),),
    )
    with pytest.raises(TransformError):
        compact(build_delta_nodes(extra))


def test_compact_consistency_with_paths():
    """compact() commutes with the covariance algebra: the trek covariance of
    (dY, A) on the compact graph equals post-minus-baseline on the natural."""
    from didgraph.scm import trek_covariance

    for name in ("fig1", "fig4", "s5_2", "s5_3_3"):
        sc = get_scenario(name)
        natural_diff = trek_covariance(sc.natural, "Y1", "A1") - trek_covariance(
            sc.natural, "Y0", "A1"
        )
        compact_cov = trek_covariance(sc.compact, "dY1", "A1")
        assert natural_diff == compact_cov, name
