"""Diagram model: JSON schema, validation, d-separation, backdoor checks."""

import itertools

import numpy as np
import pytest

from didgraph.errors import CapacityError, FormError, ParseError, UnknownNodeError
from didgraph.graph import (
    AdjustStatus,
    CausalDiagram,
    EdgeSpec,
    Form,
    NodeSpec,
    Role,
    backdoor_check,
    d_separated,
    default_candidates,
    minimal_sufficient_sets,
    open_paths_between,
    validate,
)
from didgraph.poly import PolyExpr
from didgraph.scenarios import all_scenarios, get_scenario


def _n(name, role="covariate", observed=True, **kw):
    return NodeSpec(name=name, role=Role(role), observed=observed, **kw)


def _e(src, dst, coeff=None):
    poly = None if coeff is None else PolyExpr.parse(str(coeff))
    return EdgeSpec(src=src, dst=dst, coeff=poly)


# -- JSON schema --------------------------------------------------------------


def test_json_round_trip_all_scenarios():
    for sc in all_scenarios():
        for diagram in (sc.natural, sc.compact):
            clone = CausalDiagram.from_json_dict(diagram.to_json_dict())
            assert clone.form == diagram.form
            assert clone.nodes == diagram.nodes
            assert clone.edges == diagram.edges


def test_unknown_fields_rejected():
    base = get_scenario("fig1").compact.to_json_dict()
    for mutate in (
        lambda d: d.update(extra=1),
        lambda d: d["nodes"][0].update(color="red"),
        lambda d: d["edges"][0].update(weight=2),
    ):
        data = get_scenario("fig1").compact.to_json_dict()
        mutate(data)
        with pytest.raises(ParseError):
            CausalDiagram.from_json_dict(data)
    CausalDiagram.from_json_dict(base)  # unmutated copy still loads


def test_coeff_forms():
    data = {
        "form": "compact",
        "nodes": [
            {"name": "X", "observed": True, "role": "covariate"},
            {"name": "Y", "observed": True, "role": "outcome_delta"},
        ],
        "edges": [{"src": "X", "dst": "Y", "coeff": "e-d"}],
    }
    d = CausalDiagram.from_json_dict(data)
    assert d.edge("X", "Y").coeff == PolyExpr.parse("e - d")
    data["edges"][0]["coeff"] = -1
    assert CausalDiagram.from_json_dict(data).edge("X", "Y").coeff == PolyExpr.const(-1)
    data["edges"][0]["coeff"] = 0.5
    assert CausalDiagram.from_json_dict(data).edge("X", "Y").coeff == PolyExpr.parse("0.5")
    data["edges"][0]["coeff"] = True
    with pytest.raises(ParseError):
        CausalDiagram.from_json_dict(data)


def test_unknown_node_lookup():
    d = get_scenario("fig1").compact
    with pytest.raises(UnknownNodeError):
        d.node("nope")


# -- validate -----------------------------------------------------------------


def _codes(diagram):
    return {d.code for d in validate(diagram)}


def test_validate_clean_scenarios():
    for sc in all_scenarios():
        assert validate(sc.natural) == []
        assert validate(sc.compact) == []


def test_validate_duplicate_node():
    d = CausalDiagram(
        form=Form.COMPACT, nodes=(_n("X"), _n("X")), edges=()
    )
    assert "duplicate_node" in _codes(d)


def test_validate_cycle_and_self_loop():
    d = CausalDiagram(
        form=Form.COMPACT,
        nodes=(_n("X"), _n("Y")),
        edges=(_e("X", "Y", "a"), _e("Y", "X", "b")),
    )
    assert "cycle" in _codes(d)
    d2 = CausalDiagram(form=Form.COMPACT, nodes=(_n("X"),), edges=(_e("X", "X"),))
    assert "self_loop" in _codes(d2)


def test_validate_unknown_endpoint_and_duplicate_edge():
    d = CausalDiagram(
        form=Form.COMPACT,
        nodes=(_n("X"), _n("Y")),
        edges=(_e("X", "Y"), _e("X", "Y"), _e("X", "Z")),
    )
    codes = _codes(d)
    assert "duplicate_edge" in codes and "unknown_endpoint" in codes


def test_validate_latent_observed():
    d = CausalDiagram(
        form=Form.COMPACT,
        nodes=(_n("U", role="latent_confounder", observed=True),),
        edges=(),
    )
    assert "latent_observed" in _codes(d)


def test_validate_delta_binding_natural_only():
    nodes = (
        _n("Y0", role="outcome_level", time=0),
        _n("Y1", role="outcome_level", time=1),
        _n("dY1", role="outcome_delta", post="Y1", baseline="Y0"),
    )
    good = CausalDiagram(
        form=Form.NATURAL,
        nodes=nodes,
        edges=(_e("Y1", "dY1", 1), _e("Y0", "dY1", -1)),
    )
    assert validate(good) == []
    missing_edge = CausalDiagram(form=Form.NATURAL, nodes=nodes, edges=(_e("Y1", "dY1", 1),))
    assert "delta_edges" in _codes(missing_edge)
    unbound = CausalDiagram(
        form=Form.NATURAL, nodes=(_n("dY1", role="outcome_delta"),), edges=()
    )
    assert "delta_unbound" in _codes(unbound)


def test_validate_level_in_compact():
    d = CausalDiagram(
        form=Form.COMPACT, nodes=(_n("Y0", role="outcome_level", time=0),), edges=()
    )
    assert "level_in_compact" in _codes(d)


def test_validate_outcome_into_treatment_warning():
    nodes = (
        _n("Y0", role="outcome_level", time=0),
        _n("A1", role="treatment", time=1),
    )
    d = CausalDiagram(form=Form.NATURAL, nodes=nodes, edges=(_e("Y0", "A1", "r"),))
    diags = validate(d)
    assert any(d_.code == "outcome_into_treatment" and d_.severity == "warning"
               for d_ in diags)


# -- d-separation vs brute force ----------------------------------------------


def _all_paths(diagram, x, y):
    """All simple undirected paths as [(node, came_in_by_arrow_into_node)]."""
    neighbors: dict[str, list[tuple[str, bool]]] = {}
    for e in diagram.edges:
        neighbors.setdefault(e.src, []).append((e.dst, True))   # arrow into dst
        neighbors.setdefault(e.dst, []).append((e.src, False))  # arrow out of src
    paths = []

    def walk(node, seen, trail):
        if node == y:
            paths.append(list(trail))
            return
        for nxt, into in neighbors.get(node, []):
            if nxt in seen:
                continue
            trail.append((node, nxt, into))
            walk(nxt, seen | {nxt}, trail)
            trail.pop()

    walk(x, {x}, [])
    return paths


def _path_blocked(diagram, steps, zs):
    for i in range(len(steps) - 1):
        _, mid, arrived_into = steps[i]
        # collider at mid iff both edges point into mid
        collider = arrived_into and (steps[i + 1][2] is False)
        if collider:
            desc = diagram.descendants(mid)
            if not (desc & zs):
                return True
        else:
            if mid in zs:
                return True
    return False


def _brute_d_separated(diagram, x, y, zs):
    for steps in _all_paths(diagram, x, y):
        if not _path_blocked(diagram, steps, frozenset(zs)):
            return False
    return True


def test_d_separation_matches_brute_force():
    rng = np.random.default_rng(0)
    for sc in all_scenarios():
        for diagram in (sc.natural, sc.compact):
            names = [n.name for n in diagram.nodes]
            for _ in range(40):
                x, y = rng.choice(names, size=2, replace=False)
                rest = [n for n in names if n not in (x, y)]
                k = int(rng.integers(0, min(3, len(rest)) + 1))
                zs = list(rng.choice(rest, size=k, replace=False)) if k else []
                got = d_separated(diagram, [x], [y], zs)
                want = _brute_d_separated(diagram, x, y, zs)
                assert got == want, (sc.name, diagram.form, x, y, zs)


def test_d_separated_input_checks():
    d = get_scenario("fig1").compact
    with pytest.raises(FormError):
        d_separated(d, ["A1"], ["A1"], [])
    with pytest.raises(UnknownNodeError):
        d_separated(d, ["A1"], ["nope"], [])


# -- open paths and backdoor ---------------------------------------------------


def test_open_paths_products():
    d = get_scenario("fig4").compact
    paths = open_paths_between(d, "A1", "dY1", frozenset())
    by_nodes = {p: str(expr) for p, expr in paths}
    assert by_nodes[("A1", "dY1")] == "a"
    assert by_nodes[("A1", "W0", "dY1")] == "g*h - f*g"
    # conditioning on W0 closes the backdoor path
    paths_w = open_paths_between(d, "A1", "dY1", frozenset({"W0"}))
    assert [p for p, _ in paths_w] == [("A1", "dY1")]


def test_backdoor_requires_compact():
    with pytest.raises(FormError):
        backdoor_check(get_scenario("fig4").natural, "A1", "dY1", [])


def test_backdoor_statuses():
    d = get_scenario("fig4").compact
    assert backdoor_check(d, "A1", "dY1", ["W0"]).status == AdjustStatus.SUFFICIENT
    assert backdoor_check(d, "A1", "dY1", []).status == AdjustStatus.INSUFFICIENT
    assert backdoor_check(d, "A1", "dY1", ["V0"]).status == AdjustStatus.INVALID_UNOBSERVED
    d34 = get_scenario("s5_3_4").compact
    assert (
        backdoor_check(d34, "A1", "dY1", ["W0", "W1"]).status
        == AdjustStatus.INVALID_DESCENDANT
    )


def test_backdoor_offsetting_paths_cancel():
    """Two open backdoor paths with products that sum to the zero polynomial."""
    d = get_scenario("s5_1").compact
    verdict = backdoor_check(d, "A1", "dY1", [])
    assert verdict.status == AdjustStatus.SUFFICIENT
    assert verdict.path_sum is not None and verdict.path_sum.is_zero()
    assert "offset" in verdict.detail
    # but the cancellation is destroyed by conditioning on Z1 alone
    assert backdoor_check(d, "A1", "dY1", ["Z1"]).status == AdjustStatus.INSUFFICIENT


def test_insufficient_reports_open_paths():
    verdict = backdoor_check(get_scenario("fig4").compact, "A1", "dY1", [])
    assert verdict.open_paths == (("A1", "W0", "dY1"),)
    assert str(verdict.path_sum) == "g*h - f*g"


# -- minimal sets ---------------------------------------------------------------


def test_minimal_sets_ordering_and_minimality():
    d = get_scenario("s5_3_2").compact
    sets = minimal_sufficient_sets(d, "A1", "dY1")
    assert sets == [frozenset({"W0", "W1"}), frozenset({"W0", "Z0"})] or sets == [
        frozenset({"W0", "Z0"}),
        frozenset({"W0", "W1"}),
    ]
    # size-then-lex ordering: W0,W1 sorts before W0,Z0
    assert sorted(sets[0]) == ["W0", "W1"]
    # no returned set contains another
    for s, t in itertools.permutations(sets, 2):
        assert not s < t


def test_minimal_sets_candidate_override():
    d = get_scenario("s5_2").compact
    assert minimal_sufficient_sets(d, "A1", "dY1", candidates=["Z0"]) == [
        frozenset({"Z0"})
    ]


def test_default_candidates_excludes_descendants_and_outcome():
    d = get_scenario("s5_3_4").compact
    pool = default_candidates(d, "A1", "dY1")
    assert "W1" not in pool  # descendant of the treatment
    assert "dY1" not in pool
    assert "V0" not in pool  # unobserved


def test_capacity_cap():
    nodes = [_n("A", role="treatment"), _n("Y", role="outcome_delta")]
    edges = [_e("A", "Y", "a")]
    for i in range(21):
        nodes.append(_n(f"C{i:02d}"))
        edges.append(_e(f"C{i:02d}", "A", f"b{i}"))
        edges.append(_e(f"C{i:02d}", "Y", f"c{i}"))
    d = CausalDiagram(form=Form.COMPACT, nodes=tuple(nodes), edges=tuple(edges))
    with pytest.raises(CapacityError):
        minimal_sufficient_sets(d, "A", "Y")
