"""Scenario registry: structure, defaults, and estimand truths."""

import pytest

from didgraph.errors import ConfigError
from didgraph.graph import AdjustStatus, backdoor_check, validate
from didgraph.poly import PolyExpr
from didgraph.scenarios import SCENARIO_NAMES, all_scenarios, get_scenario
from didgraph.scm import identity_check, implied_covariance

EXPECTED_NAMES = (
    "fig1", "fig4", "s5_1", "s5_2", "s5_3_1",
    "s5_3_2", "s5_3_3", "s5_3_4", "s5_4", "s5_4_feedback",
)


def test_registry_names():
    assert SCENARIO_NAMES == EXPECTED_NAMES
    with pytest.raises(ConfigError):
        get_scenario("nope")


def test_scenarios_are_cached():
    assert get_scenario("fig4") is get_scenario("fig4")


def test_diagrams_validate_clean():
    for sc in all_scenarios():
        assert validate(sc.natural) == [], sc.name
        assert validate(sc.compact) == [], sc.name


def test_default_assignments_admissible():
    for sc in all_scenarios():
        implied_covariance(sc.natural, sc.assignment)  # must not raise


def test_layout_maps_reference_real_nodes():
    for sc in all_scenarios():
        names = {n.name for n in sc.natural.nodes}
        for period in sc.periods:
            assert sc.treatments[period] in names
            assert sc.deltas[period] in names
            assert period in sc.truth
        for family, by_period in sc.families.items():
            for node in by_period.values():
                assert node in names, (sc.name, family, node)


def test_truths_hold_under_identity_check():
    """Every scenario's truth polynomial is the partial-regression value
    under its first minimal sufficient adjustment set."""
    from didgraph.graph import minimal_sufficient_sets

    for sc in all_scenarios():
        for period in sc.periods:
            treatment = sc.treatments[period]
            delta = sc.deltas[period]
            sets = minimal_sufficient_sets(sc.compact, treatment, delta)
            assert sets, (sc.name, period)
            z = sorted(sets[0])
            assert identity_check(
                sc.natural, delta, treatment, z, sc.truth[period], trials=5, seed=1
            ), (sc.name, period, z)


def test_truth_polynomials_are_the_expected_shapes():
    assert get_scenario("fig4").truth[1] == PolyExpr.symbol("a")
    assert get_scenario("s5_3_4").truth[1] == PolyExpr.parse("a + i*h")
    fb = get_scenario("s5_4_feedback")
    assert fb.truth[1] == PolyExpr.parse("a + h*i")
    assert fb.truth[2] == PolyExpr.parse("a + m*n")


def test_with_assignment():
    sc = get_scenario("fig4")
    bumped = sc.with_assignment({"a": 0.25})
    assert dict(bumped.assignment)["a"] == 0.25
    assert dict(sc.assignment)["a"] == 0.3  # original untouched
    with pytest.raises(ConfigError):
        sc.with_assignment({"zz": 0.1})


def test_multi_period_scenarios():
    s54 = get_scenario("s5_4")
    assert s54.periods == (1, 2)
    assert s54.treatments == {1: "A1", 2: "A1"}
    fb = get_scenario("s5_4_feedback")
    assert fb.treatments == {1: "A1", 2: "A2"}
    assert fb.deltas == {1: "dY1", 2: "dY2"}


def test_feedback_scenario_mediator_is_descendant():
    fb = get_scenario("s5_4_feedback")
    verdict = backdoor_check(fb.compact, "A1", "dY1", ["W0", "W1"])
    assert verdict.status == AdjustStatus.INVALID_DESCENDANT
