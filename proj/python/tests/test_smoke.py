"""Smoke tests for the aoi extension module."""

import math

import pytest

import aoi


def test_state_space_enumeration():
    space = aoi.TruncatedSpace(5)
    assert len(space) == 5 * (5 + 3)
    states = space.states()
    assert states[0] == aoi.State(1, 1, 0)
    assert states[-1] == aoi.State(5, math.inf, 1)
    for i, s in enumerate(states):
        assert space.index(s) == i
        assert space.state(i) == s


def test_kernel_rows_are_distributions():
    params = aoi.Params(0.5, 0.3, 0.9)
    space = aoi.TruncatedSpace(6)
    for s in space.states():
        for a in aoi.feasible_actions(s):
            rows = aoi.transitions_truncated(s, a, params, space)
            assert abs(sum(p for _, p in rows) - 1.0) < 1e-12
            assert all(p > 0.0 for _, p in rows)
            assert all(space.contains(t) for t, _ in rows)


def test_rvia_matches_brute_force_on_small_instance():
    params = aoi.Params(0.5, 0.3, 0.9)
    space = aoi.TruncatedSpace(4)
    solved = aoi.rvia(space, params, tol=1e-10)
    oracle = aoi.brute_force_optimal(space, params)
    assert solved.gain == pytest.approx(oracle.gain, abs=1e-6)
    exact = aoi.evaluate_policy_exact(space, params, solved.policy)
    assert exact.gain == pytest.approx(oracle.gain, abs=1e-6)


def test_structure_checks_report_honestly():
    params = aoi.Params(0.5, 0.3, 0.9)
    space = aoi.TruncatedSpace(12)
    solved = aoi.rvia(space, params, tol=1e-10)

    # The decision-shape properties hold everywhere.
    for report in (
        aoi.check_preempt_switching(solved.policy),
        aoi.check_retransmit_threshold(solved.policy, params),
    ):
        assert report.applicable
        assert report.passed, report.check
        assert report.tuples_checked > 0

    # The value-shape properties fail only where the truncation freezes the
    # ages (the cap row); every reported violation must touch that row.
    values = aoi.discounted_vi(space, params, alpha=0.95, tol=1e-10)
    mono = aoi.check_monotonicity(values)
    assert mono.applicable
    assert not mono.passed
    assert all(v.v1 + v.x == space.cap for v in mono.violations)
    clean_rows = {row: w for row, w in mono.worst_by_row.items() if row < space.cap}
    assert clean_rows
    assert all(w <= 1e-9 for w in clean_rows.values())


def test_simulation_is_deterministic_and_python_rules_work():
    params = aoi.Params(0.5, 0.3, 0.9)
    space = aoi.TruncatedSpace(30)
    solved = aoi.rvia(space, params)
    rule = aoi.rule_from_policy(solved.policy, params)
    a = aoi.simulate(rule, params, horizon=20000, seed=7)
    b = aoi.simulate(rule, params, horizon=20000, seed=7)
    assert a.time_average_age == b.time_average_age
    assert a.half_width_99 > 0.0

    def always_preempt(s):
        acts = aoi.feasible_actions(s)
        return aoi.Action.TRANSMIT_NEW if aoi.Action.TRANSMIT_NEW in acts else acts[0]

    c = aoi.simulate_callable(always_preempt, params, horizon=20000, seed=7)
    d = aoi.simulate(aoi.make_baseline(aoi.BaselineKind.ALWAYS_PREEMPT), params, 20000, 7)
    assert c.time_average_age == d.time_average_age


def test_drop_baseline_degenerate_case():
    stats = aoi.simulate_drop_baseline(aoi.Params(1.0, 1.0, 1.0), horizon=10000, seed=3)
    assert stats.time_average_age == 1.0
