"""Average-age-optimal scheduling toolkit: solver, structure checks, simulator."""

from aoi._core import (
    Action,
    BaselineKind,
    BruteForceResult,
    EvalResult,
    Params,
    Policy,
    Rule,
    SlotRng,
    SolveResult,
    State,
    StructureReport,
    ThresholdRow,
    ThresholdSummary,
    TrajectoryStats,
    TruncatedSpace,
    ValueTable,
    Violation,
    brute_force_optimal,
    check_concavity,
    check_difference_bounds,
    check_monotonicity,
    check_preempt_switching,
    check_retransmit_threshold,
    cost,
    discounted_vi,
    enumerate_states,
    evaluate_policy_exact,
    feasible_actions,
    greedy_policy,
    make_baseline,
    retransmit_threshold,
    rule_from_policy,
    rvia,
    simulate,
    simulate_callable,
    simulate_drop_baseline,
    step,
    summary_text,
    threshold_summary,
    transitions,
    transitions_truncated,
    violations_csv,
)

__all__ = [
    "Action",
    "BaselineKind",
    "BruteForceResult",
    "EvalResult",
    "Params",
    "Policy",
    "Rule",
    "SlotRng",
    "SolveResult",
    "State",
    "StructureReport",
    "ThresholdRow",
    "ThresholdSummary",
    "TrajectoryStats",
    "TruncatedSpace",
    "ValueTable",
    "Violation",
    "brute_force_optimal",
    "check_concavity",
    "check_difference_bounds",
    "check_monotonicity",
    "check_preempt_switching",
    "check_retransmit_threshold",
    "cost",
    "discounted_vi",
    "enumerate_states",
    "evaluate_policy_exact",
    "feasible_actions",
    "greedy_policy",
    "make_baseline",
    "retransmit_threshold",
    "rule_from_policy",
    "rvia",
    "simulate",
    "simulate_callable",
    "simulate_drop_baseline",
    "step",
    "summary_text",
    "threshold_summary",
    "transitions",
    "transitions_truncated",
    "violations_csv",
]
