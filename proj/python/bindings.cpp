#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "aoi/cli.hpp"
#include "aoi/io.hpp"
#include "aoi/sim.hpp"
#include "aoi/structure.hpp"

namespace py = pybind11;
using namespace aoi;
using namespace pybind11::literals;

namespace {

QueueAge queue_age_from(const py::object& v2) {
    if (py::isinstance<py::int_>(v2)) return QueueAge::finite(v2.cast<int>());
    const double x = v2.cast<double>();
    if (std::isinf(x)) return QueueAge::inf();
    throw std::invalid_argument("v2 must be an int >= 1 or math.inf");
}

py::object queue_age_to(QueueAge v2) {
    if (v2.is_inf()) return py::float_(std::numeric_limits<double>::infinity());
    return py::int_(v2.value());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Average-age-optimal scheduling: exact solver, structure checks, simulator";

    py::class_<Params>(m, "Params")
        .def(py::init<double, double, double>(), "p"_a, "q1"_a, "q2"_a)
        .def_readonly("p", &Params::p)
        .def_readonly("q1", &Params::q1)
        .def_readonly("q2", &Params::q2)
        .def("__repr__", [](const Params& x) {
            return "Params(p=" + g12(x.p) + ", q1=" + g12(x.q1) + ", q2=" + g12(x.q2) + ")";
        });

    py::enum_<Action>(m, "Action")
        .value("RETRANSMIT", Action::Retransmit)
        .value("TRANSMIT_NEW", Action::TransmitNew)
        .value("IDLE", Action::Idle);

    py::class_<State>(m, "State")
        .def(py::init([](int v1, const py::object& v2, int b) {
                 State s{v1, queue_age_from(v2), b};
                 validate_state(s);
                 return s;
             }),
             "v1"_a, "v2"_a, "b"_a)
        .def_readonly("v1", &State::v1)
        .def_property_readonly("v2", [](const State& s) { return queue_age_to(s.v2); })
        .def_readonly("b", &State::b)
        .def("__eq__", [](const State& a, const State& b) { return a == b; })
        .def("__hash__", [](const State& s) {
            return py::hash(py::make_tuple(s.v1, queue_age_to(s.v2), s.b));
        })
        .def("__repr__", [](const State& s) { return to_string(s); });

    py::class_<TruncatedSpace>(m, "TruncatedSpace")
        .def(py::init<int>(), "cap"_a)
        .def_property_readonly("cap", &TruncatedSpace::cap)
        .def("__len__", &TruncatedSpace::size)
        .def("states", &TruncatedSpace::states)
        .def("state", &TruncatedSpace::state, "index"_a)
        .def("index", &TruncatedSpace::index, "state"_a)
        .def("contains", &TruncatedSpace::contains, "state"_a);

    m.def("enumerate_states", &enumerate_states, "cap"_a);
    m.def("feasible_actions", &feasible_actions, "state"_a);
    m.def("cost", &cost, "state"_a, "action"_a, "params"_a);
    m.def(
        "transitions",
        [](const State& s, Action a, const Params& params) {
            std::vector<std::pair<State, double>> out;
            for (const auto& t : transitions(s, a, params)) out.emplace_back(t.to, t.prob);
            return out;
        },
        "state"_a, "action"_a, "params"_a);
    m.def(
        "transitions_truncated",
        [](const State& s, Action a, const Params& params, const TruncatedSpace& space) {
            std::vector<std::pair<State, double>> out;
            for (const auto& t : transitions_truncated(s, a, params, space))
                out.emplace_back(t.to, t.prob);
            return out;
        },
        "state"_a, "action"_a, "params"_a, "space"_a);

    py::class_<ValueTable>(m, "ValueTable")
        .def_property_readonly("mode",
                               [](const ValueTable& t) {
                                   return t.mode == ValueMode::Discounted ? "discounted"
                                                                          : "relative";
                               })
        .def_readonly("alpha", &ValueTable::alpha)
        .def_readonly("values", &ValueTable::v)
        .def("at", &ValueTable::at, "state"_a);

    py::class_<Policy>(m, "Policy")
        .def_readonly("actions", &Policy::actions)
        .def("at", &Policy::at, "state"_a);

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("gain", &SolveResult::gain)
        .def_readonly("values", &SolveResult::values)
        .def_readonly("policy", &SolveResult::policy)
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("residual", &SolveResult::residual);

    py::class_<EvalResult>(m, "EvalResult")
        .def_readonly("gain", &EvalResult::gain)
        .def_readonly("stationary", &EvalResult::stationary);

    py::class_<BruteForceResult>(m, "BruteForceResult")
        .def_readonly("gain", &BruteForceResult::gain)
        .def_readonly("policy", &BruteForceResult::policy)
        .def_readonly("policies_evaluated", &BruteForceResult::policies_evaluated);

    m.def("discounted_vi", &discounted_vi, "space"_a, "params"_a, "alpha"_a, "tol"_a = 1e-9,
          "max_iter"_a = 1000000, py::keep_alive<0, 1>());
    m.def("rvia", &rvia, "space"_a, "params"_a, "tol"_a = 1e-9, "max_iter"_a = 1000000,
          py::keep_alive<0, 1>());
    m.def("greedy_policy", &greedy_policy, "space"_a, "params"_a, "values"_a,
          py::keep_alive<0, 1>());
    m.def("evaluate_policy_exact", &evaluate_policy_exact, "space"_a, "params"_a, "policy"_a);
    m.def("brute_force_optimal", &brute_force_optimal, "space"_a, "params"_a,
          py::keep_alive<0, 1>());
    m.def("retransmit_threshold", &retransmit_threshold, "params"_a, "v2"_a);

    py::class_<ThresholdRow>(m, "ThresholdRow")
        .def_readonly("v2", &ThresholdRow::v2)
        .def_readonly("threshold", &ThresholdRow::threshold)
        .def_readonly("retransmit_v1", &ThresholdRow::retransmit_v1)
        .def_readonly("upward_closed_above_threshold",
                      &ThresholdRow::upward_closed_above_threshold);
    py::class_<ThresholdSummary>(m, "ThresholdSummary")
        .def_readonly("applicable", &ThresholdSummary::applicable)
        .def_readonly("rows", &ThresholdSummary::rows);
    m.def("threshold_summary", &threshold_summary, "policy"_a, "params"_a);

    py::class_<Violation>(m, "Violation")
        .def_readonly("check", &Violation::check)
        .def_readonly("v1", &Violation::v1)
        .def_property_readonly("v2", [](const Violation& v) { return queue_age_to(v.v2); })
        .def_readonly("b", &Violation::b)
        .def_readonly("x", &Violation::x)
        .def_readonly("y", &Violation::y)
        .def_readonly("lhs", &Violation::lhs)
        .def_readonly("rhs", &Violation::rhs);
    py::class_<StructureReport>(m, "StructureReport")
        .def_readonly("check", &StructureReport::check)
        .def_readonly("applicable", &StructureReport::applicable)
        .def_property_readonly("passed", [](const StructureReport& r) { return r.pass; })
        .def_readonly("tuples_checked", &StructureReport::tuples_checked)
        .def_readonly("worst_violation", &StructureReport::worst_violation)
        .def_readonly("tolerance", &StructureReport::tolerance)
        .def_readonly("violations", &StructureReport::violations)
        .def_readonly("worst_by_row", &StructureReport::worst_by_row);

    m.def("check_monotonicity", &check_monotonicity, "values"_a, "tol"_a = kStructureTol);
    m.def("check_concavity", &check_concavity, "values"_a, "tol"_a = kStructureTol);
    m.def("check_difference_bounds", &check_difference_bounds, "values"_a, "params"_a,
          "tol"_a = kStructureTol);
    m.def("check_preempt_switching", &check_preempt_switching, "policy"_a,
          "tol"_a = kStructureTol);
    m.def("check_retransmit_threshold", &check_retransmit_threshold, "policy"_a, "params"_a,
          "tol"_a = kStructureTol);
    m.def("summary_text", &summary_text, "reports"_a);
    m.def("violations_csv", &violations_csv, "reports"_a);

    py::enum_<BaselineKind>(m, "BaselineKind")
        .value("ALWAYS_PREEMPT", BaselineKind::AlwaysPreempt)
        .value("NEVER_PREEMPT", BaselineKind::NeverPreempt)
        .value("THRESHOLD", BaselineKind::Threshold);

    py::class_<PolicyRule>(m, "Rule")
        .def("__call__", [](const PolicyRule& r, const State& s) { return r(s); });
    m.def("make_baseline", &make_baseline, "kind"_a, "theta"_a = 0.0);
    m.def("rule_from_policy", &rule_from_policy, "policy"_a, "params"_a);

    py::class_<TrajectoryStats>(m, "TrajectoryStats")
        .def_readonly("horizon", &TrajectoryStats::horizon)
        .def_readonly("seed", &TrajectoryStats::seed)
        .def_readonly("time_average_age", &TrajectoryStats::time_average_age)
        .def_readonly("std_error", &TrajectoryStats::std_error)
        .def_readonly("half_width_99", &TrajectoryStats::half_width_99)
        .def_readonly("mean_return_time", &TrajectoryStats::mean_return_time);

    m.def("step", &step, "state"_a, "action"_a, "params"_a, "u_channel"_a, "u_arrival"_a);
    m.def(
        "simulate",
        [](const PolicyRule& rule, const Params& params, long long horizon, std::uint64_t seed,
           const State& init) { return simulate(rule, params, horizon, seed, init); },
        "rule"_a, "params"_a, "horizon"_a, "seed"_a = 1, "init"_a = State{});
    m.def(
        "simulate_callable",
        [](const std::function<Action(const State&)>& rule, const Params& params,
           long long horizon, std::uint64_t seed, const State& init) {
            return simulate(rule, params, horizon, seed, init);
        },
        "rule"_a, "params"_a, "horizon"_a, "seed"_a = 1, "init"_a = State{});
    m.def("simulate_drop_baseline", &simulate_drop_baseline, "params"_a, "horizon"_a,
          "seed"_a = 1);

    py::class_<SlotRng>(m, "SlotRng")
        .def(py::init<std::uint64_t>(), "seed"_a)
        .def("word", &SlotRng::word)
        .def("uniform", &SlotRng::uniform);
}
