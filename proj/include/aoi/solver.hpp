#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "aoi/model.hpp"

namespace aoi {

struct ConvergenceError : std::runtime_error {
    double residual;
    long long iterations;
    ConvergenceError(const std::string& what, double residual_, long long iterations_)
        : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
};

enum class ValueMode { Discounted, Relative };

/// Dense value function over a TruncatedSpace, indexed in enumeration order.
/// The space is borrowed, not owned; it must outlive the table.
struct ValueTable {
    const TruncatedSpace* space = nullptr;
    ValueMode mode = ValueMode::Discounted;
    double alpha = 0.0;  // meaningful only in Discounted mode
    std::vector<double> v;

    double at(const State& s) const { return v[static_cast<std::size_t>(space->index(s))]; }
};

/// Stationary deterministic policy over a TruncatedSpace, one action per state
/// in enumeration order. The space is borrowed, not owned.
struct Policy {
    const TruncatedSpace* space = nullptr;
    std::vector<Action> actions;

    Action at(const State& s) const { return actions[static_cast<std::size_t>(space->index(s))]; }
};

/// Transition kernel and stage costs of the truncated chain compiled to flat
/// arrays for the solver inner loops. Indices follow enumeration order.
class CompiledKernel {
  public:
    struct Choice {
        Action action;
        double cost;
        int fan = 0;                  // number of distinct successors (<= 4)
        std::array<int, 4> to{};      // successor indices
        std::array<double, 4> pr{};   // successor probabilities
    };
    struct Node {
        int n = 0;  // number of feasible actions (1 or 2)
        std::array<Choice, 2> choice{};
    };

    CompiledKernel(const TruncatedSpace& space, const Params& params);

    const TruncatedSpace& space() const { return *space_; }
    const Params& params() const { return params_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    /// Index of the reference state (1,1,1).
    int ref_index() const { return ref_index_; }

  private:
    const TruncatedSpace* space_;
    Params params_;
    std::vector<Node> nodes_;
    int ref_index_;
};

/// One discounted Bellman sweep: out = min over actions of cost + alpha P in.
/// Returns the sup-norm of (out - in).
double bellman_sweep_discounted(const CompiledKernel& kernel, double alpha,
                                const std::vector<double>& in, std::vector<double>& out);

struct RelativeSweep {
    double span;           // span seminorm of (out - in)
    double gain_estimate;  // one-sweep change at the reference state
};

/// One relative Bellman sweep: out = min over actions of cost + P in, minus
/// in[ref]. The gain estimate is the un-relativized Bellman value at the
/// reference state net of its previous value, which brackets the optimal gain
/// within the returned span.
RelativeSweep bellman_sweep_relative(const CompiledKernel& kernel, const std::vector<double>& in,
                                     std::vector<double>& out);

/// Discounted value iteration from the zero table. Stops when the sup-norm
/// Bellman residual is <= tol. Throws std::invalid_argument unless
/// 0 < alpha < 1, ConvergenceError if max_iter sweeps do not reach tol.
ValueTable discounted_vi(const TruncatedSpace& space, const Params& params, double alpha,
                         double tol = 1e-9, long long max_iter = 1000000);

struct SolveResult {
    double gain = 0.0;
    ValueTable values;  // relative values
    Policy policy;
    long long iterations = 0;
    double residual = 0.0;  // final span of successive iterates
};

/// Relative value iteration for the long-run average age, reference state
/// (1,1,1), zero initial table. Stops when the span seminorm of successive
/// iterates is <= tol; the reported gain is the final sweep's change at the
/// reference state. Throws ConvergenceError if max_iter sweeps do not reach
/// tol.
SolveResult rvia(const TruncatedSpace& space, const Params& params, double tol = 1e-9,
                 long long max_iter = 1000000);

/// Greedy policy of a value table: per state the feasible action minimizing
/// cost + (alpha if discounted else 1) * expected next value, ties resolved
/// toward the smaller action number.
Policy greedy_policy(const TruncatedSpace& space, const Params& params, const ValueTable& values);

struct EvalResult {
    double gain = 0.0;
    std::vector<double> stationary;  // distribution in enumeration order
};

/// Long-run average age of a fixed feasible policy: stationary distribution of
/// the induced chain by repeated kernel application (L1 step tolerance 1e-12,
/// at most 10^7 sweeps), gain = stationary expectation of the stage cost.
EvalResult evaluate_policy_exact(const TruncatedSpace& space, const Params& params,
                                 const Policy& policy);

struct BruteForceResult {
    double gain = 0.0;
    Policy policy;
    long long policies_evaluated = 0;
};

/// Exhaustive policy search: every assignment over the free states
/// (v1, v2 finite, b = 1) is evaluated exactly and the best kept (first hit on
/// ties). Refuses spaces with more than 16 free states (cap > 5).
BruteForceResult brute_force_optimal(const TruncatedSpace& space, const Params& params);

/// Age threshold above which re-transmitting a packet of queue age v2 is
/// optimal: q2 v2 / (q2 - q1). Requires q1 < q2.
double retransmit_threshold(const Params& params, int v2);

struct ThresholdRow {
    int v2 = 0;
    double threshold = 0.0;          // q2 v2 / (q2 - q1)
    std::vector<int> retransmit_v1;  // v1 with Retransmit chosen at (v1, v2, 1)
    bool upward_closed_above_threshold = true;
};

struct ThresholdSummary {
    bool applicable = true;  // false when q1 = q2
    std::vector<ThresholdRow> rows;
};

/// Per-v2 shape of the Retransmit region of a policy against the analytic
/// threshold. Not applicable when q1 = q2.
ThresholdSummary threshold_summary(const Policy& policy, const Params& params);

}  // namespace aoi
