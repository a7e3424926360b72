#include "aoi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aoi {

CompiledKernel::CompiledKernel(const TruncatedSpace& space, const Params& params)
    : space_(&space), params_(params) {
    nodes_.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const State& s = space.state(i);
        Node& node = nodes_[i];
        for (Action a : feasible_actions(s)) {
            Choice& c = node.choice[static_cast<std::size_t>(node.n++)];
            c.action = a;
            c.cost = cost(s, a, params);
            for (const Transition& t : transitions_truncated(s, a, params, space)) {
                c.to[static_cast<std::size_t>(c.fan)] = space.index(t.to);
                c.pr[static_cast<std::size_t>(c.fan)] = t.prob;
                ++c.fan;
            }
        }
    }
    ref_index_ = space.index({1, QueueAge::finite(1), 1});
}

namespace {

double choice_value(const CompiledKernel::Choice& c, double factor, const std::vector<double>& v) {
    double ev = 0.0;
    for (int k = 0; k < c.fan; ++k) ev += c.pr[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(c.to[static_cast<std::size_t>(k)])];
    return c.cost + factor * ev;
}

double bellman_value(const CompiledKernel::Node& node, double factor, const std::vector<double>& v) {
    double best = choice_value(node.choice[0], factor, v);
    if (node.n == 2) best = std::min(best, choice_value(node.choice[1], factor, v));
    return best;
}

}  // namespace

double bellman_sweep_discounted(const CompiledKernel& kernel, double alpha,
                                const std::vector<double>& in, std::vector<double>& out) {
    const auto& nodes = kernel.nodes();
    out.resize(in.size());
    double diff = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out[i] = bellman_value(nodes[i], alpha, in);
        diff = std::max(diff, std::fabs(out[i] - in[i]));
    }
    return diff;
}

RelativeSweep bellman_sweep_relative(const CompiledKernel& kernel, const std::vector<double>& in,
                                     std::vector<double>& out) {
    const auto& nodes = kernel.nodes();
    const std::size_t ref = static_cast<std::size_t>(kernel.ref_index());
    out.resize(in.size());
    const double offset = in[ref];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double bellman = bellman_value(nodes[i], 1.0, in);
        out[i] = bellman - offset;
        const double step = out[i] - in[i];
        lo = std::min(lo, step);
        hi = std::max(hi, step);
    }
    // out[ref] equals the un-relativized Bellman value at the reference state
    // minus its previous value, the quantity that brackets the optimal gain.
    return {hi - lo, out[ref]};
}

ValueTable discounted_vi(const TruncatedSpace& space, const Params& params, double alpha,
                         double tol, long long max_iter) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("alpha must satisfy 0 < alpha < 1");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");

    CompiledKernel kernel(space, params);
    ValueTable table{&space, ValueMode::Discounted, alpha, std::vector<double>(space.size(), 0.0)};
    std::vector<double> next(space.size());
    double residual = std::numeric_limits<double>::infinity();
    for (long long n = 0; n < max_iter; ++n) {
        residual = bellman_sweep_discounted(kernel, alpha, table.v, next);
        table.v.swap(next);
        if (residual <= tol) return table;
    }
    throw ConvergenceError("discounted value iteration did not reach tol, last residual " +
                               std::to_string(residual),
                           residual, max_iter);
}

SolveResult rvia(const TruncatedSpace& space, const Params& params, double tol,
                 long long max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");

    CompiledKernel kernel(space, params);
    SolveResult result;
    result.values = ValueTable{&space, ValueMode::Relative, 0.0,
                               std::vector<double>(space.size(), 0.0)};
    std::vector<double> next(space.size());
    for (long long n = 1; n <= max_iter; ++n) {
        const RelativeSweep sweep = bellman_sweep_relative(kernel, result.values.v, next);
        result.values.v.swap(next);
        result.iterations = n;
        result.residual = sweep.span;
        result.gain = sweep.gain_estimate;
        if (sweep.span <= tol) {
            result.policy = greedy_policy(space, params, result.values);
            return result;
        }
    }
    throw ConvergenceError("relative value iteration did not reach tol, last span " +
                               std::to_string(result.residual),
                           result.residual, max_iter);
}

Policy greedy_policy(const TruncatedSpace& space, const Params& params, const ValueTable& values) {
    if (values.space != &space || values.v.size() != space.size())
        throw std::invalid_argument("value table does not match the space");
    const double factor = values.mode == ValueMode::Discounted ? values.alpha : 1.0;
    CompiledKernel kernel(space, params);
    Policy policy{&space, {}};
    policy.actions.reserve(space.size());
    for (const auto& node : kernel.nodes()) {
        // Feasible actions are compiled in ascending numeric order, so on a
        // tie the strict < keeps the smaller action number.
        Action best = node.choice[0].action;
        double best_value = choice_value(node.choice[0], factor, values.v);
        if (node.n == 2) {
            const double alt = choice_value(node.choice[1], factor, values.v);
            if (alt < best_value) {
                best = node.choice[1].action;
                best_value = alt;
            }
        }
        policy.actions.push_back(best);
    }
    return policy;
}

namespace {

constexpr double kStationaryTol = 1e-12;
constexpr long long kStationaryMaxSweeps = 10000000;

}  // namespace

EvalResult evaluate_policy_exact(const TruncatedSpace& space, const Params& params,
                                 const Policy& policy) {
    if (policy.space != &space || policy.actions.size() != space.size())
        throw std::invalid_argument("policy does not match the space");

    // Row of the induced chain per state, validated against feasibility.
    struct Row {
        double cost;
        int fan = 0;
        std::array<int, 4> to{};
        std::array<double, 4> pr{};
    };
    std::vector<Row> rows(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        const State& s = space.state(i);
        const Action a = policy.actions[i];
        if (!is_feasible(s, a))
            throw FeasibilityError("policy action " + to_string(a) + " infeasible in state " +
                                   to_string(s));
        Row& row = rows[i];
        row.cost = cost(s, a, params);
        for (const Transition& t : transitions_truncated(s, a, params, space)) {
            row.to[static_cast<std::size_t>(row.fan)] = space.index(t.to);
            row.pr[static_cast<std::size_t>(row.fan)] = t.prob;
            ++row.fan;
        }
    }

    EvalResult result;
    result.stationary.assign(space.size(), 1.0 / static_cast<double>(space.size()));
    std::vector<double> next(space.size());
    for (long long sweep = 0; sweep < kStationaryMaxSweeps; ++sweep) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& row = rows[i];
            const double mass = result.stationary[i];
            for (int k = 0; k < row.fan; ++k)
                next[static_cast<std::size_t>(row.to[static_cast<std::size_t>(k)])] +=
                    mass * row.pr[static_cast<std::size_t>(k)];
        }
        double l1 = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            l1 += std::fabs(next[i] - result.stationary[i]);
            total += next[i];
        }
        for (double& x : next) x /= total;  // keep the mass at exactly 1
        result.stationary.swap(next);
        if (l1 <= kStationaryTol) {
            result.gain = 0.0;
            for (std::size_t i = 0; i < rows.size(); ++i)
                result.gain += result.stationary[i] * rows[i].cost;
            return result;
        }
    }
    throw ConvergenceError("stationary distribution iteration did not reach tol", 0.0,
                           kStationaryMaxSweeps);
}

BruteForceResult brute_force_optimal(const TruncatedSpace& space, const Params& params) {
    std::vector<std::size_t> free_states;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const State& s = space.state(i);
        if (!s.v2.is_inf() && s.b == 1) free_states.push_back(i);
    }
    if (free_states.size() > 16)
        throw std::invalid_argument("brute force refused: " + std::to_string(free_states.size()) +
                                    " free states exceed 16 (use cap <= 5)");

    Policy policy{&space, {}};
    policy.actions.reserve(space.size());
    for (const State& s : space.states()) policy.actions.push_back(feasible_actions(s)[0]);

    BruteForceResult best;
    best.gain = std::numeric_limits<double>::infinity();
    const std::uint32_t count = 1u << free_states.size();
    for (std::uint32_t mask = 0; mask < count; ++mask) {
        for (std::size_t k = 0; k < free_states.size(); ++k)
            policy.actions[free_states[k]] =
                (mask >> k) & 1u ? Action::TransmitNew : Action::Retransmit;
        const EvalResult eval = evaluate_policy_exact(space, params, policy);
        if (eval.gain < best.gain) {
            best.gain = eval.gain;
            best.policy = policy;
        }
    }
    best.policies_evaluated = count;
    return best;
}

double retransmit_threshold(const Params& params, int v2) {
    if (!(params.q1 < params.q2))
        throw std::invalid_argument("retransmit threshold needs q1 < q2");
    return params.q2 * static_cast<double>(v2) / (params.q2 - params.q1);
}

ThresholdSummary threshold_summary(const Policy& policy, const Params& params) {
    if (policy.space == nullptr || policy.actions.size() != policy.space->size())
        throw std::invalid_argument("policy does not match its space");
    ThresholdSummary summary;
    if (params.q1 == params.q2) {
        summary.applicable = false;
        return summary;
    }
    const TruncatedSpace& space = *policy.space;
    const int cap = space.cap();
    summary.rows.reserve(static_cast<std::size_t>(cap));
    for (int v2 = 1; v2 <= cap; ++v2) {
        ThresholdRow row;
        row.v2 = v2;
        row.threshold = retransmit_threshold(params, v2);
        for (int v1 = v2; v1 <= cap; ++v1) {
            if (policy.at({v1, QueueAge::finite(v2), 1}) == Action::Retransmit)
                row.retransmit_v1.push_back(v1);
        }
        // Upward closed above the threshold: past the first Retransmit at or
        // above it, Retransmit never switches off again.
        bool seen = false;
        for (int v1 = v2; v1 <= cap; ++v1) {
            const bool retransmit = std::binary_search(row.retransmit_v1.begin(),
                                                       row.retransmit_v1.end(), v1);
            if (static_cast<double>(v1) < row.threshold) continue;
            if (retransmit)
                seen = true;
            else if (seen)
                row.upward_closed_above_threshold = false;
        }
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

}  // namespace aoi
