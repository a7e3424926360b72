#include "aoi/sim.hpp"

#include <cmath>

namespace aoi {

namespace {

// Two-sided 99% Student t quantile at 29 degrees of freedom (30 batches).
constexpr double kT995Dof29 = 2.7563859036711267;
constexpr int kBatches = 30;
constexpr long long kMinHorizon = 10000;

Action forced_action(const State& s) {
    if (s.v2.is_inf()) return s.b == 1 ? Action::TransmitNew : Action::Idle;
    return Action::Retransmit;  // b = 0 with a queued packet
}

bool is_free_state(const State& s) { return !s.v2.is_inf() && s.b == 1; }

struct BatchAccumulator {
    long long horizon;
    long long batch_size;
    double total = 0.0;
    double batch_sum = 0.0;
    std::vector<double> means;

    explicit BatchAccumulator(long long horizon_)
        : horizon(horizon_), batch_size(horizon_ / kBatches) {
        means.reserve(kBatches);
    }

    void add(long long slot, double age) {
        total += age;
        if (slot <= batch_size * kBatches) {
            batch_sum += age;
            if (slot % batch_size == 0) {
                means.push_back(batch_sum / static_cast<double>(batch_size));
                batch_sum = 0.0;
            }
        }
    }

    void fill(TrajectoryStats& stats) const {
        stats.horizon = horizon;
        stats.time_average_age = total / static_cast<double>(horizon);
        double mean = 0.0;
        for (double m : means) mean += m;
        mean /= static_cast<double>(means.size());
        double ss = 0.0;
        for (double m : means) ss += (m - mean) * (m - mean);
        const double var = ss / static_cast<double>(means.size() - 1);
        stats.std_error = std::sqrt(var / static_cast<double>(means.size()));
        stats.half_width_99 = kT995Dof29 * stats.std_error;
    }
};

}  // namespace

PolicyRule make_baseline(BaselineKind kind, double theta) {
    if (kind == BaselineKind::Threshold && !(theta > 0.0))
        throw std::invalid_argument("threshold baseline needs theta > 0");
    return [kind, theta](const State& s) {
        if (!is_free_state(s)) return forced_action(s);
        switch (kind) {
            case BaselineKind::AlwaysPreempt: return Action::TransmitNew;
            case BaselineKind::NeverPreempt: return Action::Retransmit;
            case BaselineKind::Threshold:
                return static_cast<double>(s.v1) >= theta * s.v2.value() ? Action::Retransmit
                                                                         : Action::TransmitNew;
        }
        throw std::invalid_argument("unknown baseline kind");
    };
}

PolicyRule rule_from_policy(const Policy& policy, const Params& params) {
    if (policy.space == nullptr || policy.actions.size() != policy.space->size())
        throw std::invalid_argument("policy does not match its space");
    // Self-contained copies; the rule outlives the caller's solver objects.
    const TruncatedSpace space = *policy.space;
    const std::vector<Action> actions = policy.actions;
    const bool threshold_defined = params.q1 < params.q2;
    const double ratio = threshold_defined ? params.q2 / (params.q2 - params.q1) : 0.0;
    return [space, actions, threshold_defined, ratio](const State& s) {
        if (space.contains(s)) return actions[static_cast<std::size_t>(space.index(s))];
        if (!is_free_state(s)) return forced_action(s);
        if (!threshold_defined) return Action::TransmitNew;
        return static_cast<double>(s.v1) >= ratio * s.v2.value() ? Action::Retransmit
                                                                 : Action::TransmitNew;
    };
}

State step(const State& s, Action a, const Params& params, double u_channel, double u_arrival) {
    if (!is_feasible(s, a))
        throw FeasibilityError("action " + to_string(a) + " infeasible in state " + to_string(s));
    const int arrival = u_arrival < params.p ? 1 : 0;
    switch (a) {
        case Action::Retransmit:
            if (u_channel < params.q2) return {s.v2.value() + 1, QueueAge::inf(), arrival};
            return {s.v1 + 1, QueueAge::finite(s.v2.value() + 1), arrival};
        case Action::TransmitNew:
            if (u_channel < params.q1) return {1, QueueAge::inf(), arrival};
            return {s.v1 + 1, QueueAge::finite(1), arrival};
        case Action::Idle:
            return {s.v1 + 1, QueueAge::inf(), arrival};
    }
    throw std::invalid_argument("unknown action");
}

TrajectoryStats simulate(const PolicyRule& rule, const Params& params, long long horizon,
                         std::uint64_t seed, State init, const TraceSink& trace) {
    if (horizon < kMinHorizon)
        throw std::invalid_argument("horizon must be >= " + std::to_string(kMinHorizon));
    validate_state(init);
    if (!rule) throw std::invalid_argument("rule is empty");

    SlotRng rng(seed);
    BatchAccumulator acc(horizon);
    const State home{1, QueueAge::inf(), 1};
    long long last_visit = -1;
    long long gap_total = 0;
    long long gap_count = 0;

    State s = init;
    for (long long slot = 1; slot <= horizon; ++slot) {
        const Action a = rule(s);
        if (!is_feasible(s, a))
            throw FeasibilityError("rule chose " + to_string(a) + " at state " + to_string(s));
        if (trace) trace(slot, s, a);
        const double u_channel = rng.uniform();
        const double u_arrival = rng.uniform();
        s = step(s, a, params, u_channel, u_arrival);
        acc.add(slot, static_cast<double>(s.v1));
        if (s == home) {
            if (last_visit >= 0) {
                gap_total += slot - last_visit;
                ++gap_count;
            }
            last_visit = slot;
        }
    }

    TrajectoryStats stats;
    stats.seed = seed;
    acc.fill(stats);
    if (gap_count > 0)
        stats.mean_return_time = static_cast<double>(gap_total) / static_cast<double>(gap_count);
    return stats;
}

TrajectoryStats simulate_drop_baseline(const Params& params, long long horizon,
                                       std::uint64_t seed) {
    if (horizon < kMinHorizon)
        throw std::invalid_argument("horizon must be >= " + std::to_string(kMinHorizon));
    SlotRng rng(seed);
    BatchAccumulator acc(horizon);
    long long age = 1;
    for (long long slot = 1; slot <= horizon; ++slot) {
        const double u_channel = rng.uniform();
        const double u_arrival = rng.uniform();
        const bool delivered = u_arrival < params.p && u_channel < params.q1;
        age = delivered ? 1 : age + 1;
        acc.add(slot, static_cast<double>(age));
    }
    TrajectoryStats stats;
    stats.seed = seed;
    acc.fill(stats);
    return stats;
}

}  // namespace aoi
