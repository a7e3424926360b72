#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "aoi/solver.hpp"

namespace aoi {

/// Counter-style deterministic generator: the stream is splitmix64 over a
/// 64-bit state seeded directly with the seed, one output word per call.
/// Identical across platforms; uniform() maps the top 53 bits into [0, 1).
class SlotRng {
  public:
    explicit SlotRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t word() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(word() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

/// Stationary decision rule over the untruncated state space.
using PolicyRule = std::function<Action(const State&)>;

enum class BaselineKind {
    AlwaysPreempt,  // TransmitNew whenever both a packet and a fresh arrival exist
    NeverPreempt,   // Retransmit until the queued packet is through
    Threshold,      // Retransmit iff v1 >= theta * v2
};

/// Baseline rule; forced actions apply everywhere outside the free states.
/// theta is used only by Threshold and must be positive there.
PolicyRule make_baseline(BaselineKind kind, double theta = 0.0);

/// Total rule backed by a solved policy table; states beyond the table's cap
/// fall back to the threshold shape q2 v2 / (q2 - q1) (always preempt when
/// q1 = q2).
PolicyRule rule_from_policy(const Policy& policy, const Params& params);

/// One slot of the untruncated chain driven by two uniform draws, channel
/// outcome first and arrival second. Matches transitions(s, a, params) in
/// distribution; both draws are consumed whatever the action.
State step(const State& s, Action a, const Params& params, double u_channel, double u_arrival);

struct TrajectoryStats {
    long long horizon = 0;
    std::uint64_t seed = 0;
    double time_average_age = 0.0;
    double std_error = 0.0;           // batch-means standard error, 30 batches
    double half_width_99 = 0.0;       // 99% confidence half width
    std::optional<double> mean_return_time;  // mean slots between visits to (1,Inf,1)
};

/// Per-slot trace hook: slot index (1-based), state before the step, action.
using TraceSink = std::function<void(long long, const State&, Action)>;

/// Rolls the chain for horizon slots from init under the rule, recording the
/// post-step age each slot. The error estimate splits the horizon into 30
/// equal batches. Throws FeasibilityError naming the state if the rule emits
/// an inadmissible action; requires horizon >= 10^4.
TrajectoryStats simulate(const PolicyRule& rule, const Params& params, long long horizon,
                         std::uint64_t seed, State init = State{},
                         const TraceSink& trace = nullptr);

/// Reference discipline outside the state space: a fresh arrival is sent once
/// (success probability q1) and discarded on failure. Long-run average age is
/// 1 / (p q1). Same two-draw slot layout as simulate.
TrajectoryStats simulate_drop_baseline(const Params& params, long long horizon,
                                       std::uint64_t seed);

}  // namespace aoi
