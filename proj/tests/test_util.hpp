#pragma once

#include <string>

#include "aoi/solver.hpp"

namespace aoi_test {

/// Shorthand state literal; v2 < 0 means the empty-queue marker.
inline aoi::State st(int v1, int v2, int b) {
    return aoi::State{v1, v2 < 0 ? aoi::QueueAge::inf() : aoi::QueueAge::finite(v2), b};
}

enum class FixedShape { AlwaysPreempt, NeverPreempt };

/// Deterministic policy table with the forced actions everywhere and the given
/// shape on the free states (finite queue age, fresh arrival present).
inline aoi::Policy fixed_policy(const aoi::TruncatedSpace& space, FixedShape shape) {
    aoi::Policy policy{&space, {}};
    policy.actions.reserve(space.size());
    for (const aoi::State& s : space.states()) {
        aoi::Action a;
        if (s.v2.is_inf())
            a = s.b == 1 ? aoi::Action::TransmitNew : aoi::Action::Idle;
        else if (s.b == 0)
            a = aoi::Action::Retransmit;
        else
            a = shape == FixedShape::AlwaysPreempt ? aoi::Action::TransmitNew
                                                   : aoi::Action::Retransmit;
        policy.actions.push_back(a);
    }
    return policy;
}

inline bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace aoi_test
