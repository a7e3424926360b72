#include "aoi/model.hpp"

#include <algorithm>
#include <sstream>

namespace aoi {

void Params::validate() const {
    if (!(p > 0.0) || !(p <= 1.0)) throw std::invalid_argument("p must satisfy 0 < p <= 1");
    if (!(q1 > 0.0)) throw std::invalid_argument("q1 must satisfy 0 < q1 <= q2");
    if (!(q1 <= q2)) throw std::invalid_argument("q1 must satisfy 0 < q1 <= q2");
    if (!(q2 <= 1.0)) throw std::invalid_argument("q2 must satisfy q1 <= q2 <= 1");
}

std::string to_string(QueueAge v2) {
    return v2.is_inf() ? std::string("inf") : std::to_string(v2.value());
}

void validate_state(const State& s) {
    if (s.v1 < 1) throw std::invalid_argument("state has v1 < 1: " + to_string(s));
    if (s.b != 0 && s.b != 1) throw std::invalid_argument("state has b outside {0,1}: " + to_string(s));
    if (!s.v2.is_inf() && s.v2.value() > s.v1)
        throw std::invalid_argument("state has v2 > v1: " + to_string(s));
}

std::string to_string(const State& s) {
    std::ostringstream out;
    out << '(' << s.v1 << ',' << to_string(s.v2) << ',' << s.b << ')';
    return out.str();
}

std::string to_string(Action a) {
    switch (a) {
        case Action::Retransmit: return "retransmit";
        case Action::TransmitNew: return "transmit_new";
        case Action::Idle: return "idle";
    }
    throw std::invalid_argument("unknown action");
}

std::vector<Action> feasible_actions(const State& s) {
    validate_state(s);
    if (s.v2.is_inf()) {
        if (s.b == 1) return {Action::TransmitNew};
        return {Action::Idle};
    }
    if (s.b == 1) return {Action::Retransmit, Action::TransmitNew};
    return {Action::Retransmit};
}

bool is_feasible(const State& s, Action a) {
    const auto acts = feasible_actions(s);
    return std::find(acts.begin(), acts.end(), a) != acts.end();
}

namespace {

void push_nonzero(std::vector<Transition>& out, State to, double prob) {
    if (prob > 0.0) out.push_back({to, prob});
}

}  // namespace

std::vector<Transition> transitions(const State& s, Action a, const Params& params) {
    if (!is_feasible(s, a))
        throw FeasibilityError("action " + to_string(a) + " infeasible in state " + to_string(s));

    const double p = params.p;
    std::vector<Transition> out;
    out.reserve(4);
    switch (a) {
        case Action::Retransmit: {
            // Failure keeps both packets aging; success promotes the queued
            // packet, emptying the queue. A fresh arrival sets b either way.
            const double q2 = params.q2;
            const int v2 = s.v2.value();
            push_nonzero(out, {s.v1 + 1, QueueAge::finite(v2 + 1), 1}, p * (1.0 - q2));
            push_nonzero(out, {s.v1 + 1, QueueAge::finite(v2 + 1), 0}, (1.0 - p) * (1.0 - q2));
            push_nonzero(out, {v2 + 1, QueueAge::inf(), 0}, (1.0 - p) * q2);
            push_nonzero(out, {v2 + 1, QueueAge::inf(), 1}, p * q2);
            break;
        }
        case Action::TransmitNew: {
            // The fresh packet replaces whatever was queued; on failure it is
            // the queued packet of the next slot, aged 1.
            const double q1 = params.q1;
            push_nonzero(out, {s.v1 + 1, QueueAge::finite(1), 0}, (1.0 - p) * (1.0 - q1));
            push_nonzero(out, {s.v1 + 1, QueueAge::finite(1), 1}, p * (1.0 - q1));
            push_nonzero(out, {1, QueueAge::inf(), 0}, (1.0 - p) * q1);
            push_nonzero(out, {1, QueueAge::inf(), 1}, p * q1);
            break;
        }
        case Action::Idle: {
            push_nonzero(out, {s.v1 + 1, QueueAge::inf(), 0}, 1.0 - p);
            push_nonzero(out, {s.v1 + 1, QueueAge::inf(), 1}, p);
            break;
        }
    }
    return out;
}

TruncatedSpace::TruncatedSpace(int cap) : cap_(cap) {
    if (cap < 1) throw std::invalid_argument("state space cap must be >= 1");
    states_.reserve(static_cast<std::size_t>(cap) * (cap + 3));
    for (int v1 = 1; v1 <= cap; ++v1) {
        for (int v2 = 1; v2 <= v1; ++v2)
            for (int b = 0; b <= 1; ++b) states_.push_back({v1, QueueAge::finite(v2), b});
        for (int b = 0; b <= 1; ++b) states_.push_back({v1, QueueAge::inf(), b});
    }
}

bool TruncatedSpace::contains(const State& s) const {
    if (s.v1 < 1 || s.v1 > cap_ || (s.b != 0 && s.b != 1)) return false;
    if (s.v2.is_inf()) return true;
    return s.v2.value() >= 1 && s.v2.value() <= s.v1;
}

int TruncatedSpace::index(const State& s) const {
    if (!contains(s)) throw StateIndexError("state " + to_string(s) + " outside the space");
    // States below v1 occupy (v1-1)(v1+2) slots; within a v1 block the order
    // is v2 = 1..v1 then Inf, each with b = 0 then 1.
    const int before = (s.v1 - 1) * (s.v1 + 2);
    const int within = s.v2.is_inf() ? 2 * s.v1 : 2 * (s.v2.value() - 1);
    return before + within + s.b;
}

std::vector<Transition> transitions_truncated(const State& s, Action a, const Params& params,
                                              const TruncatedSpace& space) {
    if (!space.contains(s))
        throw StateIndexError("state " + to_string(s) + " outside the space");
    std::vector<Transition> out = transitions(s, a, params);
    for (auto& t : out) {
        if (!space.contains(t.to)) t.to = {s.v1, min(t.to.v2, s.v2), t.to.b};
    }
    // Merge entries redirected onto the same successor.
    std::vector<Transition> merged;
    merged.reserve(out.size());
    for (const auto& t : out) {
        auto hit = std::find_if(merged.begin(), merged.end(),
                                [&](const Transition& m) { return m.to == t.to; });
        if (hit == merged.end())
            merged.push_back(t);
        else
            hit->prob += t.prob;
    }
    return merged;
}

double cost(const State& s, Action a, const Params& params) {
    if (!is_feasible(s, a))
        throw FeasibilityError("action " + to_string(a) + " infeasible in state " + to_string(s));
    switch (a) {
        case Action::Retransmit:
            return params.q2 * (s.v2.value() + 1) + (1.0 - params.q2) * (s.v1 + 1);
        case Action::TransmitNew:
            return params.q1 + (1.0 - params.q1) * (s.v1 + 1);
        case Action::Idle:
            return s.v1 + 1.0;
    }
    throw std::invalid_argument("unknown action");
}

}  // namespace aoi
