#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoi {

/// Slot-level parameters of the status-update link.
///
/// p  : probability that a fresh update arrives at the transmitter in a slot
/// q1 : delivery probability of a first transmission attempt
/// q2 : delivery probability of a re-transmission attempt (q2 >= q1, the
///      receiver keeps the observations of failed attempts)
struct Params {
    double p;
    double q1;
    double q2;

    Params(double p_, double q1_, double q2_) : p(p_), q1(q1_), q2(q2_) { validate(); }

    /// Throws std::invalid_argument unless 0 < p <= 1 and 0 < q1 <= q2 <= 1.
    void validate() const;
};

/// Age of the packet waiting at the transmitter. The queue holds at most one
/// packet; an empty queue is the explicit Inf value, which compares greater
/// than every finite age and is serialized as "inf".
class QueueAge {
  public:
    constexpr QueueAge() : age_(kEmpty) {}

    static constexpr QueueAge inf() { return QueueAge(); }

    /// Finite age, at least 1.
    static QueueAge finite(int age) {
        if (age < 1) throw std::invalid_argument("queue age must be >= 1");
        QueueAge q;
        q.age_ = age;
        return q;
    }

    constexpr bool is_inf() const { return age_ == kEmpty; }

    int value() const {
        if (is_inf()) throw std::logic_error("queue age is inf");
        return age_;
    }

    friend constexpr bool operator==(QueueAge a, QueueAge b) { return a.age_ == b.age_; }
    friend constexpr bool operator!=(QueueAge a, QueueAge b) { return !(a == b); }

    /// Total order with Inf on top; used for enumeration and truncation.
    friend constexpr bool operator<(QueueAge a, QueueAge b) {
        if (a.is_inf()) return false;
        if (b.is_inf()) return true;
        return a.age_ < b.age_;
    }

    friend constexpr QueueAge min(QueueAge a, QueueAge b) { return b < a ? b : a; }

  private:
    static constexpr int kEmpty = 0;  // never a legal age, ages start at 1
    int age_;
};

std::string to_string(QueueAge v2);

/// State of the link at a slot boundary.
///
/// v1 : age of the most recent update held by the receiver (>= 1)
/// v2 : age of the packet in the transmitter queue, Inf if the queue is empty;
///      a queued packet is never older than the delivered one (v2 <= v1)
/// b  : 1 if a fresh update arrived in the slot that just ended
struct State {
    int v1 = 1;
    QueueAge v2 = QueueAge::inf();
    int b = 0;

    friend bool operator==(const State& a, const State& b_) {
        return a.v1 == b_.v1 && a.v2 == b_.v2 && a.b == b_.b;
    }
    friend bool operator!=(const State& a, const State& b_) { return !(a == b_); }
};

/// Throws std::invalid_argument if s violates a state invariant.
void validate_state(const State& s);

std::string to_string(const State& s);

/// Control in a slot. Numeric values are fixed: ties and serialization use them.
enum class Action : int {
    Retransmit = 0,   // re-send the queued packet (success probability q2)
    TransmitNew = 1,  // send the fresh arrival, discarding the queued packet
    Idle = 2,         // nothing to send
};

std::string to_string(Action a);

struct FeasibilityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct StateIndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Actions admissible in s. The set is forced everywhere except at
/// (v1, v2 finite, b = 1), where Retransmit and TransmitNew compete:
///   (v1, v2, 0)   -> {Retransmit}
///   (v1, v2, 1)   -> {Retransmit, TransmitNew}
///   (v1, Inf, 1)  -> {TransmitNew}
///   (v1, Inf, 0)  -> {Idle}
std::vector<Action> feasible_actions(const State& s);

bool is_feasible(const State& s, Action a);

struct Transition {
    State to;
    double prob;
};

/// One-slot transition distribution of the untruncated chain. Zero-probability
/// entries are dropped; the remaining successors are distinct and sum to 1.
/// Throws FeasibilityError if a is not admissible in s.
std::vector<Transition> transitions(const State& s, Action a, const Params& params);

/// Finite state space with receiver age capped at N:
/// 1 <= v1 <= N, v2 in {1..v1, Inf}, b in {0, 1}; N(N+3) states.
/// Enumeration order is fixed: ascending v1, then v2 with Inf last, then b.
class TruncatedSpace {
  public:
    /// Throws std::invalid_argument if cap < 1.
    explicit TruncatedSpace(int cap);

    int cap() const { return cap_; }
    std::size_t size() const { return states_.size(); }
    const std::vector<State>& states() const { return states_; }
    const State& state(std::size_t index) const { return states_.at(index); }

    bool contains(const State& s) const;

    /// Position of s in enumeration order. Throws StateIndexError if s is
    /// outside the space.
    int index(const State& s) const;

  private:
    int cap_;
    std::vector<State> states_;
};

inline TruncatedSpace enumerate_states(int cap) { return TruncatedSpace(cap); }

/// Transition distribution of the truncated chain. Successors that would leave
/// the space (always via v1 = cap + 1, so only from states with v1 = cap) are
/// redirected to (s.v1, min(successor v2, s.v2), successor b); redirected
/// entries that collide are merged by summing probabilities.
std::vector<Transition> transitions_truncated(const State& s, Action a, const Params& params,
                                              const TruncatedSpace& space);

/// Expected age at the receiver after one slot, i.e. the transition-weighted
/// successor v1 of the untruncated chain. The truncated chain charges the same
/// amount. Closed forms:
///   Retransmit  -> q2 (v2 + 1) + (1 - q2)(v1 + 1)
///   TransmitNew -> q1 + (1 - q1)(v1 + 1)
///   Idle        -> v1 + 1
double cost(const State& s, Action a, const Params& params);

}  // namespace aoi
