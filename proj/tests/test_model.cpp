#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "aoi/model.hpp"

using namespace aoi;

namespace {

State st(int v1, int v2, int b) { return {v1, QueueAge::finite(v2), b}; }
State st_inf(int v1, int b) { return {v1, QueueAge::inf(), b}; }

/// Distribution as a comparable map keyed by state text.
std::map<std::string, double> as_map(const std::vector<Transition>& dist) {
    std::map<std::string, double> out;
    for (const auto& t : dist) {
        REQUIRE(out.find(to_string(t.to)) == out.end());  // successors distinct
        out[to_string(t.to)] = t.prob;
    }
    return out;
}

void check_dist(const std::vector<Transition>& got,
                const std::map<std::string, double>& want, double tol = 1e-12) {
    const auto gm = as_map(got);
    REQUIRE(gm.size() == want.size());
    for (const auto& [state, prob] : want) {
        REQUIRE(gm.count(state) == 1);
        CHECK(std::fabs(gm.at(state) - prob) <= tol);
    }
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("parameter invariants") {
    CHECK_NOTHROW(Params(0.5, 0.3, 0.9));
    CHECK_NOTHROW(Params(1.0, 1.0, 1.0));
    CHECK_NOTHROW(Params(0.2, 0.5, 0.5));  // q1 = q2 admitted
    CHECK_THROWS_AS(Params(0.0, 0.3, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(Params(1.1, 0.3, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(Params(0.5, 0.0, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(Params(0.5, 0.9, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(Params(0.5, 0.3, 1.2), std::invalid_argument);
}

TEST_CASE("state invariants and text form") {
    CHECK_NOTHROW(validate_state(st(3, 2, 1)));
    CHECK_NOTHROW(validate_state(st_inf(7, 0)));
    CHECK_THROWS_AS(validate_state(State{0, QueueAge::inf(), 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_state(State{2, QueueAge::finite(3), 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_state(State{2, QueueAge::finite(1), 2}), std::invalid_argument);
    CHECK(to_string(st(3, 2, 1)) == "(3,2,1)");
    CHECK(to_string(st_inf(7, 0)) == "(7,inf,0)");
}

TEST_CASE("feasible actions are forced everywhere except fresh-arrival busy states") {
    CHECK(feasible_actions(st(4, 2, 0)) == std::vector<Action>{Action::Retransmit});
    CHECK(feasible_actions(st(4, 2, 1)) ==
          std::vector<Action>{Action::Retransmit, Action::TransmitNew});
    CHECK(feasible_actions(st_inf(4, 1)) == std::vector<Action>{Action::TransmitNew});
    CHECK(feasible_actions(st_inf(4, 0)) == std::vector<Action>{Action::Idle});
}

TEST_CASE("kernel: retransmission splits on channel then arrival") {
    const Params params(0.3, 0.2, 0.8);
    check_dist(transitions(st(2, 1, 0), Action::Retransmit, params),
               {{"(3,2,1)", 0.06}, {"(3,2,0)", 0.14}, {"(2,inf,0)", 0.56}, {"(2,inf,1)", 0.24}});
}

TEST_CASE("kernel: preemption resets the queue age to 1") {
    const Params params(0.5, 0.4, 0.9);
    check_dist(transitions(st(5, 2, 1), Action::TransmitNew, params),
               {{"(6,1,0)", 0.30}, {"(6,1,1)", 0.30}, {"(1,inf,0)", 0.20}, {"(1,inf,1)", 0.20}});
}

TEST_CASE("kernel: idling only ages the receiver") {
    const Params params(0.3, 0.2, 0.8);
    check_dist(transitions(st_inf(7, 0), Action::Idle, params),
               {{"(8,inf,0)", 0.7}, {"(8,inf,1)", 0.3}});
}

TEST_CASE("kernel drops zero-probability branches") {
    const Params sure(1.0, 1.0, 1.0);
    check_dist(transitions(st_inf(3, 1), Action::TransmitNew, sure), {{"(1,inf,1)", 1.0}});
    check_dist(transitions(st(3, 2, 1), Action::Retransmit, sure), {{"(3,inf,1)", 1.0}});
}

TEST_CASE("kernel rejects infeasible actions") {
    const Params params(0.5, 0.3, 0.9);
    CHECK_THROWS_AS(transitions(st(2, 1, 0), Action::TransmitNew, params), FeasibilityError);
    CHECK_THROWS_AS(transitions(st(2, 1, 0), Action::Idle, params), FeasibilityError);
    CHECK_THROWS_AS(transitions(st_inf(2, 1), Action::Retransmit, params), FeasibilityError);
    CHECK_THROWS_AS(transitions(st_inf(2, 0), Action::TransmitNew, params), FeasibilityError);
}

TEST_CASE("truncation redirects cap escapes to the frozen row") {
    const Params params(0.3, 0.2, 0.8);
    const TruncatedSpace space(5);
    check_dist(transitions_truncated(st(5, 2, 0), Action::Retransmit, params, space),
               {{"(5,2,1)", 0.06}, {"(5,2,0)", 0.14}, {"(3,inf,0)", 0.56}, {"(3,inf,1)", 0.24}});
}

TEST_CASE("truncation keeps the empty queue empty on the frozen row") {
    const Params params(0.3, 0.2, 0.8);
    const TruncatedSpace space(5);
    // Hand-enumerated: idling at the cap ages nothing, only the arrival moves.
    check_dist(transitions_truncated(st_inf(5, 0), Action::Idle, params, space),
               {{"(5,inf,0)", 0.7}, {"(5,inf,1)", 0.3}});
}

TEST_CASE("truncation merges colliding redirected successors") {
    const Params params(0.3, 0.2, 0.8);
    const TruncatedSpace space(1);
    // Hand-enumerated at cap 1: both failure branches and both delivery
    // branches collapse onto (1,1,b), split only by the arrival bit.
    check_dist(transitions_truncated(st(1, 1, 1), Action::Retransmit, params, space),
               {{"(1,1,1)", 0.3}, {"(1,1,0)", 0.7}});
}

TEST_CASE("truncated kernel equals the full kernel below the cap") {
    const Params params(0.5, 0.3, 0.9);
    const TruncatedSpace space(7);
    for (const State& s : space.states()) {
        if (s.v1 == space.cap()) continue;
        for (Action a : feasible_actions(s)) {
            const auto full = as_map(transitions(s, a, params));
            const auto truncated = as_map(transitions_truncated(s, a, params, space));
            CHECK(full == truncated);
        }
    }
}

TEST_CASE("kernel rows are stochastic and cost matches the expected next age") {
    const TruncatedSpace space(7);
    for (const Params& params :
         {Params(0.3, 0.2, 0.9), Params(0.5, 0.3, 0.9), Params(1.0, 1.0, 1.0),
          Params(0.7, 0.4, 0.4)}) {
        for (const State& s : space.states()) {
            for (Action a : feasible_actions(s)) {
                double full_sum = 0.0;
                double expected_age = 0.0;
                for (const auto& t : transitions(s, a, params)) {
                    CHECK_NOTHROW(validate_state(t.to));
                    CHECK(t.prob > 0.0);
                    full_sum += t.prob;
                    expected_age += t.prob * t.to.v1;
                }
                CHECK(std::fabs(full_sum - 1.0) <= 1e-12);
                CHECK(std::fabs(cost(s, a, params) - expected_age) <= 1e-12);

                double truncated_sum = 0.0;
                for (const auto& t : transitions_truncated(s, a, params, space)) {
                    CHECK(space.contains(t.to));
                    CHECK(t.prob > 0.0);
                    truncated_sum += t.prob;
                }
                CHECK(std::fabs(truncated_sum - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("cost closed forms") {
    CHECK(cost(st(3, 1, 1), Action::TransmitNew, Params(0.5, 0.5, 0.9)) == doctest::Approx(2.5).epsilon(1e-13));
    CHECK(cost(st(3, 1, 1), Action::Retransmit, Params(0.5, 0.5, 0.8)) == doctest::Approx(2.4).epsilon(1e-13));
    CHECK(cost(st_inf(7, 0), Action::Idle, Params(0.5, 0.3, 0.9)) == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("enumeration order and size") {
    const TruncatedSpace one(1);
    REQUIRE(one.size() == 4);
    CHECK(one.state(0) == st(1, 1, 0));
    CHECK(one.state(1) == st(1, 1, 1));
    CHECK(one.state(2) == st_inf(1, 0));
    CHECK(one.state(3) == st_inf(1, 1));

    CHECK(TruncatedSpace(2).size() == 10);
    CHECK(TruncatedSpace(100).size() == 10300);
    CHECK_THROWS_AS(TruncatedSpace(0), std::invalid_argument);
}

TEST_CASE("state indexing round-trips and rejects outsiders") {
    const TruncatedSpace one(1);
    CHECK(one.index(st(1, 1, 0)) == 0);
    CHECK(one.index(st_inf(1, 1)) == 3);
    const TruncatedSpace two(2);
    CHECK(two.index(st_inf(2, 1)) == 9);

    const TruncatedSpace space(9);
    for (std::size_t i = 0; i < space.size(); ++i)
        CHECK(space.index(space.state(i)) == static_cast<int>(i));
    CHECK_THROWS_AS(space.index(st(10, 1, 0)), StateIndexError);
    CHECK_THROWS_AS(space.index(State{3, QueueAge::finite(4), 0}), StateIndexError);
}

}  // TEST_SUITE
