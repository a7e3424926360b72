#pragma once

#include <map>
#include <string>
#include <vector>

#include "aoi/solver.hpp"

namespace aoi {

/// One failed assertion of a structure check. Column meanings per check:
///   monotonicity         base state (v1,v2,b), offsets (x,y);
///                        lhs = V(v1+x, v2+y, b), rhs = V(v1, v2, b)
///   concavity            center state (v1,v2,b), x = y = 0;
///                        lhs = V(v1+1)-V(v1), rhs = V(v1)-V(v1-1)
///   preempt_switching    base state (v1,v2,1), x = shift in v2, y = 0;
///                        lhs = action at (v1, v2+x, 1), rhs = required action
///   difference_bounds_*  base (v1,v2,b), x = the larger queue age, y = shift
///                        in v1; lhs/rhs = the two sides of the inequality
///   retransmit_threshold base state (v1,v2,1), x = shift in v1, y = 0;
///                        lhs = action at (v1+x, v2, 1), rhs = required action
struct Violation {
    std::string check;
    int v1 = 0;
    QueueAge v2;
    int b = 0;
    int x = 0;
    int y = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Result of one exhaustive structure check over a solved instance.
struct StructureReport {
    static constexpr int kMaxViolations = 20;

    std::string check;
    bool applicable = true;  // false when the property's parameter precondition fails
    bool pass = false;
    long long tuples_checked = 0;
    double worst_violation = 0.0;  // signed; positive means the inequality failed
    double tolerance = 0.0;
    std::vector<Violation> violations;     // first kMaxViolations failures
    std::map<int, double> worst_by_row;    // worst violation keyed by the top v1 of the tuple
};

constexpr double kStructureTol = 1e-9;

/// Values nondecreasing in (v1, v2) componentwise for finite queue ages, and
/// nondecreasing in v1 along the empty-queue column, at fixed b.
StructureReport check_monotonicity(const ValueTable& values, double tol = kStructureTol);

/// Once preempting is chosen at (v1, v2, 1), it stays chosen as the queued
/// packet gets older: action TransmitNew at (v1, v2, 1) forces TransmitNew at
/// (v1, v2+x, 1) for 0 <= x <= v1-v2.
StructureReport check_preempt_switching(const Policy& policy, double tol = kStructureTol);

/// Values concave in v1 at fixed finite v2 and b: first differences
/// V(v1+1)-V(v1) nonincreasing in v1 over v2 <= v1-1, v1+1 <= cap.
StructureReport check_concavity(const ValueTable& values, double tol = kStructureTol);

/// Growth of the value in v1 is ordered and ratio-bounded across queue ages:
/// with D(w) = V(v1+y, w, b) - V(v1, w, b),
///   D(v2) <= D(w2)  and  D(w2) <= (1-q1)/(1-q2) D(v2)
/// for all v2 <= w2 <= v1, y >= 1, v1+y <= cap, both b. Not applicable when
/// q2 = 1.
StructureReport check_difference_bounds(const ValueTable& values, const Params& params,
                                        double tol = kStructureTol);

/// Retransmit is upward closed in v1 above the analytic threshold: if
/// v1 >= q2 v2/(q2-q1) and Retransmit is chosen at (v1, v2, 1), every
/// (v1+x, v2, 1) up to the cap also chooses Retransmit. Not applicable when
/// q1 = q2.
StructureReport check_retransmit_threshold(const Policy& policy, const Params& params,
                                           double tol = kStructureTol);

/// Line-oriented summary: one headline per check plus one line per state-space
/// row so cap-boundary anomalies are visible.
std::string summary_text(const std::vector<StructureReport>& reports);

/// CSV of all recorded violations, columns check,v1,v2,b,x,y,lhs,rhs.
std::string violations_csv(const std::vector<StructureReport>& reports);

}  // namespace aoi
