#include "aoi/structure.hpp"

#include <limits>
#include <sstream>

#include "aoi/io.hpp"

namespace aoi {

namespace {

constexpr double kUnsetRow = -std::numeric_limits<double>::infinity();

/// Accumulates one report; violations beyond kMaxViolations are counted but
/// not stored.
class Recorder {
  public:
    Recorder(std::string name, double tol, int rows) {
        rep_.check = std::move(name);
        rep_.tolerance = tol;
        row_worst_.assign(static_cast<std::size_t>(rows) + 1, kUnsetRow);
    }

    template <typename Fill>
    void count(double violation, int row, Fill fill) {
        ++rep_.tuples_checked;
        worst_ = std::max(worst_, violation);
        auto& rw = row_worst_[static_cast<std::size_t>(row)];
        rw = std::max(rw, violation);
        if (violation > rep_.tolerance &&
            rep_.violations.size() < static_cast<std::size_t>(StructureReport::kMaxViolations)) {
            Violation v;
            v.check = rep_.check;
            fill(v);
            rep_.violations.push_back(std::move(v));
        }
    }

    template <typename Fill>
    void count_named(const char* sub, double violation, int row, Fill fill) {
        count(violation, row, [&](Violation& v) {
            fill(v);
            v.check = sub;
        });
    }

    StructureReport finish() {
        rep_.worst_violation = rep_.tuples_checked == 0 ? 0.0 : worst_;
        rep_.pass = rep_.worst_violation <= rep_.tolerance;
        for (std::size_t r = 0; r < row_worst_.size(); ++r)
            if (row_worst_[r] != kUnsetRow) rep_.worst_by_row[static_cast<int>(r)] = row_worst_[r];
        return std::move(rep_);
    }

  private:
    StructureReport rep_;
    double worst_ = -std::numeric_limits<double>::infinity();
    std::vector<double> row_worst_;
};

StructureReport not_applicable(std::string name, double tol) {
    StructureReport rep;
    rep.check = std::move(name);
    rep.applicable = false;
    rep.pass = true;
    rep.tolerance = tol;
    return rep;
}

/// Values reshaped to direct (v1, v2, b) lookup.
class ValueGrid {
  public:
    explicit ValueGrid(const ValueTable& values) : cap_(values.space->cap()) {
        const std::size_t side = static_cast<std::size_t>(cap_) + 1;
        fin_.assign(2 * side * side, 0.0);
        inf_.assign(2 * side, 0.0);
        const TruncatedSpace& space = *values.space;
        for (std::size_t i = 0; i < space.size(); ++i) {
            const State& s = space.state(i);
            if (s.v2.is_inf())
                inf_[slot(s.v1, s.b)] = values.v[i];
            else
                fin_[slot(s.v1, s.b) * side + static_cast<std::size_t>(s.v2.value())] = values.v[i];
        }
    }

    int cap() const { return cap_; }
    double fin(int v1, int v2, int b) const {
        const std::size_t side = static_cast<std::size_t>(cap_) + 1;
        return fin_[slot(v1, b) * side + static_cast<std::size_t>(v2)];
    }
    double inf(int v1, int b) const { return inf_[slot(v1, b)]; }

  private:
    std::size_t slot(int v1, int b) const {
        return static_cast<std::size_t>(b) * (static_cast<std::size_t>(cap_) + 1) +
               static_cast<std::size_t>(v1);
    }
    int cap_;
    std::vector<double> fin_;
    std::vector<double> inf_;
};

/// Actions at the free states (v1, v2 finite, b = 1) as a direct lookup.
class DecisionGrid {
  public:
    explicit DecisionGrid(const Policy& policy) : cap_(policy.space->cap()) {
        const std::size_t side = static_cast<std::size_t>(cap_) + 1;
        act_.assign(side * side, -1);
        const TruncatedSpace& space = *policy.space;
        for (std::size_t i = 0; i < space.size(); ++i) {
            const State& s = space.state(i);
            if (!s.v2.is_inf() && s.b == 1)
                act_[static_cast<std::size_t>(s.v1) * side + static_cast<std::size_t>(s.v2.value())] =
                    static_cast<int>(policy.actions[i]);
        }
    }

    int cap() const { return cap_; }
    int at(int v1, int v2) const {
        return act_[static_cast<std::size_t>(v1) * (static_cast<std::size_t>(cap_) + 1) +
                    static_cast<std::size_t>(v2)];
    }

  private:
    int cap_;
    std::vector<int> act_;
};

void require_table(const ValueTable& values) {
    if (values.space == nullptr || values.v.size() != values.space->size())
        throw std::invalid_argument("value table does not match its space");
}

void require_policy(const Policy& policy) {
    if (policy.space == nullptr || policy.actions.size() != policy.space->size())
        throw std::invalid_argument("policy does not match its space");
}

}  // namespace

StructureReport check_monotonicity(const ValueTable& values, double tol) {
    require_table(values);
    const ValueGrid grid(values);
    const int cap = grid.cap();
    Recorder rec("monotonicity", tol, cap);
    for (int v1 = 1; v1 <= cap; ++v1) {
        for (int v2 = 1; v2 <= v1; ++v2) {
            for (int b = 0; b <= 1; ++b) {
                const double base = grid.fin(v1, v2, b);
                for (int v1h = v1; v1h <= cap; ++v1h) {
                    for (int v2h = v2; v2h <= v1h; ++v2h) {
                        rec.count(base - grid.fin(v1h, v2h, b), v1h, [&](Violation& out) {
                            out.v1 = v1;
                            out.v2 = QueueAge::finite(v2);
                            out.b = b;
                            out.x = v1h - v1;
                            out.y = v2h - v2;
                            out.lhs = grid.fin(v1h, v2h, b);
                            out.rhs = base;
                        });
                    }
                }
            }
        }
        for (int b = 0; b <= 1; ++b) {
            const double base = grid.inf(v1, b);
            for (int v1h = v1; v1h <= cap; ++v1h) {
                rec.count(base - grid.inf(v1h, b), v1h, [&](Violation& out) {
                    out.v1 = v1;
                    out.v2 = QueueAge::inf();
                    out.b = b;
                    out.x = v1h - v1;
                    out.y = 0;
                    out.lhs = grid.inf(v1h, b);
                    out.rhs = base;
                });
            }
        }
    }
    return rec.finish();
}

StructureReport check_preempt_switching(const Policy& policy, double tol) {
    require_policy(policy);
    const DecisionGrid grid(policy);
    const int cap = grid.cap();
    const int preempt = static_cast<int>(Action::TransmitNew);
    Recorder rec("preempt_switching", tol, cap);
    for (int v1 = 1; v1 <= cap; ++v1) {
        for (int v2 = 1; v2 <= v1; ++v2) {
            const bool premise = grid.at(v1, v2) == preempt;
            for (int x = 0; x <= v1 - v2; ++x) {
                const int found = grid.at(v1, v2 + x);
                const double violation = premise && found != preempt ? 1.0 : 0.0;
                rec.count(violation, v1, [&](Violation& out) {
                    out.v1 = v1;
                    out.v2 = QueueAge::finite(v2);
                    out.b = 1;
                    out.x = x;
                    out.y = 0;
                    out.lhs = found;
                    out.rhs = preempt;
                });
            }
        }
    }
    return rec.finish();
}

StructureReport check_concavity(const ValueTable& values, double tol) {
    require_table(values);
    const ValueGrid grid(values);
    const int cap = grid.cap();
    Recorder rec("concavity", tol, cap);
    for (int v2 = 1; v2 <= cap; ++v2) {
        for (int b = 0; b <= 1; ++b) {
            for (int v1 = v2 + 1; v1 + 1 <= cap; ++v1) {
                const double ahead = grid.fin(v1 + 1, v2, b) - grid.fin(v1, v2, b);
                const double behind = grid.fin(v1, v2, b) - grid.fin(v1 - 1, v2, b);
                rec.count(ahead - behind, v1 + 1, [&](Violation& out) {
                    out.v1 = v1;
                    out.v2 = QueueAge::finite(v2);
                    out.b = b;
                    out.lhs = ahead;
                    out.rhs = behind;
                });
            }
        }
    }
    return rec.finish();
}

StructureReport check_difference_bounds(const ValueTable& values, const Params& params,
                                        double tol) {
    require_table(values);
    if (params.q2 >= 1.0) return not_applicable("difference_bounds", tol);
    const double ratio = (1.0 - params.q1) / (1.0 - params.q2);
    const ValueGrid grid(values);
    const int cap = grid.cap();
    Recorder rec("difference_bounds", tol, cap);
    std::vector<double> diff(static_cast<std::size_t>(cap) + 1);
    for (int b = 0; b <= 1; ++b) {
        for (int v1 = 1; v1 < cap; ++v1) {
            for (int y = 1; v1 + y <= cap; ++y) {
                for (int w = 1; w <= v1; ++w)
                    diff[static_cast<std::size_t>(w)] = grid.fin(v1 + y, w, b) - grid.fin(v1, w, b);
                for (int v2 = 1; v2 <= v1; ++v2) {
                    const double low = diff[static_cast<std::size_t>(v2)];
                    for (int w2 = v2; w2 <= v1; ++w2) {
                        const double high = diff[static_cast<std::size_t>(w2)];
                        rec.count_named("difference_bounds_order", low - high, v1 + y,
                                        [&](Violation& out) {
                                            out.v1 = v1;
                                            out.v2 = QueueAge::finite(v2);
                                            out.b = b;
                                            out.x = w2;
                                            out.y = y;
                                            out.lhs = low;
                                            out.rhs = high;
                                        });
                        rec.count_named("difference_bounds_ratio", high - ratio * low, v1 + y,
                                        [&](Violation& out) {
                                            out.v1 = v1;
                                            out.v2 = QueueAge::finite(v2);
                                            out.b = b;
                                            out.x = w2;
                                            out.y = y;
                                            out.lhs = high;
                                            out.rhs = ratio * low;
                                        });
                    }
                }
            }
        }
    }
    return rec.finish();
}

StructureReport check_retransmit_threshold(const Policy& policy, const Params& params,
                                           double tol) {
    require_policy(policy);
    if (params.q1 == params.q2) return not_applicable("retransmit_threshold", tol);
    const DecisionGrid grid(policy);
    const int cap = grid.cap();
    const int retransmit = static_cast<int>(Action::Retransmit);
    Recorder rec("retransmit_threshold", tol, cap);
    for (int v2 = 1; v2 <= cap; ++v2) {
        const double threshold = retransmit_threshold(params, v2);
        for (int v1 = v2; v1 <= cap; ++v1) {
            if (static_cast<double>(v1) < threshold) continue;
            const bool premise = grid.at(v1, v2) == retransmit;
            for (int x = 0; v1 + x <= cap; ++x) {
                const int found = grid.at(v1 + x, v2);
                const double violation = premise && found != retransmit ? 1.0 : 0.0;
                rec.count(violation, v1 + x, [&](Violation& out) {
                    out.v1 = v1;
                    out.v2 = QueueAge::finite(v2);
                    out.b = 1;
                    out.x = x;
                    out.y = 0;
                    out.lhs = found;
                    out.rhs = retransmit;
                });
            }
        }
    }
    return rec.finish();
}

std::string summary_text(const std::vector<StructureReport>& reports) {
    std::ostringstream out;
    for (const auto& rep : reports) {
        out << "check=" << rep.check << " applicable=" << (rep.applicable ? 1 : 0)
            << " pass=" << (rep.pass ? 1 : 0) << " tuples=" << rep.tuples_checked
            << " worst=" << g12(rep.worst_violation) << " tol=" << g12(rep.tolerance) << '\n';
        for (const auto& [row, worst] : rep.worst_by_row)
            out << "row check=" << rep.check << " v1=" << row << " worst=" << g12(worst) << '\n';
    }
    return out.str();
}

std::string violations_csv(const std::vector<StructureReport>& reports) {
    std::ostringstream out;
    out << "check,v1,v2,b,x,y,lhs,rhs\n";
    for (const auto& rep : reports) {
        for (const auto& v : rep.violations) {
            out << v.check << ',' << v.v1 << ',' << to_string(v.v2) << ',' << v.b << ',' << v.x
                << ',' << v.y << ',' << g12(v.lhs) << ',' << g12(v.rhs) << '\n';
        }
    }
    return out.str();
}

}  // namespace aoi
