#include "aoi/cli.hpp"

#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "aoi/io.hpp"
#include "aoi/sim.hpp"
#include "aoi/structure.hpp"

namespace fs = std::filesystem;

namespace aoi {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view s, const std::string& what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError(what + ": invalid number '" + std::string(s) + "'");
    return value;
}

long long parse_ll(std::string_view s, const std::string& what) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError(what + ": invalid integer '" + std::string(s) + "'");
    return value;
}

std::uint64_t parse_u64(std::string_view s, const std::string& what) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError(what + ": invalid integer '" + std::string(s) + "'");
    return value;
}

std::vector<double> parse_list(std::string_view s, const std::string& what) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        const std::string_view item =
            trim(s.substr(start, comma == std::string_view::npos ? comma : comma - start));
        out.push_back(parse_double(item, what));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

Params RunConfig::params() const {
    if (!p) throw ConfigError("missing required key p");
    if (!q1) throw ConfigError("missing required key q1");
    if (!q2) throw ConfigError("missing required key q2");
    return Params(*p, *q1, *q2);
}

namespace {

/// Sets one config field from text, validating it; label prefixes error
/// messages ("line 3: p" or "--p"). Returns false for an unknown key.
bool set_field(RunConfig& cfg, const std::string& key, std::string_view value,
               const std::string& label) {
    if (key == "p") {
        cfg.p = parse_double(value, label);
        if (!(*cfg.p > 0.0) || !(*cfg.p <= 1.0))
            throw ConfigError(label + " must satisfy 0 < p <= 1");
    } else if (key == "q1") {
        cfg.q1 = parse_double(value, label);
        if (!(*cfg.q1 > 0.0) || !(*cfg.q1 <= 1.0))
            throw ConfigError(label + " must satisfy 0 < q1 <= 1");
    } else if (key == "q2") {
        cfg.q2 = parse_double(value, label);
        if (!(*cfg.q2 > 0.0) || !(*cfg.q2 <= 1.0))
            throw ConfigError(label + " must satisfy 0 < q2 <= 1");
    } else if (key == "N") {
        const long long n = parse_ll(value, label);
        if (n < 1) throw ConfigError(label + " must be >= 1");
        if (n > 100000) throw ConfigError(label + " is implausibly large");
        cfg.N = static_cast<int>(n);
    } else if (key == "alpha") {
        cfg.alpha = parse_double(value, label);
        if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0))
            throw ConfigError(label + " must satisfy 0 < alpha < 1");
    } else if (key == "tol") {
        cfg.tol = parse_double(value, label);
        if (!(cfg.tol > 0.0)) throw ConfigError(label + " must be > 0");
    } else if (key == "max_iter") {
        cfg.max_iter = parse_ll(value, label);
        if (cfg.max_iter < 1) throw ConfigError(label + " must be >= 1");
    } else if (key == "horizon") {
        cfg.horizon = parse_ll(value, label);
        if (cfg.horizon < 1) throw ConfigError(label + " must be >= 1");
    } else if (key == "seed") {
        cfg.seed = parse_u64(value, label);
    } else if (key == "out_dir") {
        if (value.empty()) throw ConfigError(label + " must not be empty");
        cfg.out_dir = std::string(value);
    } else {
        return false;
    }
    return true;
}

void check_cross_field(const RunConfig& cfg) {
    if (cfg.q1 && cfg.q2 && !(*cfg.q1 <= *cfg.q2))
        throw ConfigError("q1 must be <= q2 (q1=" + g12(*cfg.q1) + ", q2=" + g12(*cfg.q2) + ")");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::string where = "line " + std::to_string(line_no);
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(where + ": expected key=value, got '" + std::string(line) + "'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (!set_field(cfg, key, value, where + ": " + key))
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
    check_cross_field(cfg);
    return cfg;
}

RunConfig merge_overrides(RunConfig config, const Overrides& overrides) {
    const std::pair<const char*, const std::optional<std::string>*> fields[] = {
        {"p", &overrides.p},           {"q1", &overrides.q1},
        {"q2", &overrides.q2},         {"N", &overrides.N},
        {"alpha", &overrides.alpha},   {"tol", &overrides.tol},
        {"max_iter", &overrides.max_iter}, {"horizon", &overrides.horizon},
        {"seed", &overrides.seed},     {"out_dir", &overrides.out_dir},
    };
    for (const auto& [key, value] : fields)
        if (value->has_value()) set_field(config, key, **value, std::string("--") + key);
    check_cross_field(config);
    return config;
}

namespace {

void write_values_csv(const fs::path& path, const SolveResult& result) {
    std::ostringstream out;
    out << "v1,v2,b,value\n";
    const TruncatedSpace& space = *result.values.space;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const State& s = space.state(i);
        out << s.v1 << ',' << to_string(s.v2) << ',' << s.b << ',' << g12(result.values.v[i])
            << '\n';
    }
    atomic_write_file(path, out.str());
}

void write_policy_csv(const fs::path& path, const Policy& policy) {
    std::ostringstream out;
    out << "v1,v2,b,action\n";
    const TruncatedSpace& space = *policy.space;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const State& s = space.state(i);
        out << s.v1 << ',' << to_string(s.v2) << ',' << s.b << ','
            << static_cast<int>(policy.actions[i]) << '\n';
    }
    atomic_write_file(path, out.str());
}

Policy materialize(const TruncatedSpace& space, const PolicyRule& rule) {
    Policy policy{&space, {}};
    policy.actions.reserve(space.size());
    for (const State& s : space.states()) policy.actions.push_back(rule(s));
    return policy;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const Params params = cfg.params();
    const TruncatedSpace space(cfg.N);
    const SolveResult result = rvia(space, params, cfg.tol, cfg.max_iter);
    fs::create_directories(cfg.out_dir);
    write_values_csv(fs::path(cfg.out_dir) / "values.csv", result);
    write_policy_csv(fs::path(cfg.out_dir) / "policy.csv", result.policy);
    out << "gain " << g12(result.gain) << '\n'
        << "iterations " << result.iterations << '\n'
        << "residual " << g12(result.residual) << '\n';
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const Params params = cfg.params();
    const TruncatedSpace space(cfg.N);
    const SolveResult solved = rvia(space, params, cfg.tol, cfg.max_iter);
    const ValueTable discounted = discounted_vi(space, params, cfg.alpha, cfg.tol, cfg.max_iter);

    std::vector<StructureReport> reports;
    reports.push_back(check_monotonicity(discounted));
    reports.push_back(check_concavity(discounted));
    reports.push_back(check_difference_bounds(discounted, params));
    reports.push_back(check_preempt_switching(solved.policy));
    reports.push_back(check_retransmit_threshold(solved.policy, params));

    const std::string summary = summary_text(reports);
    fs::create_directories(cfg.out_dir);
    atomic_write_file(fs::path(cfg.out_dir) / "report.txt", summary);
    atomic_write_file(fs::path(cfg.out_dir) / "violations.csv", violations_csv(reports));
    out << summary;

    for (const auto& rep : reports)
        if (!rep.pass) return kExitCheckFailure;
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out) {
    const Params params = cfg.params();
    const TruncatedSpace space(cfg.N);
    const SolveResult solved = rvia(space, params, cfg.tol, cfg.max_iter);
    const PolicyRule rule = rule_from_policy(solved.policy, params);

    std::ostringstream trace;
    TraceSink sink;
    if (flags.trace) {
        trace << "slot,v1,v2,b,action\n";
        sink = [&trace](long long slot, const State& s, Action a) {
            trace << slot << ',' << s.v1 << ',' << to_string(s.v2) << ',' << s.b << ','
                  << static_cast<int>(a) << '\n';
        };
    }
    const TrajectoryStats stats = simulate(rule, params, cfg.horizon, cfg.seed, State{}, sink);

    std::ostringstream csv;
    csv << "p,q1,q2,policy_name,horizon,seed,avg_age,half_width_99\n"
        << g12(params.p) << ',' << g12(params.q1) << ',' << g12(params.q2) << ",optimal,"
        << stats.horizon << ',' << stats.seed << ',' << g12(stats.time_average_age) << ','
        << g12(stats.half_width_99) << '\n';
    fs::create_directories(cfg.out_dir);
    atomic_write_file(fs::path(cfg.out_dir) / "stats.csv", csv.str());
    if (flags.trace) atomic_write_file(fs::path(cfg.out_dir) / "trace.csv", trace.str());

    out << "avg_age " << g12(stats.time_average_age) << '\n'
        << "half_width_99 " << g12(stats.half_width_99) << '\n';
    return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Params params = cfg.params();
    if (cfg.N > 5) {
        err << "oracle requires N <= 5 (exhaustive policy search), got N=" << cfg.N << '\n';
        return kExitInvalidInput;
    }
    const TruncatedSpace space(cfg.N);
    const BruteForceResult oracle = brute_force_optimal(space, params);
    const SolveResult solved = rvia(space, params, cfg.tol, cfg.max_iter);
    out << "oracle_gain " << g12(oracle.gain) << '\n'
        << "rvia_gain " << g12(solved.gain) << '\n'
        << "difference " << g12(std::fabs(oracle.gain - solved.gain)) << '\n'
        << "policies_evaluated " << oracle.policies_evaluated << '\n';
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const CommandFlags& flags, std::ostream& out) {
    auto axis = [&](const std::optional<std::string>& list, const std::optional<double>& scalar,
                    const char* key) {
        if (list) return parse_list(*list, key);
        if (scalar) return std::vector<double>{*scalar};
        throw ConfigError(std::string("missing required key ") + key);
    };
    const std::vector<double> ps = axis(flags.p_list, cfg.p, "p");
    const std::vector<double> q1s = axis(flags.q1_list, cfg.q1, "q1");
    const std::vector<double> q2s = axis(flags.q2_list, cfg.q2, "q2");

    struct Point {
        Params params;
        double gain = 0.0;
        long long iterations = 0;
        double residual = 0.0;
    };
    std::vector<Point> points;
    for (double p : ps)
        for (double q1 : q1s)
            for (double q2 : q2s) {
                try {
                    points.push_back({Params(p, q1, q2)});
                } catch (const std::invalid_argument& e) {
                    throw ConfigError("sweep point (p=" + g12(p) + ", q1=" + g12(q1) +
                                      ", q2=" + g12(q2) + "): " + e.what());
                }
            }

    // Independent solves fan out to a worker pool; rows keep grid order.
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= points.size()) return;
            try {
                const TruncatedSpace space(cfg.N);
                const SolveResult r = rvia(space, points[i].params, cfg.tol, cfg.max_iter);
                points[i].gain = r.gain;
                points[i].iterations = r.iterations;
                points[i].residual = r.residual;
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    const std::size_t pool = std::min<std::size_t>(
        std::max(1u, std::thread::hardware_concurrency()), points.size());
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);

    std::ostringstream csv;
    csv << "p,q1,q2,N,gain,iterations,residual\n";
    for (const Point& pt : points) {
        csv << g12(pt.params.p) << ',' << g12(pt.params.q1) << ',' << g12(pt.params.q2) << ','
            << cfg.N << ',' << g12(pt.gain) << ',' << pt.iterations << ',' << g12(pt.residual)
            << '\n';
    }
    fs::create_directories(cfg.out_dir);
    atomic_write_file(fs::path(cfg.out_dir) / "sweep.csv", csv.str());
    out << "points " << points.size() << '\n';
    return kExitOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
    const Params params = cfg.params();
    const TruncatedSpace space(cfg.N);
    const SolveResult solved = rvia(space, params, cfg.tol, cfg.max_iter);
    const EvalResult optimal = evaluate_policy_exact(space, params, solved.policy);
    const EvalResult always = evaluate_policy_exact(
        space, params, materialize(space, make_baseline(BaselineKind::AlwaysPreempt)));
    const EvalResult never = evaluate_policy_exact(
        space, params, materialize(space, make_baseline(BaselineKind::NeverPreempt)));

    out << "optimal " << g12(optimal.gain) << '\n'
        << "always_preempt " << g12(always.gain) << '\n'
        << "never_preempt " << g12(never.gain) << '\n';
    if (params.q1 < params.q2) {
        const double theta = params.q2 / (params.q2 - params.q1);
        const EvalResult threshold = evaluate_policy_exact(
            space, params, materialize(space, make_baseline(BaselineKind::Threshold, theta)));
        out << "threshold " << g12(threshold.gain) << '\n';
    } else {
        out << "threshold n/a\n";
    }
    return kExitOk;
}

}  // namespace

int run_command(const std::string& name, const RunConfig& config, const CommandFlags& flags,
                std::ostream& out, std::ostream& err) {
    try {
        if (name == "solve") return cmd_solve(config, out);
        if (name == "verify") return cmd_verify(config, out);
        if (name == "simulate") return cmd_simulate(config, flags, out);
        if (name == "oracle") return cmd_oracle(config, out, err);
        if (name == "sweep") return cmd_sweep(config, flags, out);
        if (name == "compare") return cmd_compare(config, out);
        err << "unknown command '" << name << "'\n";
        return kExitInvalidInput;
    } catch (const ConvergenceError& e) {
        err << e.what() << '\n';
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitInvalidInput;
    }
}

}  // namespace aoi
