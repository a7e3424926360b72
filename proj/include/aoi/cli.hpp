#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <string_view>

#include "aoi/model.hpp"

namespace aoi {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// One run's settings. p, q1, q2 have no defaults; commands fail with a
/// ConfigError when they are still unset after config and flag merging.
struct RunConfig {
    std::optional<double> p;
    std::optional<double> q1;
    std::optional<double> q2;
    int N = 200;
    double alpha = 0.95;
    double tol = 1e-9;
    long long max_iter = 1000000;
    long long horizon = 1000000;
    std::uint64_t seed = 1;
    std::string out_dir = ".";

    /// Throws ConfigError if p, q1 or q2 is unset; otherwise validates them.
    Params params() const;
};

/// Line-oriented key=value parser. '#' starts a comment, blank lines are
/// skipped, whitespace around keys and values is trimmed, later duplicates
/// win. Unknown keys, malformed lines and invariant violations raise
/// ConfigError naming the line and key. Keys: p, q1, q2, N, alpha, tol,
/// max_iter, horizon, seed, out_dir.
RunConfig parse_config(std::string_view text);

/// Command-line overrides, still in textual form; an engaged field replaces
/// the config value after passing the same validation, with errors naming the
/// flag.
struct Overrides {
    std::optional<std::string> p, q1, q2, N, alpha, tol, max_iter, horizon, seed, out_dir;
};

RunConfig merge_overrides(RunConfig config, const Overrides& overrides);

/// Flags that are not plain RunConfig overrides.
struct CommandFlags {
    // sweep only: comma-separated grid lists; an absent list falls back to
    // the scalar config value as a single point.
    std::optional<std::string> p_list;
    std::optional<std::string> q1_list;
    std::optional<std::string> q2_list;
    // simulate only: write a per-slot trace.csv next to stats.csv.
    bool trace = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 1;
inline constexpr int kExitCheckFailure = 2;
inline constexpr int kExitNoConvergence = 3;

/// Runs one subcommand (solve, verify, simulate, oracle, sweep, compare)
/// against a merged config. Output files land in config.out_dir, written
/// atomically; identical inputs produce byte-identical files. Returns the
/// process exit code: 0 ok, 1 invalid input, 2 structure check failure,
/// 3 solver non-convergence.
int run_command(const std::string& name, const RunConfig& config, const CommandFlags& flags = {},
                std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace aoi
