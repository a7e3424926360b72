#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "aoi/cli.hpp"

namespace {

struct Cli {
    std::string command;
    std::string config_path;
    std::string p, q1, q2;  // kept textual so sweep can take comma lists
    aoi::Overrides overrides;
    std::string N, alpha, tol, max_iter, horizon, seed, out_dir;
    bool trace = false;
};

void add_common_options(CLI::App* sub, Cli& cli) {
    sub->add_option("--config", cli.config_path, "key=value config file");
    sub->add_option("--p", cli.p, "arrival probability (comma list for sweep)");
    sub->add_option("--q1", cli.q1, "first-attempt success probability (comma list for sweep)");
    sub->add_option("--q2", cli.q2, "re-attempt success probability (comma list for sweep)");
    sub->add_option("--N", cli.N, "age cap of the truncated state space");
    sub->add_option("--alpha", cli.alpha, "discount factor used by verify");
    sub->add_option("--tol", cli.tol, "solver stopping tolerance");
    sub->add_option("--max-iter", cli.max_iter, "solver sweep limit");
    sub->add_option("--seed", cli.seed, "simulation seed");
    sub->add_option("--horizon", cli.horizon, "simulation slots");
    sub->add_option("--out", cli.out_dir, "output directory");
}

std::optional<std::string> opt(const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Average-age-optimal scheduling of re-transmissions and fresh updates"};
    app.require_subcommand(1);
    Cli cli;
    for (const char* name : {"solve", "verify", "simulate", "oracle", "sweep", "compare"}) {
        CLI::App* sub = app.add_subcommand(name, "");
        add_common_options(sub, cli);
        if (std::string(name) == "simulate")
            sub->add_flag("--trace", cli.trace, "write a per-slot trace.csv");
        sub->callback([&cli, name]() { cli.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? aoi::kExitOk : aoi::kExitInvalidInput;
    }

    try {
        std::string text;
        if (!cli.config_path.empty()) {
            std::ifstream in(cli.config_path, std::ios::binary);
            if (!in) {
                std::cerr << "cannot read config file " << cli.config_path << '\n';
                return aoi::kExitInvalidInput;
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            text = buf.str();
        }

        aoi::CommandFlags flags;
        flags.trace = cli.trace;
        aoi::Overrides& o = cli.overrides;
        if (cli.command == "sweep") {
            // Grid lists go through CommandFlags; scalars would lose the commas.
            flags.p_list = opt(cli.p);
            flags.q1_list = opt(cli.q1);
            flags.q2_list = opt(cli.q2);
        } else {
            o.p = opt(cli.p);
            o.q1 = opt(cli.q1);
            o.q2 = opt(cli.q2);
        }
        o.N = opt(cli.N);
        o.alpha = opt(cli.alpha);
        o.tol = opt(cli.tol);
        o.max_iter = opt(cli.max_iter);
        o.horizon = opt(cli.horizon);
        o.seed = opt(cli.seed);
        o.out_dir = opt(cli.out_dir);

        const aoi::RunConfig config = aoi::merge_overrides(aoi::parse_config(text), o);
        return aoi::run_command(cli.command, config, flags);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return aoi::kExitInvalidInput;
    }
}
