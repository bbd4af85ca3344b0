// ccqlab: batch front-end for the cq-channel resolvability and wiretap
// simulation campaigns. Each subcommand reads a JSON experiment config,
// writes CSV/JSON artifacts plus a run manifest to the output directory, and
// exits 0 (all checks pass), 1 (a theorem-bound assertion failed) or 2
// (configuration or runtime error).

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccq/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ccq wiretap / resolvability simulation lab"};
    app.set_version_flag("--version", ccq::experiment::tool_version());
    app.require_subcommand(1);

    const std::vector<std::string> kinds{"info",      "resolve", "wiretap",
                                         "advantage", "lemmas",  "sweep"};
    struct Args {
        std::string config;
        std::uint64_t seed = 0;
        std::string out;
        std::size_t trials = 0;
        unsigned threads = 0;
    };
    std::vector<Args> args(kinds.size());

    for (std::size_t k = 0; k < kinds.size(); ++k) {
        CLI::App* sub = app.add_subcommand(kinds[k], kinds[k] + " campaign");
        sub->add_option("--config", args[k].config, "experiment config JSON path")->required();
        sub->add_option("--seed", args[k].seed, "master seed override");
        sub->add_option("--out", args[k].out, "output directory override");
        sub->add_option("--trials", args[k].trials, "trial count override");
        sub->add_option("--threads", args[k].threads, "worker thread count override");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // --help is 0; bad arguments follow the config-error status
    }

    for (std::size_t k = 0; k < kinds.size(); ++k) {
        CLI::App* sub = app.get_subcommand(kinds[k]);
        if (!sub->parsed()) continue;
        ccq::experiment::Overrides overrides;
        if (sub->count("--seed") > 0) overrides.seed = args[k].seed;
        if (sub->count("--out") > 0) overrides.out_dir = args[k].out;
        if (sub->count("--trials") > 0) overrides.trials = args[k].trials;
        if (sub->count("--threads") > 0) overrides.threads = args[k].threads;
        return ccq::experiment::run_file(kinds[k], args[k].config, overrides, std::cerr);
    }
    return 2;
}
