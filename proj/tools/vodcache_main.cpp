#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "vodcache/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Cache and bandwidth allocation for video-on-demand multicast"};
    app.require_subcommand(1);

    vodcache::RunOptions opt;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string format = "csv";

    const char* verbs[][2] = {
        {"allocate", "optimal allocation for the configured system and pattern"},
        {"simulate", "simulate CCE-MP on the optimal reactive allocation"},
        {"proactive", "joint cache and bandwidth plan for a proactive scenario"},
        {"sweep", "re-run a scheme for every value of sweep_variable"},
        {"compare", "evaluate the configured schemes side by side"},
        {"validate-schedule", "build a GEBB carousel and check it for stalls"},
    };
    for (const auto& v : verbs) {
        auto* sub = app.add_subcommand(v[0], v[1]);
        sub->add_option("--config", opt.config, "scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (default: $VODCACHE_OUT or ./out)");
        sub->add_option("--seed", seed, "overrides the config seed");
        sub->add_option("--jobs", opt.jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
        sub->add_option("--format", format, "csv, or json to also write JSON mirrors")
            ->check(CLI::IsMember({"csv", "json"}));
    }

    CLI11_PARSE(app, argc, argv);

    opt.verb = app.get_subcommands().front()->get_name();
    const auto* sub = app.get_subcommands().front();
    if (sub->count("--seed")) opt.seed = seed;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    else if (const char* env = std::getenv("VODCACHE_OUT"); env && *env) opt.out_dir = env;
    opt.json = format == "json";
    return vodcache::run(opt, std::cerr);
}
