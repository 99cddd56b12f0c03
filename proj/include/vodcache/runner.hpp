#pragma once

// Experiment verbs behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vodcache/config.hpp"
#include "vodcache/model.hpp"

namespace vodcache {

struct RunOptions {
    std::string verb;  ///< allocate, simulate, proactive, sweep, compare, validate-schedule
    std::filesystem::path config;
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;  ///< overrides the config's seed
    unsigned jobs = 1;
    bool json = false;
};

/// Scheme names accepted by `compare` and `sweep`.
const std::vector<std::string>& known_schemes();

struct SchemeResult {
    std::string scheme;
    std::string system;
    std::string metric;  ///< total_mhz or avg_wait_s
    double value = 0.0;
    std::optional<double> simulated;  ///< simulated MHz when the config asks for it
    CacheAllocation cache;
    std::optional<BandwidthAllocation> bandwidth;
};

/// Evaluates one scheme on a scenario; `seed` feeds the simulator.
SchemeResult evaluate_scheme(const ScenarioConfig& cfg, const std::string& scheme, std::uint64_t seed);

/// Runs a verb and writes its files. Returns the process exit status; errors
/// are reported as one JSON object on `err`.
int run(const RunOptions& options, std::ostream& err);

}  // namespace vodcache
