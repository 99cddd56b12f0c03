#pragma once

// Scenario files: flat `key = value` lines, `#` starts a comment. Units are
// part of the key names (L_mbit, r_mbps, ...). Numbers may be written as a
// fraction, e.g. `lambda_per_s = 1/60`.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vodcache/model.hpp"

namespace vodcache {

class ConfigError : public InvalidArgument {
public:
    ConfigError(const std::string& what, std::size_t line, std::string field)
        : InvalidArgument(what), line_(line), field_(std::move(field)) {}
    std::size_t line() const { return line_; }  ///< 0 when not tied to a line
    const std::string& field() const { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

struct ScenarioConfig {
    std::string scenario_id = "scenario";
    std::string system = "reactive";  ///< reactive | proactive
    std::string pattern = "full";
    std::size_t M = 200;
    double alpha = 0.8;
    double L_mbit = 1200.0;
    double r_mbps = 2.0;
    double fB = 4.0;
    double C_mbit = 24000.0;
    std::optional<double> B_mhz;
    double lambda_per_s = 0.5;
    double D_s = 0.0;

    double horizon_s = 2e5;
    std::uint64_t seed = 1;
    double chunk_mbit = 2.0;
    int n_subchannels = 64;
    bool simulate = false;  ///< also run the simulator where a verb supports it

    std::string sweep_variable;
    std::vector<double> sweep_values;
    std::vector<std::string> schemes;

    // validate-schedule
    std::size_t schedule_video = 1;  ///< 1-based, plan from the P-optimal allocation
    std::optional<double> schedule_l_mbit;
    std::optional<double> schedule_b_mhz;
    std::size_t phase_samples = 1000;

    /// Input lines exactly as read (without the line terminator).
    std::vector<std::string> raw_lines;

    VideoLibrary library() const;
    SystemParams params() const;
    AccessPattern access_pattern() const;

    /// Range checks across fields; throws ConfigError.
    void validate() const;
};

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Sets one numeric field by its config key (used by sweeps).
void set_numeric_field(ScenarioConfig& cfg, std::string_view key, double value);

/// Keys accepted by set_numeric_field.
const std::vector<std::string>& numeric_fields();

}  // namespace vodcache
