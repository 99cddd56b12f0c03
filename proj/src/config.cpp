#include "vodcache/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace vodcache {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto num = to_double(s.substr(0, slash));
        const auto den = to_double(s.substr(slash + 1));
        if (!num || !den || *den == 0.0) return std::nullopt;
        return *num / *den;
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    while (true) {
        const auto comma = s.find(',');
        const auto item = trim(s.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

double need_number(std::string_view value, std::size_t line, const std::string& key) {
    const auto v = to_double(value);
    if (!v) throw ConfigError("'" + key + "' expects a number, got '" + std::string(value) + "'", line, key);
    return *v;
}

std::uint64_t need_count(std::string_view value, std::size_t line, const std::string& key) {
    const double v = need_number(value, line, key);
    if (v < 0.0 || v != std::floor(v) || v > 9.0e15)
        throw ConfigError("'" + key + "' expects a non-negative integer", line, key);
    return std::uint64_t(v);
}

bool need_bool(std::string_view value, std::size_t line, const std::string& key) {
    const auto v = trim(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("'" + key + "' expects true or false", line, key);
}

void assign(ScenarioConfig& cfg, const std::string& key, std::string_view value, std::size_t line) {
    if (key == "scenario_id") cfg.scenario_id = std::string(trim(value));
    else if (key == "system") cfg.system = std::string(trim(value));
    else if (key == "pattern") cfg.pattern = std::string(trim(value));
    else if (key == "M") cfg.M = std::size_t(need_count(value, line, key));
    else if (key == "seed") cfg.seed = need_count(value, line, key);
    else if (key == "n_subchannels") cfg.n_subchannels = int(std::min<std::uint64_t>(need_count(value, line, key), 1u << 30));
    else if (key == "simulate") cfg.simulate = need_bool(value, line, key);
    else if (key == "sweep_variable") cfg.sweep_variable = std::string(trim(value));
    else if (key == "sweep_values") {
        cfg.sweep_values.clear();
        for (const auto& item : split_list(value)) cfg.sweep_values.push_back(need_number(item, line, key));
    } else if (key == "schemes") cfg.schemes = split_list(value);
    else if (key == "schedule_video") cfg.schedule_video = std::size_t(need_count(value, line, key));
    else if (key == "schedule_l_mbit") cfg.schedule_l_mbit = need_number(value, line, key);
    else if (key == "schedule_b_mhz") cfg.schedule_b_mhz = need_number(value, line, key);
    else if (key == "phase_samples") cfg.phase_samples = std::size_t(need_count(value, line, key));
    else {
        const auto& numeric = numeric_fields();
        if (std::find(numeric.begin(), numeric.end(), key) == numeric.end())
            throw ConfigError("unknown key '" + key + "'", line, key);
        set_numeric_field(cfg, key, need_number(value, line, key));
    }
}

}  // namespace

const std::vector<std::string>& numeric_fields() {
    static const std::vector<std::string> keys = {"M",  "alpha",        "L_mbit", "r_mbps",    "fB",
                                                  "C_mbit", "B_mhz",   "lambda_per_s", "D_s", "horizon_s",
                                                  "chunk_mbit", "n_subchannels"};
    return keys;
}

void set_numeric_field(ScenarioConfig& cfg, std::string_view key, double v) {
    auto count = [&](const char* name) {
        if (v < 0.0 || v != std::floor(v)) throw ConfigError(std::string(name) + " must be an integer", 0, name);
        return v;
    };
    if (key == "M") cfg.M = std::size_t(count("M"));
    else if (key == "alpha") cfg.alpha = v;
    else if (key == "L_mbit") cfg.L_mbit = v;
    else if (key == "r_mbps") cfg.r_mbps = v;
    else if (key == "fB") cfg.fB = v;
    else if (key == "C_mbit") cfg.C_mbit = v;
    else if (key == "B_mhz") cfg.B_mhz = v;
    else if (key == "lambda_per_s") cfg.lambda_per_s = v;
    else if (key == "D_s") cfg.D_s = v;
    else if (key == "horizon_s") cfg.horizon_s = v;
    else if (key == "chunk_mbit") cfg.chunk_mbit = v;
    else if (key == "n_subchannels") cfg.n_subchannels = int(count("n_subchannels"));
    else throw ConfigError("'" + std::string(key) + "' is not a numeric field", 0, std::string(key));
}

ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig cfg;
    std::map<std::string, std::size_t> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        cfg.raw_lines.emplace_back(raw);

        std::string_view body = raw.substr(0, raw.find('#'));
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected 'key = value'", line_no, std::string(body));
        const std::string key(trim(body.substr(0, eq)));
        if (key.empty()) throw ConfigError("missing key before '='", line_no, "");
        if (!seen.emplace(key, line_no).second) throw ConfigError("duplicate key '" + key + "'", line_no, key);
        assign(cfg, key, body.substr(eq + 1), line_no);
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        // Point range errors at the line that set the field.
        const auto it = seen.find(e.field());
        if (e.line() == 0 && it != seen.end()) throw ConfigError(e.what(), it->second, e.field());
        throw;
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'", 0, "");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& what, const std::string& field) { throw ConfigError(what, 0, field); };
    if (system != "reactive" && system != "proactive") fail("system must be reactive or proactive", "system");
    if (M < 1) fail("M must be at least 1 (empty catalog)", "M");
    if (!(alpha >= 0.0)) fail("alpha must be non-negative", "alpha");
    if (!(L_mbit > 0.0)) fail("L_mbit must be positive", "L_mbit");
    if (!(r_mbps > 0.0)) fail("r_mbps must be positive", "r_mbps");
    if (!(fB > 0.0)) fail("fB must be positive", "fB");
    if (!(C_mbit >= 0.0) || !(C_mbit < double(M) * L_mbit)) fail("C_mbit must satisfy 0 <= C < M*L", "C_mbit");
    if (!(lambda_per_s >= 0.0)) fail("lambda_per_s must be non-negative", "lambda_per_s");
    if (B_mhz && !(*B_mhz > 0.0)) fail("B_mhz must be positive", "B_mhz");
    if (system == "proactive" && !B_mhz) fail("proactive scenarios need B_mhz", "B_mhz");
    if (!(horizon_s > 0.0)) fail("horizon_s must be positive", "horizon_s");
    if (!(chunk_mbit > 0.0) || chunk_mbit > L_mbit) fail("chunk_mbit must lie in (0, L_mbit]", "chunk_mbit");
    if (n_subchannels < 1) fail("n_subchannels must be at least 1", "n_subchannels");
    try {
        access_pattern();
    } catch (const InvalidArgument& e) {
        fail(e.what(), pattern == "fixed-size" ? "D_s" : "pattern");
    }
    if (!sweep_variable.empty()) {
        const auto& keys = numeric_fields();
        if (std::find(keys.begin(), keys.end(), sweep_variable) == keys.end())
            fail("sweep_variable must name a numeric field", "sweep_variable");
        if (sweep_values.empty()) fail("sweep_values is empty", "sweep_values");
    }
    if (schedule_video < 1 || schedule_video > M) fail("schedule_video must lie in 1..M", "schedule_video");
}

VideoLibrary ScenarioConfig::library() const {
    return VideoLibrary(zipf_popularity(M, alpha), L_mbit, r_mbps);
}

SystemParams ScenarioConfig::params() const {
    SystemParams p;
    p.efficiency = fB;
    p.request_rate = lambda_per_s;
    p.cache_mbit = C_mbit;
    p.bandwidth_mhz = B_mhz;
    return p;
}

AccessPattern ScenarioConfig::access_pattern() const { return parse_pattern(pattern, D_s); }

}  // namespace vodcache
