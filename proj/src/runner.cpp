#include "vodcache/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "vodcache/numerics.hpp"
#include "vodcache/proactive_alloc.hpp"
#include "vodcache/proactive_gebb.hpp"
#include "vodcache/reactive_alloc.hpp"
#include "vodcache/reactive_analytic.hpp"
#include "vodcache/reactive_sim.hpp"
#include "vodcache/report_io.hpp"

namespace vodcache {

namespace {

std::string default_scheme(const ScenarioConfig& cfg) {
    return cfg.system == "proactive" ? "P-optimal" : "R-optimal";
}

Table summary_table(const ScenarioConfig& cfg, const std::string& verb) {
    Table t;
    t.kind = "summary";
    t.comments.push_back("verb " + verb);
    for (const auto& line : cfg.raw_lines) t.comments.push_back("config: " + line);
    t.columns = {"key", "value"};
    t.add({text("scenario_id"), text(cfg.scenario_id)});
    t.add({text("system"), text(cfg.system)});
    t.add({text("pattern"), text(cfg.pattern)});
    return t;
}

double per_video_reactive(const std::string& mechanism, const PerVideoInputs& in, const AccessPattern& pattern) {
    if (mechanism == "batch") return bw_batch(in);
    if (mechanism == "unicast") return bw_unicast(in, pattern);
    return bw_ccemp(in, pattern);
}

Table reactive_allocation_table(const VideoLibrary& lib, const SystemParams& params, const AccessPattern& pattern,
                                const CacheAllocation& cache, const std::string& mechanism) {
    Table t;
    t.kind = "allocation";
    t.comments.push_back("mechanism " + mechanism);
    t.columns = {"video", "p_i", "lambda_i", "l_mbit", "bw_mhz"};
    for (std::size_t i = 0; i < lib.size(); ++i) {
        const auto in = video_inputs(lib, params, cache, i);
        t.add({integer((long long)i + 1), exact(lib.popularity(i)), exact(in.rate), exact(cache.mbit[i]),
               metric(per_video_reactive(mechanism, in, pattern))});
    }
    return t;
}

std::string mechanism_of(const std::string& scheme) {
    if (scheme == "Batch") return "batch";
    if (scheme == "Unicast") return "unicast";
    if (scheme.rfind("P-", 0) == 0) return "gebb";
    return "ccemp";
}

SimReport simulate_scheme(const ScenarioConfig& cfg, const std::string& mechanism, const CacheAllocation& cache,
                          std::uint64_t seed) {
    const auto lib = cfg.library();
    const auto params = cfg.params();
    const auto pattern = cfg.access_pattern();
    if (mechanism == "batch") return simulate_batch(lib, cache, pattern, params, cfg.horizon_s, seed);
    if (mechanism == "unicast") return simulate_unicast(lib, cache, pattern, params, cfg.horizon_s, seed);
    return simulate_ccemp(lib, snap_to_chunks(lib, cache, cfg.chunk_mbit), pattern, params, cfg.horizon_s, seed,
                          cfg.chunk_mbit);
}

struct ErrorInfo {
    int status;
    std::string kind;
};

ErrorInfo classify(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return {2, "config"};
    if (dynamic_cast<const numerics::InfeasibleError*>(&e)) return {3, "infeasible"};
    if (dynamic_cast<const numerics::ConvergenceError*>(&e)) return {3, "convergence"};
    if (dynamic_cast<const InvalidArgument*>(&e)) return {2, "invalid-argument"};
    if (dynamic_cast<const Error*>(&e)) return {4, "model"};
    return {1, "runtime"};
}

}  // namespace

const std::vector<std::string>& known_schemes() {
    static const std::vector<std::string> names = {"R-optimal", "R-popularCache", "R-evenCache", "Batch",
                                                   "Unicast",   "P-optimal",      "P-popularCache",
                                                   "P-evenCache", "P-even",       "P-noStorage"};
    return names;
}

SchemeResult evaluate_scheme(const ScenarioConfig& cfg, const std::string& scheme, std::uint64_t seed) {
    const auto& names = known_schemes();
    if (std::find(names.begin(), names.end(), scheme) == names.end())
        throw ConfigError("unknown scheme '" + scheme + "'", 0, "schemes");
    const auto lib = cfg.library();
    auto params = cfg.params();
    params.validate(lib);
    const auto pattern = cfg.access_pattern();

    SchemeResult res;
    res.scheme = scheme;
    if (scheme.rfind("R-", 0) == 0 || scheme == "Batch" || scheme == "Unicast") {
        res.system = "reactive";
        res.metric = "total_mhz";
        const std::string mech = mechanism_of(scheme);
        if (scheme == "R-optimal")
            res.cache = reactive::optimize_reactive(lib, params, pattern).allocation;
        else if (scheme == "R-popularCache")
            res.cache = reactive::popular_cache(lib, params.cache_mbit);
        else if (scheme == "R-evenCache")
            res.cache = reactive::even_cache(lib, params.cache_mbit);
        else if (scheme == "Batch") {
            if (!std::holds_alternative<FullAccess>(pattern))
                throw InvalidArgument("Batch is defined for the full-access pattern only");
            res.cache = reactive::waterfill_batch(lib, params).allocation;
        } else
            res.cache = reactive::alloc_low_rate(lib, params, pattern);
        double total = 0.0;
        for (std::size_t i = 0; i < lib.size(); ++i)
            total += per_video_reactive(mech, video_inputs(lib, params, res.cache, i), pattern);
        res.value = total;
        if (cfg.simulate) res.simulated = simulate_scheme(cfg, mech, res.cache, seed).avg_mhz;
        return res;
    }

    res.system = "proactive";
    res.metric = "avg_wait_s";
    if (!params.bandwidth_mhz) throw ConfigError("proactive schemes need B_mhz", 0, "B_mhz");
    proactive::ProactivePlan plan;
    if (scheme == "P-optimal") {
        plan = proactive::optimize_proactive(lib, params, pattern);
    } else {
        CacheAllocation cache;
        if (scheme == "P-popularCache") cache = reactive::popular_cache(lib, params.cache_mbit);
        else if (scheme == "P-noStorage") cache.mbit.assign(lib.size(), 0.0);
        else cache = reactive::even_cache(lib, params.cache_mbit);
        BandwidthAllocation bw;
        if (scheme == "P-even") bw.mhz.assign(lib.size(), params.bandwidth() / double(lib.size()));
        else bw = proactive::bandwidth_for_cache(lib, params, pattern, cache);
        plan = proactive::make_plan(lib, params, pattern, std::move(cache), std::move(bw));
    }
    res.value = plan.avg_wait;
    res.cache = plan.cache;
    res.bandwidth = plan.bandwidth;
    return res;
}

namespace {

void run_allocate(const ScenarioConfig& cfg, const RunOptions& opt, std::uint64_t seed) {
    const auto lib = cfg.library();
    const auto params = cfg.params();
    const auto pattern = cfg.access_pattern();
    Table summary = summary_table(cfg, opt.verb);
    if (cfg.system == "proactive") {
        const auto plan = proactive::optimize_proactive(lib, params, pattern);
        save_table(opt.out_dir, "allocation", plan_table(lib, plan), opt.json);
        summary.add({text("B_mhz"), metric(params.bandwidth())});
        summary.add({text("avg_wait_s"), metric(plan.avg_wait)});
        summary.add({text("zero_delay_count"), integer((long long)plan.zero_delay_count)});
        summary.add({text("zero_delay_threshold_mhz"), metric(proactive::zero_delay_threshold(lib, params))});
        save_table(opt.out_dir, "summary", summary, opt.json);
        return;
    }
    const auto best = reactive::optimize_reactive(lib, params, pattern);
    save_table(opt.out_dir, "allocation", reactive_allocation_table(lib, params, pattern, best.allocation, "ccemp"),
               opt.json);
    summary.add({text("total_mhz"), metric(best.total_mhz)});
    // Both rate regimes, since "low" and "high" rates are not sharply defined.
    const auto low = reactive::alloc_low_rate(lib, params, pattern);
    summary.add({text("low_rate_allocation_mhz"), metric(total_bw_ccemp(lib, params, low, pattern))});
    summary.add({text("even_cache_mhz"),
                 metric(total_bw_ccemp(lib, params, reactive::even_cache(lib, params.cache_mbit), pattern))});
    if (cfg.simulate) {
        const auto rep = simulate_scheme(cfg, "ccemp", best.allocation, seed);
        summary.add({text("simulated_mhz"), metric(rep.avg_mhz)});
    }
    save_table(opt.out_dir, "summary", summary, opt.json);
}

void run_simulate(const ScenarioConfig& cfg, const RunOptions& opt, std::uint64_t seed) {
    if (cfg.system != "reactive") throw ConfigError("simulate needs system = reactive", 0, "system");
    const auto lib = cfg.library();
    const auto params = cfg.params();
    const auto pattern = cfg.access_pattern();
    const auto best = reactive::optimize_reactive(lib, params, pattern);
    const auto snapped = snap_to_chunks(lib, best.allocation, cfg.chunk_mbit);
    const auto rep = simulate_ccemp(lib, snapped, pattern, params, cfg.horizon_s, seed, cfg.chunk_mbit);
    const double analytic = total_bw_ccemp(lib, params, snapped, pattern);

    save_table(opt.out_dir, "allocation", reactive_allocation_table(lib, params, pattern, snapped, "ccemp"), opt.json);
    save_table(opt.out_dir, "simulation", sim_report_table(rep, cfg.scenario_id), opt.json);
    Table summary = summary_table(cfg, opt.verb);
    summary.add({text("seed"), integer((long long)seed)});
    summary.add({text("analytic_mhz"), metric(analytic)});
    summary.add({text("analytic_unsnapped_mhz"), metric(best.total_mhz)});
    summary.add({text("simulated_mhz"), metric(rep.avg_mhz)});
    summary.add({text("relative_error"), metric((rep.avg_mhz - analytic) / analytic)});
    summary.add({text("requests"), integer((long long)rep.request_count)});
    summary.add({text("transmissions"), integer((long long)rep.transmissions)});
    summary.add({text("warmup_s"), metric(rep.warmup_s)});
    summary.add({text("deadline_violations"), integer((long long)rep.deadline_violations)});
    save_table(opt.out_dir, "summary", summary, opt.json);
}

void run_compare(const ScenarioConfig& cfg, const RunOptions& opt, std::uint64_t seed) {
    std::vector<std::string> schemes = cfg.schemes;
    if (schemes.empty()) schemes.push_back(default_scheme(cfg));
    Table t;
    t.kind = "compare";
    t.columns = {"scheme", "system", "metric", "value", "simulated_mhz", "relative_to_first"};
    double first = 0.0;
    for (std::size_t k = 0; k < schemes.size(); ++k) {
        const auto res = evaluate_scheme(cfg, schemes[k], seed);
        if (k == 0) first = res.value;
        t.add({text(res.scheme), text(res.system), text(res.metric), metric(res.value),
               res.simulated ? metric(*res.simulated) : text(""),
               first != 0.0 ? metric(res.value / first) : text("")});
    }
    save_table(opt.out_dir, "compare", t, opt.json);
    Table summary = summary_table(cfg, opt.verb);
    summary.add({text("schemes"), integer((long long)schemes.size())});
    save_table(opt.out_dir, "summary", summary, opt.json);
}

void run_sweep(const ScenarioConfig& cfg, const RunOptions& opt, std::uint64_t seed) {
    if (cfg.sweep_variable.empty()) throw ConfigError("sweep needs sweep_variable and sweep_values", 0, "sweep_variable");
    std::vector<std::string> schemes = cfg.schemes;
    if (schemes.empty()) schemes.push_back(default_scheme(cfg));
    for (const auto& s : schemes) {
        const auto& names = known_schemes();
        if (std::find(names.begin(), names.end(), s) == names.end())
            throw ConfigError("unknown scheme '" + s + "'", 0, "schemes");
    }

    const std::size_t points = cfg.sweep_values.size();
    std::vector<std::vector<std::vector<Cell>>> rows(points);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points; i = next++) {
            const std::uint64_t point_seed = seed + i;
            for (const auto& scheme : schemes) {
                std::vector<Cell> row = {integer((long long)i), text(cfg.sweep_variable), exact(cfg.sweep_values[i]),
                                         integer((long long)point_seed), text(scheme)};
                try {
                    ScenarioConfig point = cfg;
                    set_numeric_field(point, cfg.sweep_variable, cfg.sweep_values[i]);
                    point.validate();
                    const auto res = evaluate_scheme(point, scheme, point_seed);
                    row.push_back(text("ok"));
                    row.push_back(text(res.metric));
                    row.push_back(metric(res.value));
                    row.push_back(res.simulated ? metric(*res.simulated) : text(""));
                    row.push_back(text(""));
                } catch (const std::exception& e) {
                    row.push_back(text("error"));
                    row.push_back(text(""));
                    row.push_back(text(""));
                    row.push_back(text(""));
                    row.push_back(text(e.what()));
                }
                rows[i].push_back(std::move(row));
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, unsigned(points)));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    Table t;
    t.kind = "sweep";
    t.columns = {"index", "variable", "value", "seed", "scheme", "status", "metric", "result", "simulated_mhz", "error"};
    std::size_t failed = 0;
    for (auto& point : rows)
        for (auto& row : point) {
            failed += row[5].text != "ok";
            t.add(std::move(row));
        }
    save_table(opt.out_dir, "sweep", t, opt.json);
    Table summary = summary_table(cfg, opt.verb);
    summary.add({text("points"), integer((long long)points)});
    summary.add({text("failed_rows"), integer((long long)failed)});
    save_table(opt.out_dir, "summary", summary, opt.json);
}

void run_proactive(const ScenarioConfig& cfg, const RunOptions& opt, std::uint64_t seed) {
    if (cfg.system != "proactive") throw ConfigError("proactive needs system = proactive", 0, "system");
    run_allocate(cfg, opt, seed);
}

void run_validate_schedule(const ScenarioConfig& cfg, const RunOptions& opt) {
    const auto lib = cfg.library();
    const auto params = cfg.params();
    double l = 0.0, b = 0.0;
    if (cfg.schedule_l_mbit || cfg.schedule_b_mhz) {
        if (!cfg.schedule_l_mbit || !cfg.schedule_b_mhz)
            throw ConfigError("give both schedule_l_mbit and schedule_b_mhz", 0, "schedule_b_mhz");
        l = *cfg.schedule_l_mbit;
        b = *cfg.schedule_b_mhz;
    } else {
        if (!params.bandwidth_mhz) throw ConfigError("validate-schedule needs B_mhz or explicit schedule_* keys", 0, "B_mhz");
        const auto plan = proactive::optimize_proactive(lib, params, cfg.access_pattern());
        l = plan.cache.mbit[cfg.schedule_video - 1];
        b = plan.bandwidth.mhz[cfg.schedule_video - 1];
    }
    const auto sched = build_schedule(l, b, cfg.n_subchannels, lib, params);
    const auto rep = validate_schedule(sched, cfg.phase_samples, lib, params);
    const double minimal = min_stall_free_wait(sched, cfg.phase_samples, lib, params);

    save_table(opt.out_dir, "schedule", schedule_table(sched), opt.json);
    Table summary = summary_table(cfg, opt.verb);
    summary.add({text("schedule_video"), integer((long long)cfg.schedule_video)});
    summary.add({text("l_mbit"), exact(l)});
    summary.add({text("b_mhz"), exact(b)});
    summary.add({text("n_subchannels"), integer(sched.n)});
    summary.add({text("declared_wait_s"), metric(sched.wait_s)});
    summary.add({text("client_delay_s"), metric(wait_finite_n(l, b, sched.n, lib, params).delay_s)});
    summary.add({text("limit_delay_s"), metric(wait_full(l, b, lib, params))});
    summary.add({text("min_stall_free_wait_s"), metric(minimal)});
    summary.add({text("phases_checked"), integer((long long)rep.phases_checked)});
    summary.add({text("stalls"), integer((long long)rep.stall_count)});
    save_table(opt.out_dir, "summary", summary, opt.json);
}

}  // namespace

int run(const RunOptions& opt, std::ostream& err) {
    try {
        const ScenarioConfig cfg = load_config(opt.config);
        const std::uint64_t seed = opt.seed.value_or(cfg.seed);
        if (opt.verb == "allocate") run_allocate(cfg, opt, seed);
        else if (opt.verb == "simulate") run_simulate(cfg, opt, seed);
        else if (opt.verb == "proactive") run_proactive(cfg, opt, seed);
        else if (opt.verb == "sweep") run_sweep(cfg, opt, seed);
        else if (opt.verb == "compare") run_compare(cfg, opt, seed);
        else if (opt.verb == "validate-schedule") run_validate_schedule(cfg, opt);
        else throw InvalidArgument("unknown verb '" + opt.verb + "'");
        return 0;
    } catch (const std::exception& e) {
        const auto info = classify(e);
        nlohmann::ordered_json rec;
        rec["status"] = "error";
        rec["kind"] = info.kind;
        rec["message"] = e.what();
        if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
            rec["line"] = ce->line();
            rec["field"] = ce->field();
        }
        if (const auto* ce = dynamic_cast<const numerics::ConvergenceError*>(&e)) rec["residual"] = ce->residual();
        err << rec.dump() << '\n';
        return info.status;
    }
}

}  // namespace vodcache
