#include "vodcache/reactive_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace vodcache {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class VideoStream {
public:
    VideoStream(std::uint64_t seed, std::size_t video, double rate)
        : rng_(splitmix64(seed ^ splitmix64(std::uint64_t(video) + 1))), rate_(rate) {}

    double uniform() { return double(rng_() >> 11) * 0x1.0p-53; }

    double next_gap() { return -std::log1p(-uniform()) / rate_; }

private:
    std::mt19937_64 rng_;
    double rate_;
};

// Requests of one video in time order; the payload is drawn right after the
// arrival time so streams do not depend on the pattern of other videos.
std::vector<RequestEvent> video_requests(const VideoLibrary& lib, const SystemParams& params,
                                         const AccessPattern& pattern, double horizon_s,
                                         std::uint64_t seed, std::size_t i) {
    std::vector<RequestEvent> out;
    const double rate = params.video_rate(lib, i);
    if (!(rate > 0.0)) return out;
    const bool has_payload = std::holds_alternative<RandomEndpoints>(pattern) ||
                             std::holds_alternative<FixedSize>(pattern);
    VideoStream stream(seed, i, rate);
    const double L = lib.length_mbit();
    out.reserve(std::size_t(rate * horizon_s * 1.1) + 16);
    double t = stream.next_gap();
    while (t < horizon_s) {
        RequestEvent ev{t, i, 0.0};
        if (has_payload) ev.payload = stream.uniform() * L;
        out.push_back(ev);
        t += stream.next_gap();
    }
    return out;
}

void check_common(const VideoLibrary& lib, const CacheAllocation& alloc, const AccessPattern& pattern,
                  const SystemParams& params, double horizon_s) {
    params.validate(lib);
    validate_pattern(pattern);
    if (!(horizon_s > 0.0) || !std::isfinite(horizon_s))
        throw InvalidArgument("simulation horizon must be positive");
    const auto report = validate_allocation(alloc, params, lib);
    if (!report.ok()) throw InvalidArgument("cache allocation is not valid for this scenario");
}

SimReport start_report(const VideoLibrary& lib, const SystemParams& params, const AccessPattern& pattern,
                       const char* mechanism, double horizon_s, std::uint64_t seed) {
    SimReport rep;
    rep.mechanism = mechanism;
    rep.pattern = pattern_name(pattern);
    rep.horizon_s = horizon_s;
    rep.warmup_s = warmup_period(lib, params, horizon_s);
    rep.seed = seed;
    rep.per_video_mhz.assign(lib.size(), 0.0);
    return rep;
}

void finish_report(SimReport& rep, const std::vector<double>& per_video_mbit, double efficiency) {
    const double scale = 1.0 / (efficiency * rep.window_s());
    rep.transmitted_mbit = 0.0;
    for (std::size_t i = 0; i < per_video_mbit.size(); ++i) {
        rep.per_video_mhz[i] = per_video_mbit[i] * scale;
        rep.transmitted_mbit += per_video_mbit[i];
    }
    rep.avg_mhz = rep.transmitted_mbit * scale;
}

// Measure of [a, b) that lies outside the cached prefix [0, l), for a
// cyclic interval starting at s of length len on a video of length L.
double uncached_cyclic(double s, double len, double l, double L) {
    len = std::min(len, L);
    auto outside = [&](double a, double b) { return std::max(0.0, b - std::max(a, l)); };
    const double end = s + len;
    if (end <= L) return outside(s, end);
    return outside(s, L) + outside(0.0, end - L);
}

}  // namespace

ChunkGrid ChunkGrid::make(const VideoLibrary& lib, const CacheAllocation& alloc, double chunk_mbit) {
    const double L = lib.length_mbit();
    if (!(chunk_mbit > 0.0) || chunk_mbit > L) throw InvalidArgument("chunk size must lie in (0, L]");
    if (alloc.mbit.size() != lib.size()) throw InvalidArgument("allocation length differs from M");
    ChunkGrid g;
    g.chunk_mbit = chunk_mbit;
    g.chunks_per_video = std::size_t(std::ceil(L / chunk_mbit - 1e-9));
    g.cached_chunks.resize(lib.size());
    for (std::size_t i = 0; i < lib.size(); ++i) {
        const double l = alloc.mbit[i];
        if (l >= L) {
            g.cached_chunks[i] = g.chunks_per_video;
            continue;
        }
        const double k = std::round(l / chunk_mbit);
        if (std::abs(k * chunk_mbit - l) > 1e-9 * std::max(chunk_mbit, l))
            throw InvalidArgument("cached prefix of video " + std::to_string(i + 1) +
                                  " is not aligned to the chunk grid");
        g.cached_chunks[i] = std::min(std::size_t(k), g.chunks_per_video);
    }
    return g;
}

CacheAllocation snap_to_chunks(const VideoLibrary& lib, const CacheAllocation& alloc, double chunk_mbit) {
    const double L = lib.length_mbit();
    if (!(chunk_mbit > 0.0)) throw InvalidArgument("chunk size must be positive");
    CacheAllocation out = alloc;
    for (double& l : out.mbit) {
        if (l >= L) continue;
        l = chunk_mbit * std::floor(l / chunk_mbit * (1.0 + 1e-12));
        l = std::min(l, L);
    }
    return out;
}

std::vector<RequestEvent> gen_requests(const VideoLibrary& lib, const SystemParams& params,
                                       const AccessPattern& pattern, double horizon_s,
                                       std::uint64_t seed) {
    params.validate(lib);
    if (!(horizon_s > 0.0)) throw InvalidArgument("horizon must be positive");
    std::vector<RequestEvent> all;
    for (std::size_t i = 0; i < lib.size(); ++i) {
        auto v = video_requests(lib, params, pattern, horizon_s, seed, i);
        all.insert(all.end(), v.begin(), v.end());
    }
    std::stable_sort(all.begin(), all.end(), [](const RequestEvent& a, const RequestEvent& b) {
        return a.time < b.time || (a.time == b.time && a.video < b.video);
    });
    return all;
}

double warmup_period(const VideoLibrary& lib, const SystemParams& params, double horizon_s) {
    double w = 0.0;
    for (std::size_t i = 0; i < lib.size(); ++i) {
        const double rate = params.video_rate(lib, i);
        if (rate > 0.0) w = std::max(w, lib.duration_s() + 1.0 / rate);
    }
    return std::min(w, 0.2 * horizon_s);
}

SimReport simulate_ccemp(const VideoLibrary& lib, const CacheAllocation& alloc,
                         const AccessPattern& pattern, const SystemParams& params, double horizon_s,
                         std::uint64_t seed, double chunk_mbit, std::optional<ChunkProbe> probe) {
    check_common(lib, alloc, pattern, params, horizon_s);
    if (std::holds_alternative<DownloadingDemand>(pattern))
        throw InvalidArgument("CCE-MP is not defined for the downloading-demand pattern");
    const ChunkGrid grid = ChunkGrid::make(lib, alloc, chunk_mbit);
    const double L = lib.length_mbit();
    const double r = lib.bitrate_mbps();
    const auto* fixed = std::get_if<FixedSize>(&pattern);
    const bool endpoints = std::holds_alternative<RandomEndpoints>(pattern);
    const double demand = fixed ? fixed->duration_s * r : L;

    SimReport rep = start_report(lib, params, pattern, "ccemp", horizon_s, seed);
    rep.chunk_mbit = chunk_mbit;
    const double from = rep.warmup_s;
    std::vector<double> sent(lib.size(), 0.0);

    const std::size_t K = grid.chunks_per_video;
    // Pending transmission of each chunk: its time (earliest deadline among
    // waiting clients) and the latest arrival it has to cover.
    std::vector<double> pending(K);
    std::vector<double> latest_arrival(K);

    double probe_last = -1.0, probe_gap_sum = 0.0;
    std::uint64_t probe_gaps = 0;

    for (std::size_t i = 0; i < lib.size(); ++i) {
        const auto requests = video_requests(lib, params, pattern, horizon_s, seed, i);
        rep.request_count += requests.size();
        const std::size_t first = grid.cached_chunks[i];
        if (first >= K) continue;
        std::fill(pending.begin(), pending.end(), kNever);
        std::fill(latest_arrival.begin(), latest_arrival.end(), -kNever);
        const bool probing = probe && probe->video == i;

        auto transmit = [&](std::size_t j) {
            const double at = pending[j];
            if (latest_arrival[j] > at) ++rep.deadline_violations;
            if (at >= from && at < horizon_s) {
                sent[i] += std::min(chunk_mbit, L - grid.chunk_start(j));
                ++rep.transmissions;
                if (probing && probe->chunk == j) {
                    if (probe_last >= 0.0) {
                        probe_gap_sum += at - probe_last;
                        ++probe_gaps;
                    }
                    probe_last = at;
                }
            }
            pending[j] = kNever;
            latest_arrival[j] = -kNever;
        };
        auto need = [&](std::size_t j, double t, double deadline) {
            if (pending[j] < t) transmit(j);
            // The pending transmission may only move earlier, never past a
            // deadline already promised.
            pending[j] = std::min(pending[j], deadline);
            latest_arrival[j] = std::max(latest_arrival[j], t);
        };

        for (const auto& ev : requests) {
            const double t = ev.time;
            if (fixed) {
                const double s = ev.payload;
                const std::size_t own = std::min(std::size_t(s / chunk_mbit), K - 1);
                for (std::size_t j = first; j < K; ++j) {
                    const double x = grid.chunk_start(j);
                    if (j == own) {
                        need(j, t, t);
                        continue;
                    }
                    double delta = x - s;
                    if (delta < 0.0) delta += L;
                    if (delta < demand) need(j, t, t + delta / r);
                }
            } else {
                const double stop = endpoints ? ev.payload : L;
                for (std::size_t j = first; j < K; ++j) {
                    const double x = grid.chunk_start(j);
                    if (x >= stop) break;
                    need(j, t, t + x / r);
                }
            }
        }
        for (std::size_t j = first; j < K; ++j)
            if (pending[j] < kNever) transmit(j);
    }
    if (probe) {
        if (probe_gaps > 0) rep.probe_mean_gap_s = probe_gap_sum / double(probe_gaps);
    }
    finish_report(rep, sent, params.efficiency);
    return rep;
}

SimReport simulate_batch(const VideoLibrary& lib, const CacheAllocation& alloc,
                         const AccessPattern& pattern, const SystemParams& params, double horizon_s,
                         std::uint64_t seed) {
    check_common(lib, alloc, pattern, params, horizon_s);
    if (!std::holds_alternative<FullAccess>(pattern))
        throw InvalidArgument("batching is simulated for the full-access pattern only");
    const double L = lib.length_mbit();
    const double r = lib.bitrate_mbps();
    SimReport rep = start_report(lib, params, pattern, "batch", horizon_s, seed);
    std::vector<double> sent(lib.size(), 0.0);

    for (std::size_t i = 0; i < lib.size(); ++i) {
        const auto requests = video_requests(lib, params, pattern, horizon_s, seed, i);
        rep.request_count += requests.size();
        const double l = alloc.mbit[i];
        if (l >= L) continue;
        double close = -kNever;
        auto flush = [&] {
            if (close >= rep.warmup_s && close < horizon_s) {
                sent[i] += L - l;
                ++rep.transmissions;
            }
        };
        for (const auto& ev : requests) {
            if (ev.time > close) {
                if (close > -kNever) flush();
                close = ev.time + l / r;
            }
        }
        if (close > -kNever) flush();
    }
    finish_report(rep, sent, params.efficiency);
    return rep;
}

SimReport simulate_unicast(const VideoLibrary& lib, const CacheAllocation& alloc,
                           const AccessPattern& pattern, const SystemParams& params,
                           double horizon_s, std::uint64_t seed) {
    check_common(lib, alloc, pattern, params, horizon_s);
    const double L = lib.length_mbit();
    const double r = lib.bitrate_mbps();
    const auto* fixed = std::get_if<FixedSize>(&pattern);
    const bool endpoints = std::holds_alternative<RandomEndpoints>(pattern);
    SimReport rep = start_report(lib, params, pattern, "unicast", horizon_s, seed);
    std::vector<double> sent(lib.size(), 0.0);

    for (std::size_t i = 0; i < lib.size(); ++i) {
        const auto requests = video_requests(lib, params, pattern, horizon_s, seed, i);
        rep.request_count += requests.size();
        const double l = alloc.mbit[i];
        for (const auto& ev : requests) {
            if (ev.time < rep.warmup_s) continue;
            double bits;
            if (fixed)
                bits = uncached_cyclic(ev.payload, fixed->duration_s * r, l, L);
            else if (endpoints)
                bits = std::max(ev.payload - l, 0.0);
            else
                bits = L - l;
            if (bits > 0.0) {
                sent[i] += bits;
                ++rep.transmissions;
            }
        }
    }
    finish_report(rep, sent, params.efficiency);
    return rep;
}

}  // namespace vodcache
