#include "vodcache/proactive_gebb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>


namespace vodcache {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check(double l, double b, const VideoLibrary& lib) {
    if (!(l >= 0.0) || l > lib.length_mbit()) throw DomainError("cached prefix must lie in [0, L]");
    if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("bandwidth must be finite and non-negative");
}

}  // namespace

FiniteWait wait_finite_n(double l, double b, int n, const VideoLibrary& lib, const SystemParams& params) {
    check(l, b, lib);
    if (n < 1) throw DomainError("GEBB needs at least one subchannel");
    const double L = lib.length_mbit();
    const double r = lib.bitrate_mbps();
    if (l == L) return {0.0, 0.0};
    if (b == 0.0) return {kInf, kInf};
    const double growth = std::expm1(double(n) * std::log1p(params.efficiency * b / (double(n) * r)));
    const double w = (L - l) / r / growth;
    return {w, std::max(w - l / r, 0.0)};
}

double wait_full(double l, double b, const VideoLibrary& lib, const SystemParams& params) {
    check(l, b, lib);
    const double L = lib.length_mbit();
    const double r = lib.bitrate_mbps();
    if (l == L) return 0.0;
    if (b == 0.0) return kInf;
    const double e1 = std::expm1(params.efficiency * b / r);
    return std::max((L - l) / (r * e1) - l / r, 0.0);
}

bool over_provisioned(double l, double b, const VideoLibrary& lib, const SystemParams& params) {
    check(l, b, lib);
    const double x = params.efficiency * b / lib.bitrate_mbps();
    return l > 0.0 && x > std::log(lib.length_mbit() / l);
}

double wait_random_endpoints(double l, double b, const VideoLibrary& lib, const SystemParams& params) {
    const double d = wait_full(l, b, lib, params);
    if (d == 0.0) return 0.0;
    return (lib.length_mbit() - l) / lib.length_mbit() * d;
}

double wait_download(double l, double b, const VideoLibrary& lib, const SystemParams& params) {
    check(l, b, lib);
    const double L = lib.length_mbit();
    if (l == L) return 0.0;
    if (b == 0.0) return kInf;
    return (L - l) / (params.efficiency * b);
}

double proactive_wait(double l, double b, const AccessPattern& pattern, const VideoLibrary& lib,
                      const SystemParams& params) {
    if (std::holds_alternative<FullAccess>(pattern)) return wait_full(l, b, lib, params);
    if (std::holds_alternative<RandomEndpoints>(pattern)) return wait_random_endpoints(l, b, lib, params);
    if (std::holds_alternative<DownloadingDemand>(pattern)) return wait_download(l, b, lib, params);
    throw InvalidArgument("the proactive system does not support the fixed-size pattern");
}

double GebbSchedule::period_s(std::size_t k) const {
    double p = wait_s;
    for (std::size_t j = 0; j < k; ++j) p += durations_s[j];
    return p;
}

GebbSchedule build_schedule(double l, double b, int n, const VideoLibrary& lib, const SystemParams& params) {
    check(l, b, lib);
    if (n < 1) throw DomainError("GEBB needs at least one subchannel");
    if (!(b > 0.0)) throw DomainError("schedule needs positive bandwidth");
    if (!(l < lib.length_mbit())) throw DomainError("fully cached video has no carousel");
    const double r = lib.bitrate_mbps();

    GebbSchedule s;
    s.n = n;
    s.bandwidth_mhz = b;
    s.subchannel_mhz = b / n;
    s.cached_mbit = l;
    s.wait_s = wait_finite_n(l, b, n, lib, params).wait_s;
    const double g = s.subchannel_mhz * params.efficiency / r;
    double elapsed = s.wait_s;
    s.durations_s.reserve(std::size_t(n));
    for (int k = 0; k < n; ++k) {
        const double d = elapsed * g;
        s.durations_s.push_back(d);
        s.lengths_mbit.push_back(r * d);
        elapsed += d;
    }
    return s;
}

StallReport validate_schedule(const GebbSchedule& sched, std::size_t phase_samples, const VideoLibrary& lib,
                              const SystemParams& params, std::optional<double> client_wait_s) {
    const double r = lib.bitrate_mbps();
    const std::size_t n = sched.durations_s.size();
    const double g = sched.subchannel_mhz * params.efficiency / r;  // playback time per loop second
    const double wait = client_wait_s.value_or(sched.wait_s);
    const double start = std::max(wait, sched.cached_mbit / r);

    std::vector<double> period(n), due(n);
    double prefix = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        period[k] = sched.wait_s + prefix;  // carousel property, independent of the client
        due[k] = start + prefix;
        prefix += sched.durations_s[k];
    }

    std::vector<double> phases;
    const double span = n ? period[n - 1] + sched.durations_s[n - 1] : 0.0;
    for (std::size_t m = 0; m < phase_samples; ++m)
        phases.push_back((double(m) + 0.5) / double(phase_samples) * span);
    for (std::size_t k = 0; k < n; ++k) phases.push_back(period[k] * (1.0 + 1e-10));

    StallReport rep;
    rep.phases_checked = phases.size();
    for (const double tau : phases) {
        for (std::size_t k = 0; k < n; ++k) {
            // Byte at loop offset u (seconds into the loop) reaches the client
            // at tau + ((u - tau) mod P) and plays at tau + due + g u. The
            // latest byte relative to its playout is the one sent just before
            // the client arrived, or at the loop start.
            const double P = period[k];
            double phi = std::fmod(tau, P);
            if (phi <= 0.0) phi = P;
            const double slack = due[k] - P + std::min(1.0, g) * phi;
            if (slack < -1e-9 * P) {
                ++rep.stall_count;
                rep.worst_shortfall_s = std::max(rep.worst_shortfall_s, -slack);
                if (rep.stalls.size() < 16) rep.stalls.push_back({tau, k, -slack});
            }
        }
    }
    return rep;
}

double min_stall_free_wait(const GebbSchedule& sched, std::size_t phase_samples, const VideoLibrary& lib,
                           const SystemParams& params) {
    auto stalls = [&](double w) {
        return double(validate_schedule(sched, phase_samples, lib, params, w).stall_count);
    };
    double hi = std::max(sched.wait_s, 1e-12);
    while (stalls(hi) > 0.0) hi *= 2.0;
    if (stalls(0.0) == 0.0) return 0.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (stalls(mid) > 0.0 ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace vodcache
