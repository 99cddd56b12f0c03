#include "vodcache/reactive_analytic.hpp"

#include <cmath>
#include <numbers>

#include "vodcache/numerics.hpp"

namespace vodcache {

namespace {

// Returns true when the video contributes no traffic at all.
bool check_inputs(const PerVideoInputs& in) {
    const double L = in.lib.length_mbit();
    if (!(in.cached_mbit >= 0.0) || in.cached_mbit > L)
        throw DomainError("cached prefix must lie in [0, L]");
    if (!(in.rate >= 0.0) || !std::isfinite(in.rate))
        throw DomainError("request rate must be finite and non-negative");
    return in.rate == 0.0 || in.cached_mbit == L;
}

}  // namespace

PerVideoInputs video_inputs(const VideoLibrary& lib, const SystemParams& params,
                            const CacheAllocation& alloc, std::size_t i) {
    return {alloc.mbit.at(i), params.video_rate(lib, i), lib, params};
}

double bw_full(const PerVideoInputs& in) {
    if (check_inputs(in)) return 0.0;
    const double L = in.lib.length_mbit();
    const double r = in.lib.bitrate_mbps();
    const double l = in.cached_mbit;
    return r / in.params.efficiency * std::log1p((L - l) / (l + r / in.rate));
}

double bw_batch(const PerVideoInputs& in) {
    if (check_inputs(in)) return 0.0;
    const double L = in.lib.length_mbit();
    const double r = in.lib.bitrate_mbps();
    const double l = in.cached_mbit;
    return r / in.params.efficiency * (L - l) / (l + r / in.rate);
}

double bw_random_endpoints(const PerVideoInputs& in) {
    if (check_inputs(in)) return 0.0;
    const double L = in.lib.length_mbit();
    const double r = in.lib.bitrate_mbps();
    const double fB = in.params.efficiency;
    const double l = in.cached_mbit;
    const double a = L * r / in.rate;
    const double eta = std::sqrt(a + 0.25 * L * L);
    // eta - L/2 loses every digit when lambda is large; use the conjugate.
    const double eta_minus = a / (eta + 0.5 * L);
    const double coef_plus = r / (2.0 * fB) + L * r / (4.0 * eta * fB);
    const double coef_minus = r / (2.0 * fB) - L * r / (4.0 * eta * fB);
    const double arg1 = l + eta_minus;        // l + eta - L/2
    const double arg2 = eta + 0.5 * L - l;    // >= eta - L/2 > 0
    if (!(arg1 > 0.0) || !(arg2 > 0.0)) throw DomainError("random-endpoints log argument not positive");
    const double v = coef_plus * std::log((0.5 * L + eta) / arg1) +
                     coef_minus * std::log(eta_minus / arg2);
    return std::max(v, 0.0);
}

double mean_interval_fixed_size(double rate, double duration_s, const VideoLibrary& lib) {
    if (!(rate > 0.0)) throw DomainError("fixed-size mean interval needs lambda_i > 0");
    if (!(duration_s > 0.0)) throw DomainError("fixed-size interval D must be positive");
    const double L = lib.length_mbit();
    const double r = lib.bitrate_mbps();
    const double D = duration_s;
    const double head = std::sqrt(std::numbers::pi * L / (2.0 * r * rate)) *
                        numerics::erf_approx(D * std::sqrt(r * rate / (2.0 * L)));
    const double tail = L / (D * r * rate) * std::exp(-D * D * r * rate / (2.0 * L));
    return head + tail;
}

double bw_fixed_size(const PerVideoInputs& in, double duration_s) {
    if (check_inputs(in)) return 0.0;
    const double L = in.lib.length_mbit();
    return (L - in.cached_mbit) /
           (in.params.efficiency * mean_interval_fixed_size(in.rate, duration_s, in.lib));
}

double bw_unicast(const PerVideoInputs& in, const AccessPattern& pattern) {
    const bool idle = check_inputs(in);
    const double L = in.lib.length_mbit();
    const double u = L - in.cached_mbit;
    if (std::holds_alternative<FullAccess>(pattern))
        return idle ? 0.0 : in.rate * u / in.params.efficiency;
    if (std::holds_alternative<RandomEndpoints>(pattern))
        return idle ? 0.0 : u * u * in.rate / (2.0 * L * in.params.efficiency);
    throw InvalidArgument("unicast bandwidth defined for full and random-endpoints access only");
}

double bw_high_rate_limit(double cached_mbit, const VideoLibrary& lib, const SystemParams& params) {
    const double L = lib.length_mbit();
    if (!(cached_mbit > 0.0)) throw DomainError("high-rate limit is unbounded for an uncached video");
    if (cached_mbit > L) throw DomainError("cached prefix exceeds video length");
    return lib.bitrate_mbps() / params.efficiency * std::log(L / cached_mbit);
}

double bw_ccemp(const PerVideoInputs& in, const AccessPattern& pattern) {
    if (std::holds_alternative<FullAccess>(pattern)) return bw_full(in);
    if (std::holds_alternative<RandomEndpoints>(pattern)) return bw_random_endpoints(in);
    if (const auto* fs = std::get_if<FixedSize>(&pattern)) return bw_fixed_size(in, fs->duration_s);
    throw InvalidArgument("reactive delivery is not defined for the downloading-demand pattern");
}

double total_bw_ccemp(const VideoLibrary& lib, const SystemParams& params,
                      const CacheAllocation& alloc, const AccessPattern& pattern) {
    if (alloc.mbit.size() != lib.size()) throw InvalidArgument("allocation length differs from M");
    double sum = 0.0;
    for (std::size_t i = 0; i < lib.size(); ++i) sum += bw_ccemp(video_inputs(lib, params, alloc, i), pattern);
    return sum;
}

}  // namespace vodcache
