#include "vodcache/reactive_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "vodcache/numerics.hpp"
#include "vodcache/reactive_analytic.hpp"

namespace vodcache::reactive {

namespace {

using Level = std::function<double(std::size_t, double)>;

// Removes bisection round-off above the budget from the interior entries, so
// fully cached videos stay at exactly L.
void shave_to_budget(CacheAllocation& alloc, double C, double L) {
    const double excess = alloc.total() - C;
    if (!(excess > 0.0)) return;
    double interior = 0.0;
    for (double v : alloc.mbit)
        if (v > 0.0 && v < L) interior += v;
    if (interior > excess) {
        const double scale = 1.0 - excess / interior;
        for (double& v : alloc.mbit)
            if (v > 0.0 && v < L) v *= scale;
    } else {
        for (double& v : alloc.mbit) v *= C / (C + excess);
    }
}

// Solves sum_i level(i, beta) = C for a non-decreasing level function.
// Videos without requests stay empty.
WaterfillResult fill(const VideoLibrary& lib, const SystemParams& params, const Level& level,
                     double beta_hi) {
    params.validate(lib);
    const std::size_t M = lib.size();
    const double L = lib.length_mbit();
    const double C = params.cache_mbit;

    WaterfillResult out;
    out.allocation.mbit.assign(M, 0.0);

    std::size_t active = 0;
    for (std::size_t i = 0; i < M; ++i) active += params.video_rate(lib, i) > 0.0;
    if (active == 0) return out;

    auto total = [&](double beta) {
        double s = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            if (params.video_rate(lib, i) > 0.0) s += level(i, beta);
        return s;
    };
    auto assign = [&](double beta) {
        for (std::size_t i = 0; i < M; ++i)
            out.allocation.mbit[i] = params.video_rate(lib, i) > 0.0 ? level(i, beta) : 0.0;
    };

    if (double(active) * L <= C) {
        for (std::size_t i = 0; i < M; ++i)
            out.allocation.mbit[i] = params.video_rate(lib, i) > 0.0 ? L : 0.0;
        out.beta = beta_hi;
        return out;
    }

    if (C == 0.0) {
        // Smallest level at which the most popular video starts filling.
        out.beta = numerics::bisect({[&](double b) { return level(0, b) > 0.0 ? 1.0 : 0.0; }, 0.0, beta_hi,
                                     1e-12, 200},
                                    0.5);
        return out;
    }

    out.beta = numerics::bisect({total, 0.0, beta_hi, 1e-15, 200}, C);
    assign(out.beta);
    shave_to_budget(out.allocation, C, L);
    out.residual = std::abs(out.allocation.total() - C);
    return out;
}

double max_rate(const VideoLibrary& lib, const SystemParams& params) {
    double m = 0.0;
    for (std::size_t i = 0; i < lib.size(); ++i) m = std::max(m, params.video_rate(lib, i));
    return m;
}

// beta bracket [0, max_i(L/r + 1/lambda_i)] over requested videos.
double level_bracket(const VideoLibrary& lib, const SystemParams& params) {
    double hi = 1.0;
    for (std::size_t i = 0; i < lib.size(); ++i) {
        const double lam = params.video_rate(lib, i);
        if (lam > 0.0) hi = std::max(hi, lib.duration_s() + 1.0 / lam);
    }
    return hi;
}

}  // namespace

WaterfillResult waterfill_full(const VideoLibrary& lib, const SystemParams& params) {
    const double L = lib.length_mbit();
    const double r = lib.bitrate_mbps();
    Level level = [&](std::size_t i, double beta) {
        const double lam = params.video_rate(lib, i);
        return std::clamp(beta * r - r / lam, 0.0, L);
    };
    return fill(lib, params, level, level_bracket(lib, params));
}

WaterfillResult alloc_random_endpoints(const VideoLibrary& lib, const SystemParams& params) {
    const double L = lib.length_mbit();
    const double r = lib.bitrate_mbps();
    Level level = [&](std::size_t i, double beta) {
        const double lam = params.video_rate(lib, i);
        if (beta <= 1.0 / lam) return 0.0;
        // (A - sqrt(A^2 - L r (beta - 1/lambda))) in conjugate form.
        const double A = 0.5 * (beta * r + L);
        const double root = std::sqrt(0.25 * (beta * r - L) * (beta * r - L) + L * r / lam);
        return std::clamp(L * r * (beta - 1.0 / lam) / (A + root), 0.0, L);
    };
    return fill(lib, params, level, level_bracket(lib, params));
}

WaterfillResult waterfill_batch(const VideoLibrary& lib, const SystemParams& params) {
    const double L = lib.length_mbit();
    const double r = lib.bitrate_mbps();
    Level level = [&](std::size_t i, double beta) {
        const double a = r / params.video_rate(lib, i);
        return std::clamp(std::sqrt(beta * (L + a)) - a, 0.0, L);
    };
    double hi = 1.0;
    for (std::size_t i = 0; i < lib.size(); ++i) {
        const double lam = params.video_rate(lib, i);
        if (lam > 0.0) {
            hi = std::max(hi, L + r / lam);  // sqrt(beta (L + a)) - a >= L
        }
    }
    return fill(lib, params, level, hi);
}

CacheAllocation popular_cache(const VideoLibrary& lib, double cache_mbit) {
    const double L = lib.length_mbit();
    if (!(cache_mbit >= 0.0) || !(cache_mbit < lib.total_mbit()))
        throw InvalidArgument("cache size must satisfy 0 <= C < M*L");
    CacheAllocation out;
    out.mbit.assign(lib.size(), 0.0);
    double left = cache_mbit;
    for (std::size_t i = 0; i < lib.size() && left > 0.0; ++i) {
        out.mbit[i] = std::min(L, left);
        left -= out.mbit[i];
    }
    return out;
}

CacheAllocation even_cache(const VideoLibrary& lib, double cache_mbit) {
    if (!(cache_mbit >= 0.0) || !(cache_mbit < lib.total_mbit()))
        throw InvalidArgument("cache size must satisfy 0 <= C < M*L");
    CacheAllocation out;
    out.mbit.assign(lib.size(), cache_mbit / double(lib.size()));
    return out;
}

CacheAllocation alloc_low_rate(const VideoLibrary& lib, const SystemParams& params,
                               const AccessPattern& pattern) {
    params.validate(lib);
    if (std::holds_alternative<FullAccess>(pattern) || std::holds_alternative<FixedSize>(pattern))
        return popular_cache(lib, params.cache_mbit);
    if (!std::holds_alternative<RandomEndpoints>(pattern))
        throw InvalidArgument("low-rate allocation is not defined for the downloading-demand pattern");

    const double L = lib.length_mbit();
    const std::size_t M = lib.size();
    CacheAllocation out;
    out.mbit.assign(M, 0.0);
    const double lam_max = max_rate(lib, params);
    if (params.cache_mbit == 0.0 || lam_max == 0.0) return out;

    auto level = [&](std::size_t i, double beta) {
        const double lam = params.video_rate(lib, i);
        return lam > 0.0 ? std::max(L - beta / lam, 0.0) : 0.0;
    };
    auto total = [&](double beta) {
        double s = 0.0;
        for (std::size_t i = 0; i < M; ++i) s += level(i, beta);
        return s;
    };
    if (total(0.0) <= params.cache_mbit) {
        for (std::size_t i = 0; i < M; ++i) out.mbit[i] = level(i, 0.0);
        return out;
    }
    const double beta = numerics::bisect({total, 0.0, L * lam_max, 1e-15, 200}, params.cache_mbit);
    for (std::size_t i = 0; i < M; ++i) out.mbit[i] = level(i, beta);
    shave_to_budget(out, params.cache_mbit, L);
    return out;
}

ReactiveOptimum optimize_reactive(const VideoLibrary& lib, const SystemParams& params,
                                  const AccessPattern& pattern) {
    validate_pattern(pattern);
    ReactiveOptimum out;
    if (std::holds_alternative<FullAccess>(pattern))
        out.allocation = waterfill_full(lib, params).allocation;
    else if (std::holds_alternative<RandomEndpoints>(pattern))
        out.allocation = alloc_random_endpoints(lib, params).allocation;
    else if (std::holds_alternative<FixedSize>(pattern)) {
        params.validate(lib);
        out.allocation = popular_cache(lib, params.cache_mbit);
    } else
        throw InvalidArgument("the reactive problem is not defined for the downloading-demand pattern");
    out.total_mhz = total_bw_ccemp(lib, params, out.allocation, pattern);
    return out;
}

ReactiveOptimum brute_force_cache(const VideoLibrary& lib, const SystemParams& params,
                                  const AccessPattern& pattern, double grid_step) {
    params.validate(lib);
    validate_pattern(pattern);
    const std::size_t M = lib.size();
    if (M > 4) throw InvalidArgument("brute_force_cache: M must be at most 4");
    const double L = lib.length_mbit();
    if (!(grid_step > 0.0) || grid_step > L) throw InvalidArgument("brute_force_cache: bad grid step");

    const int N = int(std::ceil(L / grid_step - 1e-9));
    auto value_at = [&](int k) { return k >= N ? L : grid_step * k; };
    const double C = params.cache_mbit;

    // Per-video objective tables over the lattice.
    std::vector<std::vector<double>> table(M, std::vector<double>(std::size_t(N) + 1));
    for (std::size_t i = 0; i < M; ++i)
        for (int k = 0; k <= N; ++k)
            table[i][std::size_t(k)] =
                bw_ccemp({value_at(k), params.video_rate(lib, i), lib, params}, pattern);

    auto fits = [&](double used) { return used <= C * (1.0 + 1e-12); };

    ReactiveOptimum best;
    best.total_mhz = numerics::kInfinity;
    std::vector<int> ks(M, 0);
    // Every bandwidth is non-increasing in l, so the last video takes the
    // largest lattice point the remaining budget allows.
    std::function<void(std::size_t, double, double)> walk = [&](std::size_t i, double used, double acc) {
        if (i + 1 == M) {
            int k = fits(used + L) ? N : std::min(N, int(std::floor((C - used) / grid_step)) + 1);
            while (k > 0 && !fits(used + value_at(k))) --k;
            const double v = acc + table[i][std::size_t(k)];
            if (v < best.total_mhz) {
                best.total_mhz = v;
                ks[i] = k;
                best.allocation.mbit.assign(M, 0.0);
                for (std::size_t j = 0; j < M; ++j) best.allocation.mbit[j] = value_at(ks[j]);
            }
            return;
        }
        for (int k = 0; k <= N && fits(used + value_at(k)); ++k) {
            ks[i] = k;
            walk(i + 1, used + value_at(k), acc + table[i][std::size_t(k)]);
        }
    };
    walk(0, 0.0, 0.0);
    return best;
}

}  // namespace vodcache::reactive
