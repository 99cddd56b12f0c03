#pragma once

// Cache allocation across the catalog for the reactive (CCE-MP) system.

#include "vodcache/model.hpp"

namespace vodcache::reactive {

struct WaterfillResult {
    CacheAllocation allocation;
    double beta = 0.0;      ///< water level, seconds (inverse marginal saving for batch/low-rate forms)
    double residual = 0.0;  ///< |sum l_i - C| when the budget binds, else 0
};

/// Full access: l_i = min((beta r - r/lambda_i)^+, L).
WaterfillResult waterfill_full(const VideoLibrary& lib, const SystemParams& params);

/// Uniform endpoints: l_i = min(((beta r + L)/2 - sqrt((beta r - L)^2/4 + L r/lambda_i))^+, L).
WaterfillResult alloc_random_endpoints(const VideoLibrary& lib, const SystemParams& params);

/// Optimal cache for the batching scheme: l_i = min((sqrt(beta (L + a_i)) - a_i)^+, L),
/// a_i = r/lambda_i.
WaterfillResult waterfill_batch(const VideoLibrary& lib, const SystemParams& params);

/// Whole videos in rank order, remainder to the next one.
CacheAllocation popular_cache(const VideoLibrary& lib, double cache_mbit);

/// C/M to every video.
CacheAllocation even_cache(const VideoLibrary& lib, double cache_mbit);

/// lambda -> 0 regime. Full access and fixed-size: popular_cache. Random
/// endpoints: l_i = (L - beta/lambda_i)^+.
CacheAllocation alloc_low_rate(const VideoLibrary& lib, const SystemParams& params,
                               const AccessPattern& pattern);

struct ReactiveOptimum {
    CacheAllocation allocation;
    double total_mhz = 0.0;
};

/// Optimal cache for the pattern plus its analytic CCE-MP bandwidth.
ReactiveOptimum optimize_reactive(const VideoLibrary& lib, const SystemParams& params,
                                  const AccessPattern& pattern);

/// Exhaustive search over the lattice {0, step, ..., L}^M (plus L itself)
/// under the cache budget. M <= 4.
ReactiveOptimum brute_force_cache(const VideoLibrary& lib, const SystemParams& params,
                                  const AccessPattern& pattern, double grid_step);

}  // namespace vodcache::reactive
