#pragma once

// Joint cache and bandwidth allocation for the proactive (broadcast) system:
// minimize the popularity-weighted waiting time under both budgets.

#include <cstddef>
#include <string>
#include <vector>

#include "vodcache/model.hpp"

namespace vodcache::proactive {

struct ProactivePlan {
    std::string pattern;
    CacheAllocation cache;
    BandwidthAllocation bandwidth;
    std::vector<double> per_video_wait;  ///< seconds
    double avg_wait = 0.0;               ///< sum_i p_i d_i
    std::size_t zero_delay_count = 0;
};

/// Waits below this many seconds count as zero delay.
inline constexpr double kZeroDelayTol = 1e-9;

/// Fills waits, avg_wait and zero_delay_count from (cache, bandwidth).
ProactivePlan make_plan(const VideoLibrary& lib, const SystemParams& params, const AccessPattern& pattern,
                        CacheAllocation cache, BandwidthAllocation bandwidth);

/// Splits `budget_mhz` over `videos` so the weighted full-access waits have
/// equal marginal value: b_i = (r/f_B) ln(1 + (y + sqrt(y^2 + 4y))/2),
/// y = w_i beta (L - l_i). Each b_i is capped at the zero-delay bandwidth
/// (r/f_B) ln(L/l_i) unless `cap_zero_delay` is false. Entries outside
/// `videos` are 0.
std::vector<double> kkt_bandwidth(const std::vector<double>& weights, const CacheAllocation& cache,
                                  double budget_mhz, const std::vector<std::size_t>& videos,
                                  const VideoLibrary& lib, const SystemParams& params,
                                  bool cap_zero_delay = true);

/// Optimal bandwidth for a fixed cache under the given pattern.
BandwidthAllocation bandwidth_for_cache(const VideoLibrary& lib, const SystemParams& params,
                                        const AccessPattern& pattern, const CacheAllocation& cache);

/// Full access: one-dimensional search over the common prefix l_1 of the
/// zero-delay videos.
ProactivePlan alloc_full(const VideoLibrary& lib, const SystemParams& params);

/// Random endpoints: convex program in (x, l) with x_i = exp(-f_B b_i / r),
/// solved by a log-barrier interior-point method.
ProactivePlan alloc_random_endpoints(const VideoLibrary& lib, const SystemParams& params);

/// Downloading demand: Popular-Cache plus b_i proportional to sqrt(p_i (L - l_i)).
ProactivePlan alloc_download(const VideoLibrary& lib, const SystemParams& params);

/// Dispatch on pattern.
ProactivePlan optimize_proactive(const VideoLibrary& lib, const SystemParams& params,
                                 const AccessPattern& pattern);

/// Smallest B giving zero delay to every video: (M r / f_B) ln(M L / C).
double zero_delay_threshold(const VideoLibrary& lib, const SystemParams& params);

/// Lattice search with `divisions` steps on each of l_1 in [0, min(L, C)] and
/// b_1 in [0, B]; the second video takes whatever budget is left (waits are
/// non-increasing in both resources). M <= 2.
ProactivePlan brute_force_proactive(const VideoLibrary& lib, const SystemParams& params,
                                    const AccessPattern& pattern, int divisions);

}  // namespace vodcache::proactive
