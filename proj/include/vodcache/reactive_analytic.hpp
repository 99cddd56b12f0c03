#pragma once

// Long-run average bandwidth (MHz) that one video consumes under CCE-MP,
// batching and unicast, for a given cached prefix and request rate.

#include "vodcache/model.hpp"

namespace vodcache {

struct PerVideoInputs {
    double cached_mbit;  ///< l_i
    double rate;         ///< lambda_i, requests per second
    const VideoLibrary& lib;
    const SystemParams& params;
};

/// Per-video inputs for video `i` under cache allocation `alloc`.
PerVideoInputs video_inputs(const VideoLibrary& lib, const SystemParams& params,
                            const CacheAllocation& alloc, std::size_t i);

/// CCE-MP, full access: (r/f_B) ln((L-l)/(l + r/lambda) + 1).
double bw_full(const PerVideoInputs& in);

/// Batching with window l/r: (r/f_B)(L-l)/(l + r/lambda).
double bw_batch(const PerVideoInputs& in);

/// CCE-MP with uniformly distributed endpoints (closed form of the integral
/// of 1/(L/((L-x)lambda) + x/r) over [l, L], divided by f_B).
double bw_random_endpoints(const PerVideoInputs& in);

/// Mean gap between transmissions of any chunk under fixed-size interval
/// access of D seconds.
double mean_interval_fixed_size(double rate, double duration_s, const VideoLibrary& lib);

/// (L - l) / (f_B E[T]).
double bw_fixed_size(const PerVideoInputs& in, double duration_s);

/// One transmission per request: full access or random endpoints only.
double bw_unicast(const PerVideoInputs& in, const AccessPattern& pattern);

/// lambda -> infinity limit, (r/f_B) ln(L/l). This is also the proactive
/// zero-delay bandwidth for a prefix of l.
double bw_high_rate_limit(double cached_mbit, const VideoLibrary& lib, const SystemParams& params);

/// Dispatch on pattern (full, random-endpoints, fixed-size).
double bw_ccemp(const PerVideoInputs& in, const AccessPattern& pattern);

/// Sum of bw_ccemp over the catalog.
double total_bw_ccemp(const VideoLibrary& lib, const SystemParams& params,
                      const CacheAllocation& alloc, const AccessPattern& pattern);

}  // namespace vodcache
