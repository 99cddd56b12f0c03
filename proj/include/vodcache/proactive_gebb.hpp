#pragma once

// Per-video proactive delivery: GEBB waiting times and explicit segment
// carousels.
//
// A GebbSchedule splits the uncached part of a video into n segments, each
// looped on its own subchannel of b/n MHz. Segment k loops with period
// P_k = w + D_1 + ... + D_{k-1}, which is exactly when a client that waited w
// needs it.

#include <cstddef>
#include <optional>
#include <vector>

#include "vodcache/model.hpp"

namespace vodcache {

struct FiniteWait {
    double wait_s;   ///< GEBB wait w before the uncached part can start
    double delay_s;  ///< what the client sees: max(w - l/r, 0)
};

/// w = ((L-l)/r) / ((1 + f_B b/(n r))^n - 1). +inf when b = 0 and l < L.
FiniteWait wait_finite_n(double cached_mbit, double bandwidth_mhz, int n, const VideoLibrary& lib,
                         const SystemParams& params);

/// n -> infinity limit: (L - e^x l) / (r (e^x - 1)), x = f_B b / r, floored at 0.
double wait_full(double cached_mbit, double bandwidth_mhz, const VideoLibrary& lib,
                 const SystemParams& params);

/// True when e^x l > L, i.e. the bandwidth exceeds what zero delay needs.
bool over_provisioned(double cached_mbit, double bandwidth_mhz, const VideoLibrary& lib,
                      const SystemParams& params);

/// Mean delay with uniform endpoints: ((L - l)/L) * wait_full.
double wait_random_endpoints(double cached_mbit, double bandwidth_mhz, const VideoLibrary& lib,
                             const SystemParams& params);

/// Carousel download time (L - l)/(f_B b).
double wait_download(double cached_mbit, double bandwidth_mhz, const VideoLibrary& lib,
                     const SystemParams& params);

/// Dispatch on access pattern (fixed-size is not a proactive pattern).
double proactive_wait(double cached_mbit, double bandwidth_mhz, const AccessPattern& pattern,
                      const VideoLibrary& lib, const SystemParams& params);

struct GebbSchedule {
    int n = 0;
    double bandwidth_mhz = 0.0;
    double subchannel_mhz = 0.0;
    std::vector<double> durations_s;   ///< D_k
    std::vector<double> lengths_mbit;  ///< S_k = r D_k
    double wait_s = 0.0;
    double cached_mbit = 0.0;

    /// Loop period of segment k (0-based): w + sum_{j<k} D_j.
    double period_s(std::size_t k) const;
};

/// Needs n >= 1, b > 0 and l < L.
GebbSchedule build_schedule(double cached_mbit, double bandwidth_mhz, int n, const VideoLibrary& lib,
                            const SystemParams& params);

struct Stall {
    double phase_s;
    std::size_t segment;  ///< 0-based
    double shortfall_s;   ///< how late the worst byte of the segment arrives
};

struct StallReport {
    std::size_t phases_checked = 0;
    std::size_t stall_count = 0;
    std::vector<Stall> stalls;  ///< first few, for diagnostics
    double worst_shortfall_s = 0.0;

    bool ok() const { return stall_count == 0; }
};

/// Replays client arrivals at sampled phases: stratified over the longest
/// loop period plus one phase just after every segment's loop boundary. The
/// client waits `client_wait_s` (default: the schedule's w), plays its cached
/// prefix, then needs segment k from max(wait, l/r) + sum_{j<k} D_j on.
StallReport validate_schedule(const GebbSchedule& sched, std::size_t phase_samples,
                              const VideoLibrary& lib, const SystemParams& params,
                              std::optional<double> client_wait_s = std::nullopt);

/// Smallest client wait that the validator accepts, by bisection with the
/// carousel held fixed.
double min_stall_free_wait(const GebbSchedule& sched, std::size_t phase_samples,
                           const VideoLibrary& lib, const SystemParams& params);

}  // namespace vodcache
