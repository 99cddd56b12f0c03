#pragma once

// Seeded simulation of reactive delivery (CCE-MP, batching, unicast).
//
// Each video gets its own Poisson stream, and each chunk of a video is
// independent under CCE-MP, so the engine walks requests video by video and
// keeps one pending transmission per chunk instead of a global event queue.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vodcache/model.hpp"

namespace vodcache {

inline constexpr const char* kPrngName = "mt19937_64+splitmix64";

struct ChunkGrid {
    double chunk_mbit = 0.0;
    std::size_t chunks_per_video = 0;        ///< ceil(L / chunk)
    std::vector<std::size_t> cached_chunks;  ///< prefix length in chunks, per video

    /// Throws InvalidArgument when a cached prefix is not a whole number of
    /// chunks (l_i = L always counts as aligned).
    static ChunkGrid make(const VideoLibrary& lib, const CacheAllocation& alloc, double chunk_mbit);

    double chunk_start(std::size_t j) const { return chunk_mbit * double(j); }
};

/// Rounds every l_i down to a chunk boundary (l_i = L is kept).
CacheAllocation snap_to_chunks(const VideoLibrary& lib, const CacheAllocation& alloc, double chunk_mbit);

struct RequestEvent {
    double time = 0.0;
    std::size_t video = 0;
    double payload = 0.0;  ///< endpoint (random endpoints) or start offset (fixed-size), Mbit
};

struct SimReport {
    std::string mechanism;  ///< ccemp, batch or unicast
    std::string pattern;
    double avg_mhz = 0.0;   ///< transmitted / (f_B * measured window)
    std::vector<double> per_video_mhz;
    std::uint64_t request_count = 0;
    double transmitted_mbit = 0.0;  ///< inside the measured window
    double horizon_s = 0.0;
    double warmup_s = 0.0;          ///< discarded prefix of the horizon
    double chunk_mbit = 0.0;        ///< 0 for mechanisms without chunks
    std::uint64_t transmissions = 0;
    std::uint64_t deadline_violations = 0;
    std::uint64_t seed = 0;
    std::string prng = kPrngName;
    std::optional<double> probe_mean_gap_s;  ///< see ChunkProbe

    double window_s() const { return horizon_s - warmup_s; }
};

/// Records the mean gap between consecutive transmissions of one chunk.
struct ChunkProbe {
    std::size_t video = 0;
    std::size_t chunk = 0;
};

/// Per-video exponential inter-arrivals, merged into one time-ordered stream
/// (ties broken by video index).
std::vector<RequestEvent> gen_requests(const VideoLibrary& lib, const SystemParams& params,
                                       const AccessPattern& pattern, double horizon_s,
                                       std::uint64_t seed);

/// max_i(L/r + 1/lambda_i) over requested videos, capped at 20% of the horizon.
double warmup_period(const VideoLibrary& lib, const SystemParams& params, double horizon_s);

SimReport simulate_ccemp(const VideoLibrary& lib, const CacheAllocation& alloc,
                         const AccessPattern& pattern, const SystemParams& params, double horizon_s,
                         std::uint64_t seed, double chunk_mbit,
                         std::optional<ChunkProbe> probe = std::nullopt);

/// Full access only.
SimReport simulate_batch(const VideoLibrary& lib, const CacheAllocation& alloc,
                         const AccessPattern& pattern, const SystemParams& params, double horizon_s,
                         std::uint64_t seed);

SimReport simulate_unicast(const VideoLibrary& lib, const CacheAllocation& alloc,
                           const AccessPattern& pattern, const SystemParams& params,
                           double horizon_s, std::uint64_t seed);

}  // namespace vodcache
