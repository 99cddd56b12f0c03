#pragma once

// System model shared by every other module.
//
// Units are fixed across the library:
//   data       megabits (Mbit)
//   time       seconds
//   rate       megabits per second
//   bandwidth  MHz, so the efficiency f_B is (Mbit/s) per MHz

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vodcache {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of a formula (e.g. l_i > L).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Rejected model or configuration value.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Catalog

class VideoLibrary {
public:
    /// Throws InvalidArgument unless M >= 1, L > 0, r > 0 and the popularity
    /// vector is a non-increasing probability vector (sum within 1e-12).
    VideoLibrary(std::vector<double> popularity, double length_mbit, double bitrate_mbps);

    std::size_t size() const { return popularity_.size(); }
    double length_mbit() const { return length_mbit_; }
    double bitrate_mbps() const { return bitrate_mbps_; }
    double duration_s() const { return length_mbit_ / bitrate_mbps_; }
    double popularity(std::size_t i) const { return popularity_[i]; }
    std::span<const double> popularity() const { return popularity_; }
    double total_mbit() const { return length_mbit_ * static_cast<double>(size()); }

private:
    std::vector<double> popularity_;
    double length_mbit_;
    double bitrate_mbps_;
};

struct SystemParams {
    double efficiency = 4.0;       ///< f_B, (Mbit/s)/MHz
    double request_rate = 0.0;     ///< lambda, total requests per second
    double cache_mbit = 0.0;       ///< C, client cache capacity
    std::optional<double> bandwidth_mhz;  ///< B, proactive problems only

    /// Throws InvalidArgument when a field violates its range for `lib`.
    void validate(const VideoLibrary& lib) const;

    /// Per-video Poisson rate lambda_i = p_i * lambda.
    double video_rate(const VideoLibrary& lib, std::size_t i) const {
        return lib.popularity(i) * request_rate;
    }

    /// B, or InvalidArgument when the scenario has no bandwidth budget.
    double bandwidth() const;
};

// ---------------------------------------------------------------------------
// Access patterns

struct FullAccess {};
struct RandomEndpoints {};
struct FixedSize {
    double duration_s = 0.0;  ///< D
};
struct DownloadingDemand {};

using AccessPattern = std::variant<FullAccess, RandomEndpoints, FixedSize, DownloadingDemand>;

/// Short names used in configs and CSV output: full, random-endpoints,
/// fixed-size, download.
std::string pattern_name(const AccessPattern& pattern);

/// Inverse of pattern_name. FixedSize needs the interval length separately.
AccessPattern parse_pattern(std::string_view name, double fixed_size_duration_s = 0.0);

void validate_pattern(const AccessPattern& pattern);

// ---------------------------------------------------------------------------
// Allocations

struct CacheAllocation {
    std::vector<double> mbit;  ///< l_i

    double total() const;
};

struct BandwidthAllocation {
    std::vector<double> mhz;  ///< b_i

    double total() const;
};

/// Relative slack applied to budget checks to absorb solver round-off.
inline constexpr double kBudgetSlack = 1e-9;

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
    LengthMismatch,
    Negative,
    ExceedsVideoLength,
    OverBudget,
    NotFinite,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::optional<std::size_t> index;  ///< empty for aggregate violations
    double magnitude;                  ///< amount by which the bound is exceeded
};

struct ValidityReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

ValidityReport validate_allocation(const CacheAllocation& alloc, const SystemParams& params,
                                   const VideoLibrary& lib);
ValidityReport validate_allocation(const BandwidthAllocation& alloc, const SystemParams& params,
                                   const VideoLibrary& lib);

// ---------------------------------------------------------------------------
// Popularity

/// Zipf law p_i = i^-alpha / sum_j j^-alpha, i = 1..M.
std::vector<double> zipf_popularity(std::size_t count, double alpha);

}  // namespace vodcache
