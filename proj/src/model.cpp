#include "vodcache/model.hpp"

#include <cmath>
#include <numeric>

namespace vodcache {

namespace {

double compensated_sum(std::span<const double> values) {
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace

VideoLibrary::VideoLibrary(std::vector<double> popularity, double length_mbit, double bitrate_mbps)
    : popularity_(std::move(popularity)), length_mbit_(length_mbit), bitrate_mbps_(bitrate_mbps) {
    if (popularity_.empty()) throw InvalidArgument("video library needs at least one video");
    if (!(length_mbit_ > 0.0) || !std::isfinite(length_mbit_))
        throw InvalidArgument("video length must be positive");
    if (!(bitrate_mbps_ > 0.0) || !std::isfinite(bitrate_mbps_))
        throw InvalidArgument("bitrate must be positive");
    for (std::size_t i = 0; i < popularity_.size(); ++i) {
        if (!(popularity_[i] >= 0.0) || !std::isfinite(popularity_[i]))
            throw InvalidArgument("popularity entries must be finite and non-negative");
        if (i > 0 && popularity_[i] > popularity_[i - 1] * (1.0 + 1e-15))
            throw InvalidArgument("popularity must be non-increasing (rank order)");
    }
    if (std::abs(compensated_sum(popularity_) - 1.0) > 1e-12)
        throw InvalidArgument("popularity must sum to 1");
}

void SystemParams::validate(const VideoLibrary& lib) const {
    if (!(efficiency > 0.0) || !std::isfinite(efficiency))
        throw InvalidArgument("bandwidth efficiency f_B must be positive");
    if (!(request_rate >= 0.0) || !std::isfinite(request_rate))
        throw InvalidArgument("request rate must be non-negative");
    if (!(cache_mbit >= 0.0) || !(cache_mbit < lib.total_mbit()))
        throw InvalidArgument("cache size must satisfy 0 <= C < M*L");
    if (bandwidth_mhz && (!(*bandwidth_mhz > 0.0) || !std::isfinite(*bandwidth_mhz)))
        throw InvalidArgument("bandwidth budget must be positive");
}

double SystemParams::bandwidth() const {
    if (!bandwidth_mhz) throw InvalidArgument("scenario has no bandwidth budget B");
    return *bandwidth_mhz;
}

std::string pattern_name(const AccessPattern& pattern) {
    struct Visitor {
        std::string operator()(const FullAccess&) const { return "full"; }
        std::string operator()(const RandomEndpoints&) const { return "random-endpoints"; }
        std::string operator()(const FixedSize&) const { return "fixed-size"; }
        std::string operator()(const DownloadingDemand&) const { return "download"; }
    };
    return std::visit(Visitor{}, pattern);
}

AccessPattern parse_pattern(std::string_view name, double fixed_size_duration_s) {
    if (name == "full") return FullAccess{};
    if (name == "random-endpoints") return RandomEndpoints{};
    if (name == "fixed-size") {
        AccessPattern p = FixedSize{fixed_size_duration_s};
        validate_pattern(p);
        return p;
    }
    if (name == "download") return DownloadingDemand{};
    throw InvalidArgument("unknown access pattern '" + std::string(name) + "'");
}

void validate_pattern(const AccessPattern& pattern) {
    if (const auto* fs = std::get_if<FixedSize>(&pattern)) {
        if (!(fs->duration_s > 0.0) || !std::isfinite(fs->duration_s))
            throw InvalidArgument("fixed-size interval D must be positive");
    }
}

double CacheAllocation::total() const { return compensated_sum(mbit); }

double BandwidthAllocation::total() const { return compensated_sum(mhz); }

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::LengthMismatch: return "length-mismatch";
        case ViolationKind::Negative: return "negative";
        case ViolationKind::ExceedsVideoLength: return "exceeds-video-length";
        case ViolationKind::OverBudget: return "over-budget";
        case ViolationKind::NotFinite: return "not-finite";
    }
    return "unknown";
}

namespace {

void check_entries(std::span<const double> v, std::optional<double> cap, ValidityReport& report) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            report.violations.push_back({ViolationKind::NotFinite, i, v[i]});
            continue;
        }
        if (v[i] < 0.0) report.violations.push_back({ViolationKind::Negative, i, -v[i]});
        if (cap && v[i] > *cap)
            report.violations.push_back({ViolationKind::ExceedsVideoLength, i, v[i] - *cap});
    }
}

void check_budget(double total, double budget, ValidityReport& report) {
    if (total > budget + kBudgetSlack * budget)
        report.violations.push_back({ViolationKind::OverBudget, std::nullopt, total - budget});
}

}  // namespace

ValidityReport validate_allocation(const CacheAllocation& alloc, const SystemParams& params,
                                   const VideoLibrary& lib) {
    ValidityReport report;
    if (alloc.mbit.size() != lib.size()) {
        report.violations.push_back({ViolationKind::LengthMismatch, std::nullopt,
                                     std::abs(double(alloc.mbit.size()) - double(lib.size()))});
        return report;
    }
    check_entries(alloc.mbit, lib.length_mbit(), report);
    check_budget(alloc.total(), params.cache_mbit, report);
    return report;
}

ValidityReport validate_allocation(const BandwidthAllocation& alloc, const SystemParams& params,
                                   const VideoLibrary& lib) {
    ValidityReport report;
    if (alloc.mhz.size() != lib.size()) {
        report.violations.push_back({ViolationKind::LengthMismatch, std::nullopt,
                                     std::abs(double(alloc.mhz.size()) - double(lib.size()))});
        return report;
    }
    check_entries(alloc.mhz, std::nullopt, report);
    if (params.bandwidth_mhz) check_budget(alloc.total(), *params.bandwidth_mhz, report);
    return report;
}

std::vector<double> zipf_popularity(std::size_t count, double alpha) {
    if (count == 0) throw InvalidArgument("Zipf popularity needs M >= 1");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw InvalidArgument("Zipf skewness must be non-negative");
    std::vector<double> p(count);
    for (std::size_t i = 0; i < count; ++i) p[i] = std::pow(double(i + 1), -alpha);
    const double norm = compensated_sum(p);
    for (double& v : p) v /= norm;
    return p;
}

}  // namespace vodcache
