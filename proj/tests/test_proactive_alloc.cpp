#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vodcache/proactive_alloc.hpp"
#include "vodcache/proactive_gebb.hpp"

using namespace vodcache;
using namespace vodcache::proactive;

namespace {

SystemParams params(double C, double B) {
    SystemParams p;
    p.efficiency = 4;
    p.cache_mbit = C;
    p.bandwidth_mhz = B;
    return p;
}

// d/db of p * wait_full, up to sign, written out directly.
double marginal(double p, double l, double b, double L, double r, double fB) {
    const double x = fB * b / r;
    const double em1 = std::expm1(x);
    return p * fB * std::exp(x) * (L - l) / (r * r * em1 * em1);
}

double pair_objective(const VideoLibrary& lib, const SystemParams& p, const AccessPattern& pat, double l1,
                      double b1) {
    const double L = lib.length_mbit(), C = p.cache_mbit, B = p.bandwidth();
    const double l2 = std::min(L, C - l1), b2 = std::max(B - b1, 0.0);
    return lib.popularity(0) * proactive_wait(l1, b1, pat, lib, p) +
           lib.popularity(1) * proactive_wait(l2, b2, pat, lib, p);
}

// Largest objective change from one lattice step around (l1, b1).
double lattice_resolution(const VideoLibrary& lib, const SystemParams& p, const AccessPattern& pat, double l1,
                          double b1, int divisions) {
    const double dl = std::min(lib.length_mbit(), p.cache_mbit) / divisions, db = p.bandwidth() / divisions;
    const double base = pair_objective(lib, p, pat, l1, b1);
    double worst = 0.0;
    for (double sl : {-1.0, 0.0, 1.0})
        for (double sb : {-1.0, 0.0, 1.0}) {
            const double l = std::clamp(l1 + sl * dl, 0.0, std::min(lib.length_mbit(), p.cache_mbit));
            const double b = std::clamp(b1 + sb * db, 0.0, p.bandwidth());
            const double v = pair_objective(lib, p, pat, l, b);
            if (std::isfinite(v)) worst = std::max(worst, std::abs(v - base));
        }
    return worst;
}

// Zero-delay set is a prefix whose members share (l, b); at most one
// nonzero-delay video holds cache and it directly follows the prefix.
void check_full_structure(const ProactivePlan& plan, double L) {
    const std::size_t z = plan.zero_delay_count;
    for (std::size_t i = 0; i < plan.per_video_wait.size(); ++i)
        CHECK((plan.per_video_wait[i] <= kZeroDelayTol) == (i < z));
    for (std::size_t i = 1; i < z; ++i) {
        CHECK(std::abs(plan.cache.mbit[i] - plan.cache.mbit[0]) <= 1e-9 * L);
        CHECK(std::abs(plan.bandwidth.mhz[i] - plan.bandwidth.mhz[0]) <= 1e-9 * plan.bandwidth.mhz[0]);
    }
    for (std::size_t i = z + 1; i < plan.cache.mbit.size(); ++i) CHECK(plan.cache.mbit[i] == 0.0);
}

}  // namespace

TEST_CASE("kkt bandwidth") {
    const VideoLibrary lib(std::vector<double>(4, 0.25), 1200, 2);
    const auto p = params(0, 2);
    const CacheAllocation none{std::vector<double>(4, 0.0)};
    const auto b = kkt_bandwidth({0.25, 0.25, 0.25, 0.25}, none, 2, {0, 1, 2, 3}, lib, p);
    for (double v : b) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 50; ++k) {
        const std::size_t M = 2 + std::size_t(10 * u(gen));
        const auto pop = zipf_popularity(M, 1.5 * u(gen));
        const VideoLibrary zl(pop, 1200, 2);
        CacheAllocation cache{std::vector<double>(M)};
        for (double& l : cache.mbit) l = 600 * u(gen) * u(gen);
        const double B = 0.2 + 3 * u(gen);
        const auto q = params(0, B);
        std::vector<std::size_t> all(M);
        std::iota(all.begin(), all.end(), 0);
        const auto bw = kkt_bandwidth(pop, cache, B, all, zl, q);
        CHECK(std::accumulate(bw.begin(), bw.end(), 0.0) <= B * (1 + 1e-12));
        double lo = INFINITY, hi = 0;
        for (std::size_t i = 0; i < M; ++i) {
            const double cap = cache.mbit[i] > 0 ? 0.5 * std::log(1200 / cache.mbit[i]) : INFINITY;
            CHECK(bw[i] <= cap * (1 + 1e-12));
            if (bw[i] >= cap * (1 - 1e-9)) continue;
            const double g = marginal(pop[i], cache.mbit[i], bw[i], 1200, 2, 4);
            lo = std::min(lo, g);
            hi = std::max(hi, g);
        }
        if (hi > 0) CHECK((hi - lo) / hi < 1e-6);
    }
}

TEST_CASE("zero-delay threshold") {
    for (std::size_t M : {5u, 50u, 200u}) {
        const VideoLibrary lib(zipf_popularity(M, 0.8), 1200, 2);
        const double C = 0.1 * lib.total_mbit();
        auto p = params(C, 1);
        const double B = zero_delay_threshold(lib, p);
        CHECK(B == doctest::Approx(double(M) * 0.5 * std::log(10.0)));
        p.bandwidth_mhz = B;
        const auto at = alloc_full(lib, p);
        CHECK(at.avg_wait <= 1e-6);
        CHECK(at.zero_delay_count == M);
        for (double l : at.cache.mbit) CHECK(l == doctest::Approx(C / double(M)).epsilon(1e-9));
        p.bandwidth_mhz = 0.95 * B;
        CHECK(alloc_full(lib, p).avg_wait > 0);
    }
    const VideoLibrary lib({1.0}, 1200, 2);
    CHECK(std::isinf(zero_delay_threshold(lib, params(0, 1))));
}

TEST_CASE("full access against the two-video lattice") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 10; ++k) {
        const double p1 = 0.5 + 0.45 * u(gen);
        const VideoLibrary lib({p1, 1 - p1}, 1200, 2);
        const auto p = params(2400 * (0.02 + 0.9 * u(gen)), 0.1 + 1.5 * u(gen));
        const auto plan = alloc_full(lib, p);
        const auto brute = brute_force_proactive(lib, p, FullAccess{}, 300);
        const double res = lattice_resolution(lib, p, FullAccess{}, brute.cache.mbit[0], brute.bandwidth.mhz[0], 300);
        CHECK(plan.avg_wait <= brute.avg_wait + 1e-9 * std::max(1.0, brute.avg_wait));
        CHECK(plan.avg_wait >= brute.avg_wait - res - 1e-9);
        CHECK(validate_allocation(plan.cache, p, lib).ok());
        CHECK(validate_allocation(plan.bandwidth, p, lib).ok());
    }
}

TEST_CASE("full access plan structure") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 30; ++k) {
        const std::size_t M = 3 + std::size_t(40 * u(gen));
        const VideoLibrary lib(zipf_popularity(M, 1.2 * u(gen)), 1200, 2);
        const auto p = params(lib.total_mbit() * (0.01 + 0.5 * u(gen)), 0.3 * double(M) * u(gen) + 0.05);
        const auto plan = alloc_full(lib, p);
        check_full_structure(plan, 1200);
        CHECK(validate_allocation(plan.cache, p, lib).ok());
        CHECK(validate_allocation(plan.bandwidth, p, lib).ok());
    }

    // C = 0.09ML, M = 10, B = 8: a zero-delay head, one partial video, no cache beyond.
    const VideoLibrary lib(zipf_popularity(10, 0.8), 1200, 2);
    const auto p = params(0.09 * lib.total_mbit(), 8);
    const auto plan = alloc_full(lib, p);
    check_full_structure(plan, 1200);
    CHECK(plan.zero_delay_count == 4);
    std::size_t partial = 0;
    for (std::size_t i = 0; i < 10; ++i)
        if (plan.per_video_wait[i] > kZeroDelayTol && plan.cache.mbit[i] > 0) ++partial;
    CHECK(partial == 1);
    CHECK(plan.cache.mbit[4] > 0);

    // Same scenario, random endpoints: a shorter head, and cache spread over several delayed videos.
    const auto re = alloc_random_endpoints(lib, p);
    CHECK(re.zero_delay_count == 3);
    std::size_t re_partial = 0;
    for (std::size_t i = 0; i < 10; ++i)
        if (re.per_video_wait[i] > kZeroDelayTol && re.cache.mbit[i] > 0) ++re_partial;
    CHECK(re_partial > 1);
    CHECK(plan.cache.total() == doctest::Approx(p.cache_mbit));
}

TEST_CASE("full access is monotone in both budgets") {
    const VideoLibrary lib(zipf_popularity(20, 0.8), 1200, 2);
    double prev = INFINITY;
    for (double B = 0.5; B <= 12; B += 0.5) {
        const double w = alloc_full(lib, params(2400, B)).avg_wait;
        CHECK(w <= prev * (1 + 1e-9));
        prev = w;
    }
    prev = INFINITY;
    for (double C = 0; C < 20000; C += 1000) {
        const double w = alloc_full(lib, params(C, 4)).avg_wait;
        CHECK(w <= prev * (1 + 1e-9));
        prev = w;
    }
}

TEST_CASE("random endpoints") {
    SUBCASE("identical videos get identical shares") {
        const VideoLibrary lib(std::vector<double>(4, 0.25), 1200, 2);
        const auto plan = alloc_random_endpoints(lib, params(1200, 1.2));
        for (std::size_t i = 1; i < 4; ++i) {
            CHECK(plan.cache.mbit[i] == doctest::Approx(plan.cache.mbit[0]).epsilon(1e-6));
            CHECK(plan.bandwidth.mhz[i] == doctest::Approx(plan.bandwidth.mhz[0]).epsilon(1e-6));
        }
        CHECK(plan.cache.total() == doctest::Approx(1200).epsilon(1e-6));
        CHECK(plan.bandwidth.total() == doctest::Approx(1.2).epsilon(1e-6));
    }
    SUBCASE("two-video lattice") {
        std::mt19937_64 gen(31);
        std::uniform_real_distribution<double> u(0, 1);
        for (int k = 0; k < 10; ++k) {
            const double p1 = 0.5 + 0.45 * u(gen);
            const VideoLibrary lib({p1, 1 - p1}, 1200, 2);
            const auto p = params(2400 * (0.02 + 0.9 * u(gen)), 0.1 + 1.5 * u(gen));
            const auto plan = alloc_random_endpoints(lib, p);
            const auto brute = brute_force_proactive(lib, p, RandomEndpoints{}, 300);
            const double res =
                lattice_resolution(lib, p, RandomEndpoints{}, brute.cache.mbit[0], brute.bandwidth.mhz[0], 300);
            CHECK(plan.avg_wait <= brute.avg_wait + 1e-6 * std::max(1.0, brute.avg_wait));
            CHECK(plan.avg_wait >= brute.avg_wait - res - 1e-9);
        }
    }
    SUBCASE("zero-delay prefix with even shares") {
        std::mt19937_64 gen(33);
        std::uniform_real_distribution<double> u(0, 1);
        for (int k = 0; k < 15; ++k) {
            const std::size_t M = 3 + std::size_t(20 * u(gen));
            const VideoLibrary lib(zipf_popularity(M, 1.2 * u(gen)), 1200, 2);
            const auto p = params(lib.total_mbit() * (0.02 + 0.4 * u(gen)), 0.3 * double(M) * u(gen) + 0.05);
            const auto plan = alloc_random_endpoints(lib, p);
            const std::size_t z = plan.zero_delay_count;
            for (std::size_t i = 0; i < M; ++i) CHECK((plan.per_video_wait[i] <= kZeroDelayTol) == (i < z));
            for (std::size_t i = 1; i < z; ++i) {
                CHECK(std::abs(plan.cache.mbit[i] - plan.cache.mbit[0]) <= 1e-6 * 1200);
                CHECK(std::abs(plan.bandwidth.mhz[i] - plan.bandwidth.mhz[0]) <= 1e-6 * plan.bandwidth.mhz[0]);
            }
            CHECK(validate_allocation(plan.cache, p, lib).ok());
            CHECK(validate_allocation(plan.bandwidth, p, lib).ok());
        }
    }
    SUBCASE("no cache reduces to weighted bandwidth split") {
        const VideoLibrary lib(zipf_popularity(5, 0.8), 1200, 2);
        const auto plan = alloc_random_endpoints(lib, params(0, 2));
        for (double l : plan.cache.mbit) CHECK(l == 0);
        CHECK(plan.bandwidth.total() == doctest::Approx(2));
    }
}

TEST_CASE("downloading demand") {
    const VideoLibrary lib({0.75, 0.25}, 1200, 2);
    const auto plan = alloc_download(lib, params(0, 10));
    const double expect = std::pow(30 + 10 * std::sqrt(3.0), 2) / 40;
    CHECK(plan.avg_wait == doctest::Approx(expect).epsilon(1e-12));
    CHECK(plan.bandwidth.mhz[0] / plan.bandwidth.mhz[1] == doctest::Approx(std::sqrt(3.0)));

    const VideoLibrary zl(zipf_popularity(10, 0.8), 1200, 2);
    const auto q = params(3000, 3);
    const auto d = alloc_download(zl, q);
    CHECK(d.cache.mbit[0] == 1200);
    CHECK(d.cache.mbit[1] == 1200);
    CHECK(d.cache.mbit[2] == 600);
    CHECK(d.bandwidth.mhz[0] == 0);
    CHECK(d.avg_wait >= alloc_full(zl, q).avg_wait);
}

TEST_CASE("plans are self-consistent") {
    const VideoLibrary lib(zipf_popularity(8, 0.8), 1200, 2);
    const auto p = params(2000, 2);
    for (const AccessPattern& pat : {AccessPattern{FullAccess{}}, AccessPattern{RandomEndpoints{}},
                                     AccessPattern{DownloadingDemand{}}}) {
        const auto plan = optimize_proactive(lib, p, pat);
        CHECK(plan.pattern == pattern_name(pat));
        double avg = 0;
        for (std::size_t i = 0; i < 8; ++i) {
            const double d = proactive_wait(plan.cache.mbit[i], plan.bandwidth.mhz[i], pat, lib, p);
            CHECK(plan.per_video_wait[i] == d);
            avg += lib.popularity(i) * d;
        }
        CHECK(plan.avg_wait == doctest::Approx(avg).epsilon(1e-14));
    }
    CHECK_THROWS_AS(optimize_proactive(lib, p, FixedSize{10}), InvalidArgument);
    SystemParams no_budget;
    no_budget.cache_mbit = 2000;
    CHECK_THROWS_AS(alloc_full(lib, no_budget), InvalidArgument);
}
