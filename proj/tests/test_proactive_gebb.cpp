#include <doctest.h>

#include <cmath>
#include <random>

#include "vodcache/proactive_gebb.hpp"
#include "vodcache/reactive_analytic.hpp"

using namespace vodcache;

namespace {

const VideoLibrary kLib({1.0}, 1200, 2);
SystemParams fb4() {
    SystemParams p;
    p.efficiency = 4;
    return p;
}
const SystemParams kP = fb4();

}  // namespace

TEST_CASE("finite-n wait") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 100; ++k) {
        const double l = 1200 * u(gen), b = 0.01 + 5 * u(gen);
        CHECK(wait_finite_n(l, b, 1, kLib, kP).wait_s == doctest::Approx((1200 - l) / (4 * b)).epsilon(1e-12));
        CHECK(wait_download(l, b, kLib, kP) == doctest::Approx(wait_finite_n(l, b, 1, kLib, kP).wait_s).epsilon(1e-12));
        double prev = INFINITY;
        for (int n = 1; n <= 1024; n *= 2) {
            const double w = wait_finite_n(l, b, n, kLib, kP).wait_s;
            CHECK(w < prev);
            prev = w;
        }
        const auto big = wait_finite_n(l, b, 10000, kLib, kP);
        const double lim = wait_full(l, b, kLib, kP);
        if (lim > 1.0) CHECK(big.delay_s == doctest::Approx(lim).epsilon(1e-3));
    }
    CHECK(std::isinf(wait_finite_n(100, 0, 8, kLib, kP).wait_s));
    CHECK(wait_finite_n(1200, 0, 8, kLib, kP).wait_s == 0);
    CHECK_THROWS_AS(wait_finite_n(100, 1, 0, kLib, kP), DomainError);
}

TEST_CASE("limit wait and the zero-delay boundary") {
    CHECK(wait_full(0, 2 * std::log(2.0) / 4, kLib, kP) == doctest::Approx(600).epsilon(1e-12));
    for (double l : {10.0, 120.0, 600.0, 1100.0}) {
        const double b = bw_high_rate_limit(l, kLib, kP);
        CHECK(wait_full(l, b, kLib, kP) < 1e-9);
        CHECK_FALSE(over_provisioned(l, b * (1 - 1e-9), kLib, kP));
        CHECK(over_provisioned(l, b * 1.01, kLib, kP));
        CHECK(wait_full(l, b * 1.01, kLib, kP) == 0);
        CHECK(wait_full(l, b * 0.99, kLib, kP) > 0);
    }
    CHECK(std::isinf(wait_full(0, 0, kLib, kP)));
    CHECK(wait_full(1200, 0, kLib, kP) == 0);
}

TEST_CASE("random endpoints and download waits") {
    CHECK(wait_random_endpoints(1200, 0.1, kLib, kP) == 0);
    CHECK(wait_random_endpoints(0, 0.3, kLib, kP) == wait_full(0, 0.3, kLib, kP));
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 100; ++k) {
        const double l = 1200 * u(gen), b = 0.01 + 2 * u(gen);
        CHECK(wait_random_endpoints(l, b, kLib, kP) ==
              doctest::Approx((1 - l / 1200) * wait_full(l, b, kLib, kP)).epsilon(1e-12));
    }
    CHECK(wait_download(0, 10, kLib, kP) == doctest::Approx(30));
    CHECK(wait_download(1200, 0, kLib, kP) == 0);
    CHECK(proactive_wait(100, 1, DownloadingDemand{}, kLib, kP) == wait_download(100, 1, kLib, kP));
    CHECK_THROWS_AS(proactive_wait(100, 1, FixedSize{10}, kLib, kP), InvalidArgument);
}

TEST_CASE("wait is convex and decreasing in bandwidth") {
    for (double l : {0.0, 100.0, 500.0})
        for (int n : {1, 4, 64}) {
            double prev = INFINITY, prev_step = -INFINITY;
            for (double b = 0.05; b < 3; b += 0.05) {
                const double w = wait_finite_n(l, b, n, kLib, kP).wait_s;
                CHECK(w < prev);
                if (std::isfinite(prev)) {
                    const double step = w - prev;
                    CHECK(step >= prev_step - 1e-9);
                    prev_step = step;
                }
                prev = w;
            }
        }
}

TEST_CASE("schedule construction") {
    const auto one = build_schedule(200, 1.0, 1, kLib, kP);
    REQUIRE(one.durations_s.size() == 1);
    CHECK(one.durations_s[0] == doctest::Approx(500));
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 50; ++k) {
        const double l = 1100 * u(gen), b = 0.05 + 2 * u(gen);
        const int n = 1 + int(300 * u(gen));
        const auto s = build_schedule(l, b, n, kLib, kP);
        double sum = 0;
        for (std::size_t j = 0; j < s.durations_s.size(); ++j) {
            CHECK(s.durations_s[j] > 0);
            if (j) CHECK(s.durations_s[j] > s.durations_s[j - 1]);
            CHECK(s.lengths_mbit[j] == doctest::Approx(2 * s.durations_s[j]).epsilon(1e-14));
            CHECK((s.wait_s + sum) * (b / n) * 4 == doctest::Approx(2 * s.durations_s[j]).epsilon(1e-12));
            sum += s.durations_s[j];
        }
        CHECK(sum == doctest::Approx((1200 - l) / 2).epsilon(1e-9));
        CHECK(s.wait_s > 0);
    }
    CHECK_THROWS_AS(build_schedule(1200, 1, 4, kLib, kP), DomainError);
    CHECK_THROWS_AS(build_schedule(0, 0, 4, kLib, kP), DomainError);
}

TEST_CASE("schedule validation") {
    const double l = 60, b = 0.4;
    const auto s = build_schedule(l, b, 32, kLib, kP);
    REQUIRE(s.wait_s > l / 2);
    const auto ok = validate_schedule(s, 1000, kLib, kP);
    CHECK(ok.ok());
    CHECK(ok.phases_checked == 1000 + 32);
    const auto bad = validate_schedule(s, 1000, kLib, kP, 0.95 * s.wait_s);
    CHECK_FALSE(bad.ok());
    REQUIRE_FALSE(bad.stalls.empty());
    CHECK(bad.worst_shortfall_s == doctest::Approx(0.05 * s.wait_s).epsilon(1e-3));
    const double minimal = min_stall_free_wait(s, 1000, kLib, kP);
    CHECK(std::abs(minimal - s.wait_s) <= 1e-6 * s.wait_s);
    // when the cached prefix outlasts the wait, a shorter wait is harmless
    const auto covered = build_schedule(1000, 2.0, 16, kLib, kP);
    CHECK(covered.wait_s < 500);
    CHECK(validate_schedule(covered, 200, kLib, kP, 0.0).ok());
}
