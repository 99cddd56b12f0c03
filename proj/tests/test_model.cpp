#include <doctest.h>

#include <cmath>
#include <numeric>

#include "vodcache/model.hpp"

using namespace vodcache;

TEST_CASE("zipf popularity") {
    SUBCASE("alpha 0 is exactly uniform") {
        for (std::size_t M = 1; M <= 1000; ++M) {
            const auto p = zipf_popularity(M, 0.0);
            for (double v : p) REQUIRE(v == 1.0 / double(M));
        }
    }
    SUBCASE("harmonic pair") {
        const auto p = zipf_popularity(2, 1.0);
        CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("top tenth of 200 videos carries about 47% at alpha 0.8") {
        const auto p = zipf_popularity(200, 0.8);
        const double top = std::accumulate(p.begin(), p.begin() + 20, 0.0);
        CHECK(top == doctest::Approx(0.47).epsilon(0.02));
    }
    SUBCASE("sum, order, and head monotone in alpha") {
        double prev_head = 0.0;
        for (double a = 0.0; a <= 2.0; a += 0.1) {
            const auto p = zipf_popularity(300, a);
            CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-12);
            CHECK(std::is_sorted(p.rbegin(), p.rend()));
            CHECK(p[0] >= prev_head);
            prev_head = p[0];
        }
    }
    CHECK_THROWS_AS(zipf_popularity(0, 0.8), InvalidArgument);
    CHECK_THROWS_AS(zipf_popularity(5, -0.1), InvalidArgument);
}

TEST_CASE("library and parameter validation") {
    CHECK_THROWS_AS(VideoLibrary({0.4, 0.6}, 1200, 2), InvalidArgument);  // not rank ordered
    CHECK_THROWS_AS(VideoLibrary({0.5, 0.4}, 1200, 2), InvalidArgument);  // does not sum to 1
    CHECK_THROWS_AS(VideoLibrary({1.0}, 0, 2), InvalidArgument);
    CHECK_THROWS_AS(VideoLibrary({}, 1200, 2), InvalidArgument);
    VideoLibrary lib({0.5, 0.5}, 1200, 2);
    CHECK(lib.duration_s() == 600.0);
    SystemParams p;
    p.request_rate = 0.5;
    p.cache_mbit = 2400;  // = M L
    CHECK_THROWS_AS(p.validate(lib), InvalidArgument);
    p.cache_mbit = 100;
    CHECK_NOTHROW(p.validate(lib));
    CHECK(p.video_rate(lib, 1) == 0.25);
    CHECK_THROWS_AS(p.bandwidth(), InvalidArgument);
}

TEST_CASE("allocation validation") {
    VideoLibrary lib(zipf_popularity(4, 0.8), 1200, 2);
    SystemParams p;
    p.cache_mbit = 1000;
    p.bandwidth_mhz = 10;

    CacheAllocation full{{1200, 1200, 1200, 1200}};
    auto rep = validate_allocation(full, p, lib);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].kind == ViolationKind::OverBudget);
    CHECK(rep.violations[0].magnitude == doctest::Approx(3800));

    CHECK(validate_allocation(CacheAllocation{{0, 0, 0, 0}}, p, lib).ok());

    BandwidthAllocation neg{{1, -0.5, 2, 3}};
    rep = validate_allocation(neg, p, lib);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].kind == ViolationKind::Negative);
    CHECK(*rep.violations[0].index == 1);

    CacheAllocation too_long{{1300, 0, 0, 0}};
    rep = validate_allocation(too_long, p, lib);
    CHECK(rep.violations.size() == 2);  // over L and over C

    CHECK(validate_allocation(CacheAllocation{{1, 2}}, p, lib).violations[0].kind == ViolationKind::LengthMismatch);
    // budget slack absorbs round-off
    CHECK(validate_allocation(CacheAllocation{{1000 * (1 + 1e-12), 0, 0, 0}}, p, lib).ok());
}

TEST_CASE("pattern names round-trip") {
    for (const char* name : {"full", "random-endpoints", "download"})
        CHECK(pattern_name(parse_pattern(name)) == name);
    CHECK(std::get<FixedSize>(parse_pattern("fixed-size", 240)).duration_s == 240);
    CHECK_THROWS_AS(parse_pattern("fixed-size", 0), InvalidArgument);
    CHECK_THROWS_AS(parse_pattern("sideways"), InvalidArgument);
}
