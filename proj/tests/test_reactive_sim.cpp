#include <doctest.h>

#include <cmath>
#include <numeric>

#include "vodcache/reactive_alloc.hpp"
#include "vodcache/reactive_analytic.hpp"
#include "vodcache/reactive_sim.hpp"

using namespace vodcache;

namespace {

SystemParams params(double rate, double C) {
    SystemParams p;
    p.efficiency = 4;
    p.request_rate = rate;
    p.cache_mbit = C;
    return p;
}

double analytic(const VideoLibrary& lib, const SystemParams& p, const CacheAllocation& a, const AccessPattern& pat,
                const char* mech) {
    double s = 0;
    for (std::size_t i = 0; i < lib.size(); ++i) {
        const auto in = video_inputs(lib, p, a, i);
        s += std::string(mech) == "batch" ? bw_batch(in) : std::string(mech) == "unicast" ? bw_unicast(in, pat) : bw_ccemp(in, pat);
    }
    return s;
}

}  // namespace

TEST_CASE("request generation") {
    VideoLibrary lib(zipf_popularity(5, 0.8), 1200, 2);
    CHECK(gen_requests(lib, params(0.0, 0), FullAccess{}, 1e5, 1).empty());
    const auto a = gen_requests(lib, params(0.1, 0), RandomEndpoints{}, 1e4, 9);
    const auto b = gen_requests(lib, params(0.1, 0), RandomEndpoints{}, 1e4, 9);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].time == b[k].time);
        CHECK(a[k].video == b[k].video);
        CHECK(a[k].payload == b[k].payload);
        if (k) CHECK(a[k - 1].time <= a[k].time);
        CHECK(a[k].payload >= 0);
        CHECK(a[k].payload < 1200);
    }
    const auto p = params(0.2, 0);
    const auto ev = gen_requests(lib, p, FullAccess{}, 1e5, 4);
    std::vector<double> count(5, 0);
    for (const auto& e : ev) count[e.video] += 1;
    for (std::size_t i = 0; i < 5; ++i) {
        const double mean = p.video_rate(lib, i) * 1e5;
        CHECK(std::abs(count[i] - mean) < 3 * std::sqrt(mean));
    }
}

TEST_CASE("chunk grid alignment") {
    VideoLibrary lib(zipf_popularity(3, 0.8), 1200, 2);
    CacheAllocation a{{1200, 333.3, 0}};
    CHECK_THROWS_AS(ChunkGrid::make(lib, a, 2), InvalidArgument);
    const auto s = snap_to_chunks(lib, a, 2);
    CHECK(s.mbit == std::vector<double>{1200, 332, 0});
    const auto g = ChunkGrid::make(lib, s, 2);
    CHECK(g.chunks_per_video == 600);
    CHECK(g.cached_chunks == std::vector<std::size_t>{600, 166, 0});
    CHECK_THROWS_AS(simulate_ccemp(lib, a, FullAccess{}, params(0.1, 2000), 1e4, 1, 2), InvalidArgument);
}

TEST_CASE("fully cached videos send nothing") {
    VideoLibrary lib3(zipf_popularity(3, 0.8), 1200, 2);
    SystemParams q3 = params(1.0, 2400);
    const auto rep = simulate_ccemp(lib3, CacheAllocation{{1200, 1200, 0}}, FullAccess{}, q3, 1e4, 3, 2);
    CHECK(rep.per_video_mhz[0] == 0);
    CHECK(rep.per_video_mhz[1] == 0);
    CHECK(rep.per_video_mhz[2] > 0);
    CHECK(simulate_batch(lib3, CacheAllocation{{1200, 1200, 0}}, FullAccess{}, q3, 1e4, 3).per_video_mhz[0] == 0);
    CHECK(simulate_unicast(lib3, CacheAllocation{{1200, 1200, 0}}, FullAccess{}, q3, 1e4, 3).per_video_mhz[1] == 0);
}

TEST_CASE("simulators track the closed forms") {
    VideoLibrary lib(zipf_popularity(20, 0.8), 1200, 2);
    const auto p = params(0.5, 4000);
    const double T = 2e5;
    const auto wf = snap_to_chunks(lib, reactive::waterfill_full(lib, p).allocation, 2);

    const auto cc = simulate_ccemp(lib, wf, FullAccess{}, p, T, 5, 2);
    CHECK(cc.deadline_violations == 0);
    CHECK(cc.avg_mhz == doctest::Approx(analytic(lib, p, wf, FullAccess{}, "ccemp")).epsilon(0.02));

    const auto ba = simulate_batch(lib, wf, FullAccess{}, p, T, 5);
    CHECK(ba.avg_mhz == doctest::Approx(analytic(lib, p, wf, FullAccess{}, "batch")).epsilon(0.02));
    const auto un = simulate_unicast(lib, wf, FullAccess{}, p, T, 5);
    CHECK(un.avg_mhz == doctest::Approx(analytic(lib, p, wf, FullAccess{}, "unicast")).epsilon(0.02));
    CHECK(cc.avg_mhz <= ba.avg_mhz);
    CHECK(ba.avg_mhz <= un.avg_mhz);
    CHECK(cc.request_count == ba.request_count);

    const auto re = snap_to_chunks(lib, reactive::alloc_random_endpoints(lib, p).allocation, 2);
    const auto sre = simulate_ccemp(lib, re, RandomEndpoints{}, p, T, 6, 2);
    CHECK(sre.deadline_violations == 0);
    CHECK(sre.avg_mhz == doctest::Approx(analytic(lib, p, re, RandomEndpoints{}, "ccemp")).epsilon(0.02));
    const auto ure = simulate_unicast(lib, re, RandomEndpoints{}, p, T, 6);
    CHECK(ure.avg_mhz == doctest::Approx(analytic(lib, p, re, RandomEndpoints{}, "unicast")).epsilon(0.02));

    const AccessPattern fs = FixedSize{240};
    const auto pc = reactive::popular_cache(lib, 4000);
    const auto spc = snap_to_chunks(lib, pc, 2);
    const auto sfs = simulate_ccemp(lib, spc, fs, p, T, 7, 2);
    CHECK(sfs.deadline_violations == 0);
    CHECK(sfs.avg_mhz == doctest::Approx(analytic(lib, p, spc, fs, "ccemp")).epsilon(0.02));
}

TEST_CASE("batching without cache is unicast") {
    VideoLibrary lib(zipf_popularity(4, 0.8), 1200, 2);
    const auto p = params(0.05, 0);
    const CacheAllocation none{{0, 0, 0, 0}};
    const auto ba = simulate_batch(lib, none, FullAccess{}, p, 1e5, 2);
    const auto un = simulate_unicast(lib, none, FullAccess{}, p, 1e5, 2);
    CHECK(ba.transmissions == un.transmissions);
    CHECK(ba.avg_mhz == un.avg_mhz);
    CHECK_THROWS_AS(simulate_batch(lib, none, RandomEndpoints{}, p, 1e5, 2), InvalidArgument);
}

TEST_CASE("coarser chunks cost more bandwidth") {
    VideoLibrary lib(zipf_popularity(20, 0.8), 1200, 2);
    const auto p = params(0.5, 4000);
    const auto wf = reactive::waterfill_full(lib, p).allocation;
    const auto fine = simulate_ccemp(lib, snap_to_chunks(lib, wf, 2), FullAccess{}, p, 1e5, 8, 2);
    const auto coarse = simulate_ccemp(lib, snap_to_chunks(lib, wf, 16), FullAccess{}, p, 1e5, 8, 16);
    CHECK(coarse.avg_mhz >= fine.avg_mhz);
}

TEST_CASE("per-chunk renewal gap") {
    VideoLibrary lib({1.0}, 1200, 2);
    const double rate = 0.01, x = 600;
    const auto p = params(rate, 0);
    ChunkProbe probe{0, std::size_t(x / 100)};
    const auto rep = simulate_ccemp(lib, CacheAllocation{{0}}, FullAccess{}, p, 1e6 / rate, 3, 100, probe);
    REQUIRE(rep.probe_mean_gap_s);
    CHECK(*rep.probe_mean_gap_s == doctest::Approx(1 / rate + x / 2).epsilon(0.03));
}

TEST_CASE("determinism") {
    VideoLibrary lib(zipf_popularity(10, 0.8), 1200, 2);
    const auto p = params(0.3, 3000);
    const auto a = snap_to_chunks(lib, reactive::waterfill_full(lib, p).allocation, 4);
    const auto r1 = simulate_ccemp(lib, a, FullAccess{}, p, 5e4, 77, 4);
    const auto r2 = simulate_ccemp(lib, a, FullAccess{}, p, 5e4, 77, 4);
    CHECK(r1.avg_mhz == r2.avg_mhz);
    CHECK(r1.per_video_mhz == r2.per_video_mhz);
    CHECK(r1.transmissions == r2.transmissions);
    CHECK(r1.prng == std::string(kPrngName));
    const auto r3 = simulate_ccemp(lib, a, FullAccess{}, p, 5e4, 78, 4);
    CHECK(r1.avg_mhz != r3.avg_mhz);
}

TEST_CASE("spread shrinks like one over root horizon") {
    VideoLibrary lib(zipf_popularity(2, 0.8), 1200, 2);
    const auto p = params(0.05, 0);
    const CacheAllocation none{{0, 0}};
    auto spread = [&](double T) {
        std::vector<double> v;
        for (std::uint64_t s = 0; s < 400; ++s) v.push_back(simulate_ccemp(lib, none, FullAccess{}, p, T, 1000 + s, 100).avg_mhz);
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
        double ss = 0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / double(v.size() - 1));
    };
    const double ratio = spread(2e4) / spread(4e4);
    CHECK(ratio >= 1.2);
    CHECK(ratio <= 3.0);
}
