#include "vodcache/proactive_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vodcache/numerics.hpp"
#include "vodcache/proactive_gebb.hpp"
#include "vodcache/reactive_alloc.hpp"

namespace vodcache::proactive {

namespace {

using numerics::kInfinity;

// ln(1 + (y + sqrt(y^2 + 4y))/2) without overflow for huge y.
double kkt_log_term(double y) {
    if (y <= 0.0) return 0.0;
    if (y < 1.0) return std::log1p(0.5 * (y + std::sqrt(y * y + 4.0 * y)));
    const double lz = std::log(y) + std::log(0.5 * (1.0 + std::sqrt(1.0 + 4.0 / y)));
    return lz + std::log1p(std::exp(-lz));
}

void require_budget(const VideoLibrary& lib, const SystemParams& params) {
    params.validate(lib);
    params.bandwidth();
}

}  // namespace

ProactivePlan make_plan(const VideoLibrary& lib, const SystemParams& params, const AccessPattern& pattern,
                        CacheAllocation cache, BandwidthAllocation bandwidth) {
    const std::size_t M = lib.size();
    if (cache.mbit.size() != M || bandwidth.mhz.size() != M)
        throw InvalidArgument("plan vectors must have length M");
    ProactivePlan plan;
    plan.pattern = pattern_name(pattern);
    plan.per_video_wait.resize(M);
    double avg = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const double d = proactive_wait(cache.mbit[i], bandwidth.mhz[i], pattern, lib, params);
        plan.per_video_wait[i] = d;
        if (d <= kZeroDelayTol) ++plan.zero_delay_count;
        if (lib.popularity(i) > 0.0) avg += lib.popularity(i) * d;
    }
    plan.avg_wait = avg;
    plan.cache = std::move(cache);
    plan.bandwidth = std::move(bandwidth);
    return plan;
}

std::vector<double> kkt_bandwidth(const std::vector<double>& weights, const CacheAllocation& cache,
                                  double budget_mhz, const std::vector<std::size_t>& videos,
                                  const VideoLibrary& lib, const SystemParams& params, bool cap_zero_delay) {
    const std::size_t M = lib.size();
    if (weights.size() != M || cache.mbit.size() != M) throw InvalidArgument("kkt_bandwidth: vectors must have length M");
    if (!(budget_mhz >= 0.0)) throw InvalidArgument("kkt_bandwidth: remaining budget must be non-negative");
    const double L = lib.length_mbit();
    const double unit = lib.bitrate_mbps() / params.efficiency;

    std::vector<double> b(M, 0.0);
    if (budget_mhz == 0.0) return b;

    std::vector<std::size_t> live;
    std::vector<double> cap(M, kInfinity);
    for (std::size_t i : videos) {
        if (i >= M) throw InvalidArgument("kkt_bandwidth: video index out of range");
        if (!(weights[i] > 0.0) || cache.mbit[i] >= L) continue;
        if (cap_zero_delay && cache.mbit[i] > 0.0) cap[i] = unit * std::log(L / cache.mbit[i]);
        live.push_back(i);
    }
    if (live.empty()) return b;

    double cap_sum = 0.0;
    for (std::size_t i : live) cap_sum += cap[i];
    if (cap_sum <= budget_mhz) {
        for (std::size_t i : live) b[i] = cap[i];
        return b;
    }

    // beta = e^theta keeps the bracket finite for any budget.
    auto alloc_at = [&](double theta, std::vector<double>* out) {
        const double beta = std::exp(theta);
        double s = 0.0;
        for (std::size_t i : live) {
            const double v = std::min(cap[i], unit * kkt_log_term(weights[i] * beta * (L - cache.mbit[i])));
            s += v;
            if (out) (*out)[i] = v;
        }
        return s;
    };
    const double theta = numerics::bisect({[&](double th) { return alloc_at(th, nullptr); }, -740.0, 700.0, 1e-15, 200},
                                          budget_mhz);
    alloc_at(theta, &b);
    const double total = std::accumulate(b.begin(), b.end(), 0.0);
    if (total > budget_mhz)
        for (double& v : b) v *= budget_mhz / total;
    return b;
}

BandwidthAllocation bandwidth_for_cache(const VideoLibrary& lib, const SystemParams& params,
                                        const AccessPattern& pattern, const CacheAllocation& cache) {
    require_budget(lib, params);
    const std::size_t M = lib.size();
    const double L = lib.length_mbit();
    const double B = params.bandwidth();
    BandwidthAllocation out;
    if (std::holds_alternative<DownloadingDemand>(pattern)) {
        out.mhz.assign(M, 0.0);
        double norm = 0.0;
        for (std::size_t i = 0; i < M; ++i) norm += std::sqrt(lib.popularity(i) * (L - cache.mbit[i]));
        if (norm > 0.0)
            for (std::size_t i = 0; i < M; ++i)
                out.mhz[i] = B * std::sqrt(lib.popularity(i) * (L - cache.mbit[i])) / norm;
        return out;
    }
    std::vector<double> w(lib.popularity().begin(), lib.popularity().end());
    if (std::holds_alternative<RandomEndpoints>(pattern))
        for (std::size_t i = 0; i < M; ++i) w[i] *= (L - cache.mbit[i]) / L;
    else if (!std::holds_alternative<FullAccess>(pattern))
        throw InvalidArgument("the proactive system does not support the fixed-size pattern");
    std::vector<std::size_t> all(M);
    std::iota(all.begin(), all.end(), 0);
    out.mhz = kkt_bandwidth(w, cache, B, all, lib, params);
    return out;
}

namespace {

struct Candidate {
    CacheAllocation cache;
    BandwidthAllocation bandwidth;
    double avg_wait = kInfinity;
    std::size_t zero = 0;
};

// First `zero` videos share prefix l1 at zero-delay bandwidth, video `zero`
// takes the leftover cache, the rest are uncached. zero = 0 puts the whole
// cache on video 1 without forcing zero delay.
Candidate full_candidate(const VideoLibrary& lib, const SystemParams& params, double l1, std::size_t zero) {
    const std::size_t M = lib.size();
    const double L = lib.length_mbit();
    const double C = params.cache_mbit;
    const double B = params.bandwidth();
    const double unit = lib.bitrate_mbps() / params.efficiency;

    Candidate c;
    c.zero = zero;
    c.cache.mbit.assign(M, 0.0);
    c.bandwidth.mhz.assign(M, 0.0);
    double used_b = 0.0;
    if (zero == 0) {
        c.cache.mbit[0] = std::min(C, L);
    } else {
        const double bz = l1 >= L ? 0.0 : unit * std::log(L / l1);
        used_b = double(zero) * bz;
        if (used_b > B * (1.0 + 1e-12)) return c;
        for (std::size_t i = 0; i < zero; ++i) {
            c.cache.mbit[i] = l1;
            c.bandwidth.mhz[i] = bz;
        }
        if (zero < M) c.cache.mbit[zero] = std::clamp(C - double(zero) * l1, 0.0, l1);
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = zero; i < M; ++i) rest.push_back(i);
    std::vector<double> p(lib.popularity().begin(), lib.popularity().end());
    const auto b_rest = kkt_bandwidth(p, c.cache, std::max(B - used_b, 0.0), rest, lib, params);
    for (std::size_t i : rest) c.bandwidth.mhz[i] = b_rest[i];

    double avg = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        if (lib.popularity(i) == 0.0) continue;
        avg += lib.popularity(i) * wait_full(c.cache.mbit[i], c.bandwidth.mhz[i], lib, params);
    }
    c.avg_wait = avg;
    return c;
}

std::size_t zero_count_for(double C, double l1, std::size_t M) {
    const double k = std::floor(C / l1 * (1.0 + 1e-12));
    return std::min(std::size_t(std::max(k, 1.0)), M);
}

}  // namespace

ProactivePlan alloc_full(const VideoLibrary& lib, const SystemParams& params) {
    require_budget(lib, params);
    const std::size_t M = lib.size();
    const double L = lib.length_mbit();
    const double C = params.cache_mbit;
    const AccessPattern pattern = FullAccess{};

    if (C == 0.0) {
        CacheAllocation none{std::vector<double>(M, 0.0)};
        auto bw = bandwidth_for_cache(lib, params, pattern, none);
        return make_plan(lib, params, pattern, std::move(none), std::move(bw));
    }

    const double hi = std::min(L, C);
    const double lo = hi / double(M);
    auto objective = [&](double l1) { return full_candidate(lib, params, l1, zero_count_for(C, l1, M)).avg_wait; };

    std::vector<double> trial;
    try {
        trial.push_back(numerics::minimize_1d(objective, lo, hi, 2000, 1e-9 * L).argmin);
    } catch (const numerics::InfeasibleError&) {
    }
    // Kinks where the number of zero-delay videos changes.
    for (std::size_t j = 1; j <= M; ++j) {
        const double l1 = C / double(j);
        if (l1 >= lo * (1.0 - 1e-15) && l1 <= hi * (1.0 + 1e-15)) trial.push_back(std::clamp(l1, lo, hi));
    }

    Candidate best = full_candidate(lib, params, hi, 0);
    for (double l1 : trial) {
        Candidate c = full_candidate(lib, params, l1, zero_count_for(C, l1, M));
        if (c.avg_wait < best.avg_wait) best = std::move(c);
    }
    if (!(best.avg_wait < kInfinity)) throw numerics::InfeasibleError("alloc_full: no feasible plan");
    // A leftover video that also reached zero delay means the search stopped
    // just short of the kink where it joins the head; evening the head out
    // costs nothing there.
    const std::size_t z = best.zero;
    if (z > 0 && z < M && best.cache.mbit[z] > 0.0 &&
        wait_full(best.cache.mbit[z], best.bandwidth.mhz[z], lib, params) <= kZeroDelayTol) {
        const double kink = std::min(C / double(z + 1), hi);
        Candidate even = full_candidate(lib, params, kink, zero_count_for(C, kink, M));
        if (even.avg_wait <= best.avg_wait + 1e-9 * std::max(best.avg_wait, 1e-9)) best = std::move(even);
    }
    return make_plan(lib, params, pattern, std::move(best.cache), std::move(best.bandwidth));
}

ProactivePlan alloc_random_endpoints(const VideoLibrary& lib, const SystemParams& params) {
    require_budget(lib, params);
    const std::size_t M = lib.size();
    const double L = lib.length_mbit();
    const double r = lib.bitrate_mbps();
    const double fB = params.efficiency;
    const double C = params.cache_mbit;
    const double B = params.bandwidth();
    const AccessPattern pattern = RandomEndpoints{};

    if (C == 0.0) {
        CacheAllocation none{std::vector<double>(M, 0.0)};
        auto bw = bandwidth_for_cache(lib, params, pattern, none);
        return make_plan(lib, params, pattern, std::move(none), std::move(bw));
    }

    // z = (x_1..x_M, l_1..l_M)
    const Eigen::Index n = Eigen::Index(2 * M);
    const Eigen::Index m = Eigen::Index(M);
    Eigen::VectorXd a(m);
    for (Eigen::Index i = 0; i < m; ++i) a[i] = lib.popularity(std::size_t(i)) / (r * L);

    numerics::ConvexProgram prog;
    prog.objective.value = [=](const Eigen::VectorXd& z) {
        double f = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double u = L - z[m + i];
            f += a[i] * (u * u / (1.0 - z[i]) - L * u);
        }
        return f;
    };
    prog.objective.gradient = [=](const Eigen::VectorXd& z) {
        Eigen::VectorXd g(n);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double u = L - z[m + i];
            const double q = 1.0 - z[i];
            g[i] = a[i] * u * u / (q * q);
            g[m + i] = a[i] * (L - 2.0 * u / q);
        }
        return g;
    };
    prog.objective.hessian = [=](const Eigen::VectorXd& z) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double u = L - z[m + i];
            const double q = 1.0 - z[i];
            h(i, i) = 2.0 * a[i] * u * u / (q * q * q);
            h(m + i, m + i) = 2.0 * a[i] / q;
            h(i, m + i) = h(m + i, i) = -2.0 * a[i] * u / (q * q);
        }
        return h;
    };

    // Bandwidth budget: sum -ln x_i <= f_B B / r.
    const double K = fB * B / r;
    numerics::SmoothFunction band;
    band.value = [=](const Eigen::VectorXd& z) {
        double s = -K;
        for (Eigen::Index i = 0; i < m; ++i) s -= z[i] > 0.0 ? std::log(z[i]) : -kInfinity;
        return s;
    };
    band.gradient = [=](const Eigen::VectorXd& z) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < m; ++i) g[i] = -1.0 / z[i];
        return g;
    };
    band.hessian = [=](const Eigen::VectorXd& z) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < m; ++i) h(i, i) = 1.0 / (z[i] * z[i]);
        return h;
    };
    prog.convex_inequalities.push_back(band);

    Eigen::VectorXd cache_row = Eigen::VectorXd::Zero(n);
    cache_row.tail(m).setOnes();
    prog.inequalities.push_back({cache_row, C});
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
        row[i] = -L;
        row[m + i] = 1.0;
        prog.inequalities.push_back({row, 0.0});  // l_i <= L x_i
    }
    prog.lower = Eigen::VectorXd::Constant(n, -kInfinity);
    prog.upper = Eigen::VectorXd::Constant(n, kInfinity);
    for (Eigen::Index i = 0; i < m; ++i) {
        prog.upper[i] = 1.0;
        prog.lower[m + i] = 0.0;
    }

    Eigen::VectorXd z0(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        z0[i] = std::exp(-0.9 * K / double(M));
        z0[m + i] = std::min(0.5 * C / double(M), 0.5 * L * z0[i]);
    }
    // Tighter gaps only chase rounding noise in the barrier multipliers.
    numerics::ConvexOptions opts;
    opts.gap_tol = 1e-8;
    const auto sol = numerics::convex_solve(prog, z0, opts);
    if (sol.kkt_residual > 1e-6)
        throw numerics::ConvergenceError("random-endpoints program: KKT residual too large", sol.kkt_residual);

    // The barrier keeps l_i <= L x_i slightly slack, so zero-delay videos come
    // out with tiny positive waits. Videos whose constraint is nearly tight
    // form the zero-delay head: even out their cache, then recompute the
    // bandwidth exactly for the final cache, which puts them at their caps.
    CacheAllocation cache{std::vector<double>(M)};
    std::vector<std::size_t> head;
    for (std::size_t i = 0; i < M; ++i) {
        const Eigen::Index k = Eigen::Index(i);
        cache.mbit[i] = std::clamp(sol.x[m + k], 0.0, L);
        if (L * sol.x[k] - sol.x[m + k] <= 1e-6 * L && cache.mbit[i] > 0.0) head.push_back(i);
    }
    if (head.size() > 1) {
        double sum = 0.0;
        for (std::size_t i : head) sum += cache.mbit[i];
        for (std::size_t i : head) cache.mbit[i] = sum / double(head.size());
    }
    auto bw = bandwidth_for_cache(lib, params, pattern, cache);
    return make_plan(lib, params, pattern, std::move(cache), std::move(bw));
}

ProactivePlan alloc_download(const VideoLibrary& lib, const SystemParams& params) {
    require_budget(lib, params);
    const AccessPattern pattern = DownloadingDemand{};
    CacheAllocation cache = reactive::popular_cache(lib, params.cache_mbit);
    auto bw = bandwidth_for_cache(lib, params, pattern, cache);
    return make_plan(lib, params, pattern, std::move(cache), std::move(bw));
}

ProactivePlan optimize_proactive(const VideoLibrary& lib, const SystemParams& params,
                                 const AccessPattern& pattern) {
    if (std::holds_alternative<FullAccess>(pattern)) return alloc_full(lib, params);
    if (std::holds_alternative<RandomEndpoints>(pattern)) return alloc_random_endpoints(lib, params);
    if (std::holds_alternative<DownloadingDemand>(pattern)) return alloc_download(lib, params);
    throw InvalidArgument("the proactive system does not support the fixed-size pattern");
}

double zero_delay_threshold(const VideoLibrary& lib, const SystemParams& params) {
    params.validate(lib);
    if (params.cache_mbit == 0.0) return kInfinity;
    const double M = double(lib.size());
    return M * lib.bitrate_mbps() / params.efficiency * std::log(lib.total_mbit() / params.cache_mbit);
}

ProactivePlan brute_force_proactive(const VideoLibrary& lib, const SystemParams& params,
                                    const AccessPattern& pattern, int divisions) {
    require_budget(lib, params);
    const std::size_t M = lib.size();
    if (M > 2) throw InvalidArgument("brute_force_proactive: M must be at most 2");
    if (divisions < 1) throw InvalidArgument("brute_force_proactive: need at least one division");
    const double L = lib.length_mbit();
    const double C = params.cache_mbit;
    const double B = params.bandwidth();

    if (M == 1) {
        CacheAllocation cache{{std::min(C, L)}};
        BandwidthAllocation bw{{B}};
        return make_plan(lib, params, pattern, std::move(cache), std::move(bw));
    }

    const double l_top = std::min(L, C);
    const double p1 = lib.popularity(0), p2 = lib.popularity(1);
    double best = kInfinity;
    double best_l = 0.0, best_b = 0.0;
    for (int i = 0; i <= divisions; ++i) {
        const double l1 = i == divisions ? l_top : l_top * double(i) / divisions;
        const double l2 = std::min(L, C - l1);
        for (int j = 0; j <= divisions; ++j) {
            const double b1 = j == divisions ? B : B * double(j) / divisions;
            const double b2 = std::max(B - b1, 0.0);
            const double v = p1 * proactive_wait(l1, b1, pattern, lib, params) +
                             p2 * proactive_wait(l2, b2, pattern, lib, params);
            if (v < best) {
                best = v;
                best_l = l1;
                best_b = b1;
            }
        }
    }
    CacheAllocation cache{{best_l, std::min(L, C - best_l)}};
    BandwidthAllocation bw{{best_b, std::max(B - best_b, 0.0)}};
    return make_plan(lib, params, pattern, std::move(cache), std::move(bw));
}

}  // namespace vodcache::proactive
