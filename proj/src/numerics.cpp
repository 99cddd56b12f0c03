#include "vodcache/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vodcache::numerics {

double bisect(const BisectionSpec& spec, double target) {
    if (!spec.f) throw InvalidArgument("bisect: missing function");
    if (!(spec.rel_tol > 0.0)) throw InvalidArgument("bisect: tolerance must be positive");
    if (!(spec.hi > spec.lo)) throw InvalidArgument("bisect: empty bracket");

    auto g = [&](double x) {
        const double v = spec.f(x) - target;
        if (std::isnan(v)) throw DomainError("bisect: function returned NaN");
        return v;
    };
    auto sign = [](double v) { return v < 0.0 ? -1 : 1; };

    double lo = spec.lo;
    double hi = spec.hi;
    double g_lo = g(lo);
    if (g_lo == 0.0) return lo;
    double g_hi = g(hi);
    if (g_hi == 0.0) return hi;

    constexpr double kMaxHi = 1152921504606846976.0;  // 2^60
    while (sign(g_lo) == sign(g_hi)) {
        if (hi >= kMaxHi)
            throw BracketError("bisect: no sign change up to 2^60 (target " +
                               std::to_string(target) + ")");
        // The old upper end becomes the new lower end; f is monotone.
        lo = hi;
        g_lo = g_hi;
        hi = hi > 0.0 ? std::min(2.0 * hi, kMaxHi) : 1.0;
        g_hi = g(hi);
        if (g_hi == 0.0) return hi;
    }

    for (int it = 0; it < spec.max_iter; ++it) {
        const double width = hi - lo;
        if (width <= spec.rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
        const double mid = lo + 0.5 * width;
        if (mid <= lo || mid >= hi) break;
        const double g_mid = g(mid);
        if (g_mid == 0.0) return mid;
        if (sign(g_mid) == sign(g_lo)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

double erf_approx(double x) {
    if (x < 0.0) return -erf_approx(-x);
    if (x == 0.0) return 0.0;
    constexpr double p = 0.3275911;
    constexpr double a1 = 0.254829592;
    constexpr double a2 = -0.284496736;
    constexpr double a3 = 1.421413741;
    constexpr double a4 = -1.453152027;
    constexpr double a5 = 1.061405429;
    const double t = 1.0 / (1.0 + p * x);
    const double poly = t * (a1 + t * (a2 + t * (a3 + t * (a4 + t * a5))));
    return 1.0 - poly * std::exp(-x * x);
}

Minimum1d minimize_1d(const std::function<double(double)>& f, double lo, double hi, int grid,
                      double tol) {
    if (!(lo < hi)) throw InvalidArgument("minimize_1d: need lo < hi");
    grid = std::max(grid, 2);
    const double step = (hi - lo) / double(grid - 1);

    int best = -1;
    double best_value = kInfinity;
    for (int i = 0; i < grid; ++i) {
        const double x = i + 1 == grid ? hi : lo + step * i;
        const double v = f(x);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    if (best < 0) throw InfeasibleError("minimize_1d: every sample is infeasible");

    const double best_x = best + 1 == grid ? hi : lo + step * best;
    double a = std::max(lo, best_x - step);
    double b = std::min(hi, best_x + step);

    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    const double x_ref = fc <= fd ? c : d;
    const double v_ref = std::min(fc, fd);
    if (v_ref < best_value) return {x_ref, v_ref};
    return {best_x, best_value};
}

// ---------------------------------------------------------------------------

namespace {

struct Barrier {
    const ConvexProgram& prog;
    Eigen::Index n;

    bool has_lower(Eigen::Index j) const { return prog.lower.size() && std::isfinite(prog.lower[j]); }
    bool has_upper(Eigen::Index j) const { return prog.upper.size() && std::isfinite(prog.upper[j]); }

    std::size_t count() const {
        std::size_t m = prog.inequalities.size() + prog.convex_inequalities.size();
        for (Eigen::Index j = 0; j < n; ++j) m += has_lower(j) + has_upper(j);
        return m;
    }

    /// Smallest slack over all inequality constraints; <= 0 means infeasible.
    double min_slack(const Eigen::VectorXd& x) const {
        double s = kInfinity;
        for (const auto& c : prog.inequalities) s = std::min(s, c.b - c.a.dot(x));
        for (const auto& g : prog.convex_inequalities) {
            const double v = g.value(x);
            s = std::min(s, std::isfinite(v) ? -v : -kInfinity);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (has_lower(j)) s = std::min(s, x[j] - prog.lower[j]);
            if (has_upper(j)) s = std::min(s, prog.upper[j] - x[j]);
        }
        return s;
    }

    double value(const Eigen::VectorXd& x) const {
        double phi = 0.0;
        for (const auto& c : prog.inequalities) phi -= std::log(c.b - c.a.dot(x));
        for (const auto& g : prog.convex_inequalities) phi -= std::log(-g.value(x));
        for (Eigen::Index j = 0; j < n; ++j) {
            if (has_lower(j)) phi -= std::log(x[j] - prog.lower[j]);
            if (has_upper(j)) phi -= std::log(prog.upper[j] - x[j]);
        }
        return phi;
    }

    /// Gradients and slacks of every inequality, in a fixed order.
    void constraint_columns(const Eigen::VectorXd& x, std::vector<Eigen::VectorXd>& cols,
                            std::vector<double>& slacks) const {
        for (const auto& c : prog.inequalities) {
            cols.push_back(c.a);
            slacks.push_back(c.b - c.a.dot(x));
        }
        for (const auto& g : prog.convex_inequalities) {
            cols.push_back(g.gradient(x));
            slacks.push_back(-g.value(x));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (has_lower(j)) {
                cols.push_back(-Eigen::VectorXd::Unit(n, j));
                slacks.push_back(x[j] - prog.lower[j]);
            }
            if (has_upper(j)) {
                cols.push_back(Eigen::VectorXd::Unit(n, j));
                slacks.push_back(prog.upper[j] - x[j]);
            }
        }
    }

    /// grad f + sum_j mu_j grad g_j + A^T nu. Constraints whose barrier
    /// multiplier 1/(t s_j) matters get least-squares multipliers, since
    /// 1/(t s_j) is dominated by rounding in s_j once s_j is tiny; the rest
    /// keep the barrier estimate. Negative least-squares multipliers count
    /// as residual.
    Eigen::VectorXd stationarity(const Eigen::VectorXd& x, double t, const Eigen::VectorXd& grad_f,
                                 const Eigen::MatrixXd& eq) const {
        std::vector<Eigen::VectorXd> cols;
        std::vector<double> slacks;
        constraint_columns(x, cols, slacks);
        const double scale = std::max(1.0, grad_f.cwiseAbs().maxCoeff());
        Eigen::VectorXd base = grad_f;
        std::vector<std::size_t> active;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double mu = 1.0 / (t * slacks[k]);
            base += mu * cols[k];
            if (mu * cols[k].cwiseAbs().maxCoeff() > 1e-9 * scale) active.push_back(k);
        }
        const Eigen::Index na = Eigen::Index(active.size());
        if (na + eq.rows() == 0) return base;
        Eigen::MatrixXd G(n, na + eq.rows());
        for (Eigen::Index k = 0; k < na; ++k) G.col(k) = cols[active[std::size_t(k)]];
        if (eq.rows() > 0) G.rightCols(eq.rows()) = eq.transpose();
        // Smallest correction to the barrier multipliers.
        Eigen::VectorXd mult = G.completeOrthogonalDecomposition().solve(-base);
        Eigen::VectorXd stat = base + G * mult;
        for (Eigen::Index k = 0; k < na; ++k) mult[k] += 1.0 / (t * slacks[active[std::size_t(k)]]);
        double negative = 0.0;
        for (Eigen::Index k = 0; k < na; ++k)
            negative = std::max(negative, -mult[k] * cols[active[std::size_t(k)]].cwiseAbs().maxCoeff());
        if (negative > 0.0) stat[0] = std::max(std::abs(stat[0]), negative);
        return stat;
    }

    void add_derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
        for (const auto& c : prog.inequalities) {
            const double s = c.b - c.a.dot(x);
            grad += c.a / s;
            hess += c.a * c.a.transpose() / (s * s);
        }
        for (const auto& g : prog.convex_inequalities) {
            const double s = -g.value(x);
            const Eigen::VectorXd dg = g.gradient(x);
            grad += dg / s;
            hess += dg * dg.transpose() / (s * s) + g.hessian(x) / s;
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (has_lower(j)) {
                const double s = x[j] - prog.lower[j];
                grad[j] -= 1.0 / s;
                hess(j, j) += 1.0 / (s * s);
            }
            if (has_upper(j)) {
                const double s = prog.upper[j] - x[j];
                grad[j] += 1.0 / s;
                hess(j, j) += 1.0 / (s * s);
            }
        }
    }
};

struct NewtonStep {
    Eigen::VectorXd dx;
    Eigen::VectorXd w;  ///< equality multipliers scaled by t
};

NewtonStep solve_newton(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad,
                        const Eigen::MatrixXd& eq) {
    const Eigen::Index n = grad.size();
    const Eigen::Index p = eq.rows();
    if (p == 0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        Eigen::VectorXd dx = ldlt.solve(-grad);
        if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
            dx = hess.fullPivLu().solve(-grad);
        }
        return {dx, Eigen::VectorXd()};
    }
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + p, n + p);
    kkt.topLeftCorner(n, n) = hess;
    kkt.topRightCorner(n, p) = eq.transpose();
    kkt.bottomLeftCorner(p, n) = eq;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + p);
    rhs.head(n) = -grad;
    const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
    return {sol.head(n), sol.tail(p)};
}

}  // namespace

ConvexSolution convex_solve(const ConvexProgram& program, const Eigen::VectorXd& x0,
                            const ConvexOptions& options) {
    const Eigen::Index n = x0.size();
    const auto& f = program.objective;
    if (!f.value || !f.gradient || !f.hessian)
        throw InvalidArgument("convex_solve: objective needs value, gradient and hessian");
    if ((program.lower.size() && program.lower.size() != n) ||
        (program.upper.size() && program.upper.size() != n))
        throw InvalidArgument("convex_solve: box bounds have the wrong dimension");

    Barrier barrier{program, n};
    if (!(barrier.min_slack(x0) > 0.0))
        throw InvalidArgument("convex_solve: start point is not strictly feasible");

    Eigen::MatrixXd eq(Eigen::Index(program.equalities.size()), n);
    Eigen::VectorXd eq_rhs(Eigen::Index(program.equalities.size()));
    for (std::size_t k = 0; k < program.equalities.size(); ++k) {
        eq.row(Eigen::Index(k)) = program.equalities[k].a.transpose();
        eq_rhs[Eigen::Index(k)] = program.equalities[k].b;
    }
    if (eq.rows() > 0 && ((eq * x0 - eq_rhs).cwiseAbs().maxCoeff() >
                          1e-9 * std::max(1.0, eq_rhs.cwiseAbs().maxCoeff())))
        throw InvalidArgument("convex_solve: start point violates the equality constraints");

    const double m = double(barrier.count());
    Eigen::VectorXd x = x0;
    double t = options.t0;
    int steps = 0;
    double residual = kInfinity;

    auto centering_value = [&](const Eigen::VectorXd& y) { return t * f.value(y) + barrier.value(y); };

    for (int stage = 0; stage < options.max_stages; ++stage) {
        bool centered = false;
        int stagnant = 0;
        Eigen::VectorXd w_last = Eigen::VectorXd::Zero(eq.rows());
        Eigen::VectorXd grad_last;
        for (int it = 0; it < options.max_newton_per_stage; ++it) {
            Eigen::VectorXd grad = t * f.gradient(x);
            Eigen::MatrixXd hess = t * f.hessian(x);
            barrier.add_derivatives(x, grad, hess);
            const NewtonStep step = solve_newton(hess, grad, eq);
            if (!step.dx.allFinite()) throw ConvergenceError("convex_solve: singular Newton system", residual);
            grad_last = grad;
            w_last = step.w;
            const double decrement = -grad.dot(step.dx);
            if (decrement * 0.5 <= 1e-11) {
                centered = true;
                break;
            }
            const double psi = centering_value(x);
            const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(psi);
            // Backtrack into the strict interior, then Armijo.
            double s = 1.0;
            while (!(barrier.min_slack(x + s * step.dx) > 0.0) ||
                   !std::isfinite(f.value(x + s * step.dx))) {
                s *= 0.5;
                if (s < 1e-20) break;
            }
            while (s >= 1e-20 && centering_value(x + s * step.dx) > psi - 0.25 * s * decrement + slack)
                s *= 0.5;
            if (s < 1e-20) {
                centered = true;  // no representable progress left at this t
                break;
            }
            // Steps lost in the rounding of psi: as centered as representable.
            stagnant = centering_value(x + s * step.dx) >= psi - slack ? stagnant + 1 : 0;
            x += s * step.dx;
            ++steps;
            if (stagnant >= 3) {
                centered = true;
                break;
            }
        }
        if (!centered)
            throw ConvergenceError("convex_solve: centering did not converge", residual);

        const Eigen::VectorXd grad_f = f.gradient(x);
        const Eigen::VectorXd stat = barrier.stationarity(x, t, grad_f, eq);
        residual = stat.cwiseAbs().maxCoeff() / std::max(1.0, grad_f.cwiseAbs().maxCoeff());

        const double gap = m / t;
        if (m == 0.0 || gap <= options.gap_tol * std::max(1.0, std::abs(f.value(x)))) {
            return {x, f.value(x), m == 0.0 ? 0.0 : gap, residual, steps};
        }
        t *= options.t_factor;
    }
    throw ConvergenceError("convex_solve: barrier parameter cap reached", residual);
}

}  // namespace vodcache::numerics
