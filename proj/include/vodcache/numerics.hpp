#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "vodcache/model.hpp"

namespace vodcache::numerics {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class BracketError : public Error {
public:
    using Error::Error;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// ---------------------------------------------------------------------------
// Root finding

struct BisectionSpec {
    std::function<double(double)> f;  ///< monotone on the bracket
    double lo = 0.0;
    double hi = 1.0;
    double rel_tol = 1e-10;
    int max_iter = 200;
};

/// Root of f(x) = target. If [lo, hi] does not straddle the target, hi is
/// doubled (up to 2^60) until it does; BracketError otherwise. Works for
/// increasing and decreasing f.
double bisect(const BisectionSpec& spec, double target);

// ---------------------------------------------------------------------------
// Special functions

/// Rational approximation of erf (Abramowitz & Stegun 7.1.26),
/// |error| <= 1.5e-7, exactly odd.
double erf_approx(double x);

// ---------------------------------------------------------------------------
// 1-D minimization

struct Minimum1d {
    double argmin;
    double value;
};

/// Scans `grid` equally spaced points on [lo, hi] (leftmost wins ties), then
/// golden-section refines inside the neighbouring cells of the best sample.
/// f may return +inf to mark infeasible points; InfeasibleError if all are.
Minimum1d minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                      int grid = 2000, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Smooth convex programs (log-barrier, damped Newton)

struct SmoothFunction {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

/// a . x <= b (inequality) or a . x = b (equality).
struct LinearConstraint {
    Eigen::VectorXd a;
    double b;
};

struct ConvexProgram {
    SmoothFunction objective;
    std::vector<LinearConstraint> inequalities;
    std::vector<LinearConstraint> equalities;
    std::vector<SmoothFunction> convex_inequalities;  ///< g(x) <= 0, g convex
    Eigen::VectorXd lower;  ///< box, -inf allowed; empty means unbounded
    Eigen::VectorXd upper;  ///< box, +inf allowed; empty means unbounded
};

struct ConvexOptions {
    double gap_tol = 1e-10;  ///< stop when m/t <= gap_tol * max(1, |f|)
    double t0 = 1.0;
    double t_factor = 10.0;
    int max_newton_per_stage = 200;
    int max_stages = 80;
};

struct ConvexSolution {
    Eigen::VectorXd x;
    double objective;
    double duality_gap;   ///< m/t at termination
    double kkt_residual;  ///< stationarity residual, relative to max(1, |grad f|)
    int newton_steps;
};

/// Minimizes a convex program from a strictly feasible start `x0` (equalities
/// must already hold). Throws InvalidArgument for an infeasible start and
/// ConvergenceError when the iteration cap is hit.
ConvexSolution convex_solve(const ConvexProgram& program, const Eigen::VectorXd& x0,
                            const ConvexOptions& options = {});

}  // namespace vodcache::numerics
