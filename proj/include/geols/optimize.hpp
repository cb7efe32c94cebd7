#pragma once

// Bound-constrained local minimization: projected BFGS on the free variables
// (variables held at a bound with an outward gradient form the active set),
// with a Nelder-Mead fallback when the line search stalls.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Core>

namespace geols {

struct OptimOptions {
  /// Convergence needs |f_k - f_{k+1}| <= f_tol * max(1, |f|) and
  /// ||x_k - x_{k+1}||_inf <= x_tol * max(1, ||x||_inf).
  double f_tol = 1e-10;
  double x_tol = 1e-8;
  std::size_t max_iter = 10000;
  /// Extra restarts from the initial point jittered by +-multistart_jitter.
  std::size_t multistart = 0;
  double multistart_jitter = 0.2;
  std::uint64_t seed = 0;
  /// sigma_obs bounds as multiples of the response scale.
  double sigma_floor = 1e-8;
  double sigma_ceil = 1e3;
};

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Bounds unbounded(Eigen::Index n);
  Eigen::VectorXd project(Eigen::VectorXd x) const;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct OptimResult {
  Eigen::VectorXd x;
  double f = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  /// "bfgs", "nelder-mead" or "bfgs+nelder-mead".
  std::string method;
};

/// Objective values that are NaN or throw std::domain_error count as +inf.
OptimResult minimize_bounded(const Objective& f, const Eigen::VectorXd& x0, const Bounds& bounds,
                             const OptimOptions& options);

OptimResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Bounds& bounds,
                        const OptimOptions& options);

/// minimize_bounded from x0 plus options.multistart jittered starts; returns
/// the lowest objective (earliest start wins ties).
OptimResult minimize_multistart(const Objective& f, const Eigen::VectorXd& x0, const Bounds& bounds,
                                const OptimOptions& options);

}  // namespace geols
