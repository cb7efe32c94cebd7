#pragma once

// Geodesic least squares: minimize sum_n GD^2(N(y_n, sigma_obs_g(n)^2),
// N(mu_mod_n, sigma_mod_n^2)) over the coefficients and the observed sigmas.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "geols/models.hpp"
#include "geols/optimize.hpp"

namespace geols {

/// sigma_obs key shared by all rows without a dedicated entry.
inline const std::string kPooledGroup = "*";

struct GlsParameters {
  Eigen::VectorXd beta;
  std::map<std::string, double> sigma_obs;

  /// sigma_obs for a group label, falling back to the pooled entry.
  double sigma_for(const std::string& group) const;
};

struct FitResult {
  GlsParameters params;
  double objective = 0.0;
  bool converged = false;
  std::size_t n_iterations = 0;
  std::vector<double> per_point_gd;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> warnings;
};

struct GlsOptions {
  /// One sigma_obs per group label; groups with fewer than two rows share the
  /// pooled entry. When false a single pooled sigma_obs is fitted.
  bool per_group_sigma = false;
};

/// Per-row geodesic distances between observed and modeled distributions.
std::vector<double> gls_point_distances(const ModelSpec& spec, const GlsParameters& params, const Dataset& data);

double gls_objective(const ModelSpec& spec, const GlsParameters& params, const Dataset& data);

/// Diagnostic objective with sigma_obs tied to sigma_mod row by row.
double gls_matched_sigma_objective(const ModelSpec& spec, const Eigen::VectorXd& beta, const Dataset& data);

/// Standard deviation of the observed responses (ln y for log-linear); the
/// sigma_obs bounds are multiples of it.
double response_scale(const ModelSpec& spec, const Dataset& data);

FitResult fit_gls(const ModelSpec& spec, const Dataset& data, const std::optional<GlsParameters>& init = {},
                  const OptimOptions& options = {}, const GlsOptions& gls_options = {});

}  // namespace geols
