#pragma once

// Comparison estimators: ordinary least squares (Levenberg-Marquardt for the
// raw power law), maximum likelihood under the propagated error model (MAP
// with a uniform prior), total least squares and bisquare IRLS.
//
// For the log-linear form every estimator fits the logged data and reports
// beta[0] as the prefactor exp(intercept), matching model_mean.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "geols/models.hpp"
#include "geols/optimize.hpp"

namespace geols {

enum class Method { GLS, OLS, MAP, TLS, ROB };

/// Lower-case names "gls", "ols", "map", "tls", "rob".
Method parse_method(std::string_view name);
std::string_view to_string(Method method);
/// Parses a comma-separated list; throws std::invalid_argument when empty.
std::vector<Method> parse_method_list(std::string_view list);
/// TLS and ROB are defined for the linear-in-parameters forms only.
bool method_supports(Method method, ModelForm form);

struct BaselineResult {
  Method method = Method::OLS;
  Eigen::VectorXd beta;
  bool converged = false;
  std::map<std::string, double> diagnostics;
};

struct RobustOptions {
  double tuning = 4.685;
  double tolerance = 1e-8;
  std::size_t max_iter = 400;
};

/// Throws std::runtime_error on a rank-deficient design.
BaselineResult fit_ols(const ModelSpec& spec, const Dataset& data);
BaselineResult fit_map(const ModelSpec& spec, const Dataset& data, const OptimOptions& options = {});
BaselineResult fit_tls(const ModelSpec& spec, const Dataset& data);
BaselineResult fit_rob(const ModelSpec& spec, const Dataset& data, const RobustOptions& options = {});

/// Dispatch for the four baselines; Method::GLS is rejected.
BaselineResult fit_baseline(Method method, const ModelSpec& spec, const Dataset& data,
                            const OptimOptions& options = {});

/// Least squares on the logged power law, i.e. the log-linear OLS solution.
Eigen::VectorXd log_space_ols(const ModelSpec& spec, const Dataset& data);

}  // namespace geols
