#include "geols/gls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "geols/baselines.hpp"
#include "numeric_util.hpp"
#include "param_map.hpp"

namespace geols {
namespace {

// Row -> index into the fitted sigma vector, with the labels of that vector.
struct SigmaLayout {
  std::vector<std::string> keys;
  std::vector<std::size_t> slot_of_row;
};

SigmaLayout make_layout(const Dataset& data, bool per_group) {
  SigmaLayout layout;
  layout.slot_of_row.resize(data.size());
  if (!per_group || data.groups().size() < 2) {
    layout.keys = {kPooledGroup};
    return layout;
  }
  std::vector<std::size_t> slot_of_group(data.groups().size());
  bool pooled_needed = false;
  for (std::size_t g = 0; g < data.groups().size(); ++g) {
    if (data.group_size(g) >= 2) {
      slot_of_group[g] = layout.keys.size();
      layout.keys.push_back(data.groups()[g]);
    } else {
      pooled_needed = true;
    }
  }
  if (pooled_needed) {
    const std::size_t pooled = layout.keys.size();
    layout.keys.push_back(kPooledGroup);
    for (std::size_t g = 0; g < data.groups().size(); ++g) {
      if (data.group_size(g) < 2) slot_of_group[g] = pooled;
    }
  }
  for (std::size_t i = 0; i < data.size(); ++i) layout.slot_of_row[i] = slot_of_group[data.group_index(i)];
  return layout;
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double GlsParameters::sigma_for(const std::string& group) const {
  auto it = sigma_obs.find(group);
  if (it == sigma_obs.end()) it = sigma_obs.find(kPooledGroup);
  if (it == sigma_obs.end()) throw std::invalid_argument("no sigma_obs for group '" + group + "'");
  return it->second;
}

std::vector<double> gls_point_distances(const ModelSpec& spec, const GlsParameters& params, const Dataset& data) {
  data.check_compatible(spec);
  spec.check_coefficients(params.beta);
  std::vector<double> gd(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Observation& o = data[i];
    const GaussianPoint observed(observed_response(spec, o), params.sigma_for(o.group));
    gd[i] = rao_distance(observed, modeled_distribution(spec, params.beta, o));
  }
  return gd;
}

double gls_objective(const ModelSpec& spec, const GlsParameters& params, const Dataset& data) {
  std::vector<double> sq = gls_point_distances(spec, params, data);
  for (double& v : sq) v *= v;
  return pairwise_sum(sq);
}

double gls_matched_sigma_objective(const ModelSpec& spec, const Eigen::VectorXd& beta, const Dataset& data) {
  data.check_compatible(spec);
  std::vector<double> sq(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const GaussianPoint mod = modeled_distribution(spec, beta, data[i]);
    const double d = rao_distance(GaussianPoint(observed_response(spec, data[i]), mod.sigma()), mod);
    sq[i] = d * d;
  }
  return pairwise_sum(sq);
}

double response_scale(const ModelSpec& spec, const Dataset& data) {
  std::vector<double> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) y[i] = observed_response(spec, data[i]);
  const double sd = sd_of(y);
  if (sd > 0.0) return sd;
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m > 0.0 ? m : 1.0;
}

FitResult fit_gls(const ModelSpec& spec, const Dataset& data, const std::optional<GlsParameters>& init,
                  const OptimOptions& options, const GlsOptions& gls_options) {
  data.check_compatible(spec);
  const SigmaLayout layout = make_layout(data, gls_options.per_group_sigma);
  const std::size_t n = data.size();
  const std::size_t nb = spec.coefficient_count();
  const std::size_t ns = layout.keys.size();
  const double scale = response_scale(spec, data);
  const double lo = options.sigma_floor * scale;
  const double hi = options.sigma_ceil * scale;

  FitResult result;
  if (n < nb + ns) {
    result.warnings.push_back("only " + std::to_string(n) + " observations for " + std::to_string(nb + ns) +
                              " parameters");
  }

  std::vector<double> yobs(n);
  for (std::size_t i = 0; i < n; ++i) yobs[i] = observed_response(spec, data[i]);

  Eigen::VectorXd beta0;
  Eigen::VectorXd sigma0(static_cast<Eigen::Index>(ns));
  if (init) {
    spec.check_coefficients(init->beta);
    beta0 = init->beta;
    for (std::size_t s = 0; s < ns; ++s) {
      const auto it = init->sigma_obs.find(layout.keys[s]);
      sigma0[static_cast<Eigen::Index>(s)] =
          it != init->sigma_obs.end() ? it->second : init->sigma_for(layout.keys[s]);
    }
  } else {
    beta0 = spec.multiplicative() ? log_space_ols(spec, data) : fit_ols(spec, data).beta;
    std::vector<std::vector<double>> resid(ns);
    std::vector<double> all;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = yobs[i] - model_mean(spec, beta0, data[i].x);
      resid[layout.slot_of_row[i]].push_back(r);
      all.push_back(r);
    }
    for (std::size_t s = 0; s < ns; ++s) {
      const double sd = resid[s].size() >= 2 ? sd_of(resid[s]) : sd_of(all);
      sigma0[static_cast<Eigen::Index>(s)] = std::max(sd, 1e-6);
    }
  }
  sigma0 = sigma0.cwiseMax(lo).cwiseMin(hi);

  const auto nbi = static_cast<Eigen::Index>(nb);
  Eigen::VectorXd theta0(nbi + static_cast<Eigen::Index>(ns));
  theta0.head(nbi) = theta_from_beta(spec, beta0);
  theta0.tail(static_cast<Eigen::Index>(ns)) = sigma0;
  Bounds bounds = Bounds::unbounded(theta0.size());
  bounds.lower.tail(static_cast<Eigen::Index>(ns)).setConstant(lo);
  bounds.upper.tail(static_cast<Eigen::Index>(ns)).setConstant(hi);

  std::vector<double> sq(n);
  const Objective objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd beta = beta_from_theta(spec, theta);
    for (std::size_t i = 0; i < n; ++i) {
      const double so = theta[nbi + static_cast<Eigen::Index>(layout.slot_of_row[i])];
      const double d = rao_distance(GaussianPoint(yobs[i], so), modeled_distribution(spec, beta, data[i]));
      sq[i] = d * d;
    }
    return pairwise_sum(sq);
  };

  const OptimResult opt = minimize_multistart(objective, theta0, bounds, options);

  result.params.beta = beta_from_theta(spec, opt.x);
  for (std::size_t s = 0; s < ns; ++s) {
    result.params.sigma_obs[layout.keys[s]] = opt.x[nbi + static_cast<Eigen::Index>(s)];
  }
  result.per_point_gd = gls_point_distances(spec, result.params, data);
  result.objective = gls_objective(spec, result.params, data);
  result.converged = opt.converged;
  result.n_iterations = opt.iterations;
  result.diagnostics["evaluations"] = static_cast<double>(opt.evaluations);
  result.diagnostics["response_scale"] = scale;
  result.diagnostics["sigma_floor"] = lo;
  result.diagnostics["sigma_ceiling"] = hi;
  result.diagnostics["nelder_mead_used"] = opt.method == "bfgs" ? 0.0 : 1.0;
  return result;
}

}  // namespace geols
