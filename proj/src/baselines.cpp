#include "geols/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "numeric_util.hpp"
#include "param_map.hpp"

namespace geols {
namespace {

struct LinearProblem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  bool log_prefactor = false;
};

LinearProblem linear_problem(const ModelSpec& spec, const Dataset& data) {
  data.check_compatible(spec);
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto p = static_cast<Eigen::Index>(spec.n_predictors());
  LinearProblem lp;
  lp.log_prefactor = spec.multiplicative();
  const bool intercept = spec.form() != ModelForm::SimpleLinear;
  lp.X.resize(n, p + (intercept ? 1 : 0));
  lp.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Observation& o = data[static_cast<std::size_t>(i)];
    Eigen::Index c = 0;
    if (intercept) lp.X(i, c++) = 1.0;
    for (Eigen::Index k = 0; k < p; ++k) lp.X(i, c++) = lp.log_prefactor ? std::log(o.x[k]) : o.x[k];
    lp.y[i] = lp.log_prefactor ? std::log(o.y) : o.y;
  }
  return lp;
}

Eigen::VectorXd to_beta(const LinearProblem& lp, Eigen::VectorXd coef) {
  if (lp.log_prefactor) coef[0] = std::exp(coef[0]);
  return coef;
}

Eigen::VectorXd solve_ls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) {
    throw std::runtime_error("least squares: design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                             " of " + std::to_string(X.cols()) + ")");
  }
  return qr.solve(y);
}

double median(std::vector<double> v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

double sample_sd(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

BaselineResult power_law_lm(const ModelSpec& spec, const Dataset& data) {
  const std::size_t n = data.size();
  const auto m = static_cast<Eigen::Index>(spec.coefficient_count());
  Eigen::VectorXd beta = log_space_ols(spec, data);

  auto residuals = [&](const Eigen::VectorXd& b, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    r.resize(static_cast<Eigen::Index>(n));
    if (J) J->resize(static_cast<Eigen::Index>(n), m);
    for (std::size_t i = 0; i < n; ++i) {
      const Observation& o = data[i];
      const double mu = model_mean(spec, b, o.x);
      r[static_cast<Eigen::Index>(i)] = o.y - mu;
      if (J) {
        (*J)(static_cast<Eigen::Index>(i), 0) = b[0] != 0.0 ? mu / b[0] : 0.0;
        for (Eigen::Index k = 1; k < m; ++k) {
          (*J)(static_cast<Eigen::Index>(i), k) = mu * std::log(o.x[static_cast<std::size_t>(k - 1)]);
        }
      }
    }
    return r.squaredNorm();
  };

  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  double cost = residuals(beta, r, &J);
  double lambda = 1e-3;
  bool converged = false;
  std::size_t it = 0;
  for (; it < 400 && !converged; ++it) {
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    Eigen::VectorXd diag = A.diagonal();
    diag = diag.cwiseMax(1e-12 * std::max(diag.maxCoeff(), 1e-300));
    bool improved = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd damped = A;
      damped.diagonal() += lambda * diag;
      const Eigen::VectorXd step = damped.ldlt().solve(g);
      const Eigen::VectorXd trial = beta + step;
      Eigen::VectorXd r_new;
      const double cost_new = residuals(trial, r_new, nullptr);
      if (std::isfinite(cost_new) && cost_new < cost) {
        const bool small_step =
            step.lpNorm<Eigen::Infinity>() <= 1e-10 * (trial.lpNorm<Eigen::Infinity>() + 1e-10);
        const bool small_gain = cost - cost_new <= 1e-14 * cost;
        beta = trial;
        cost = residuals(beta, r, &J);
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        converged = small_step || small_gain;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      // No damping level reduces the cost: we sit at a stationary point to
      // working precision.
      converged = (J.transpose() * r).lpNorm<Eigen::Infinity>() <= 1e-8 * std::max(1.0, cost);
      break;
    }
  }
  BaselineResult res{Method::OLS, beta, converged, {}};
  res.diagnostics["iterations"] = static_cast<double>(it);
  res.diagnostics["rss"] = cost;
  return res;
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "gls") return Method::GLS;
  if (name == "ols") return Method::OLS;
  if (name == "map") return Method::MAP;
  if (name == "tls") return Method::TLS;
  if (name == "rob") return Method::ROB;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::GLS: return "gls";
    case Method::OLS: return "ols";
    case Method::MAP: return "map";
    case Method::TLS: return "tls";
    case Method::ROB: return "rob";
  }
  return "unknown";
}

std::vector<Method> parse_method_list(std::string_view list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    const std::string_view item = list.substr(start, comma - start);
    if (!item.empty()) {
      const Method m = parse_method(item);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    start = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("method list is empty");
  return out;
}

bool method_supports(Method method, ModelForm form) {
  if (method == Method::TLS || method == Method::ROB) return form != ModelForm::PowerLaw;
  return true;
}

Eigen::VectorXd log_space_ols(const ModelSpec& spec, const Dataset& data) {
  if (!spec.multiplicative()) throw std::invalid_argument("log_space_ols: model is not multiplicative");
  const LinearProblem lp = linear_problem(spec, data);
  return to_beta(lp, solve_ls(lp.X, lp.y));
}

BaselineResult fit_ols(const ModelSpec& spec, const Dataset& data) {
  if (spec.form() == ModelForm::PowerLaw) {
    data.check_compatible(spec);
    return power_law_lm(spec, data);
  }
  const LinearProblem lp = linear_problem(spec, data);
  BaselineResult res{Method::OLS, to_beta(lp, solve_ls(lp.X, lp.y)), true, {}};
  return res;
}

BaselineResult fit_map(const ModelSpec& spec, const Dataset& data, const OptimOptions& options) {
  data.check_compatible(spec);
  Eigen::VectorXd init = spec.multiplicative() ? log_space_ols(spec, data) : fit_ols(spec, data).beta;
  const std::size_t n = data.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(modeled_sigma(spec, init, data[i]) > 0.0)) {
      throw std::invalid_argument("MAP needs nonzero error bars (row " + std::to_string(i) + ")");
    }
  }
  std::vector<double> yobs(n);
  for (std::size_t i = 0; i < n; ++i) yobs[i] = observed_response(spec, data[i]);

  std::vector<double> terms(n);
  const Objective neg_log_like = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd beta = beta_from_theta(spec, theta);
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = model_mean(spec, beta, data[i].x);
      const double s = modeled_sigma(spec, beta, data[i]);
      if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
      const double z = (yobs[i] - mu) / s;
      terms[i] = 0.5 * z * z + std::log(s);
    }
    return pairwise_sum(terms);
  };
  const Eigen::VectorXd theta0 = theta_from_beta(spec, init);
  const OptimResult opt = minimize_multistart(neg_log_like, theta0, Bounds::unbounded(theta0.size()), options);
  BaselineResult res{Method::MAP, beta_from_theta(spec, opt.x), opt.converged, {}};
  res.diagnostics["neg_log_likelihood"] = opt.f;
  res.diagnostics["iterations"] = static_cast<double>(opt.iterations);
  return res;
}

BaselineResult fit_tls(const ModelSpec& spec, const Dataset& data) {
  if (!method_supports(Method::TLS, spec.form())) {
    throw std::invalid_argument("TLS is not defined for the power-law form");
  }
  const LinearProblem lp = linear_problem(spec, data);
  const bool intercept = spec.form() != ModelForm::SimpleLinear;
  const Eigen::Index p = static_cast<Eigen::Index>(spec.n_predictors());
  const Eigen::Index n = lp.X.rows();
  Eigen::MatrixXd A(n, p + 1);
  A.leftCols(p) = intercept ? lp.X.rightCols(p) : lp.X;
  A.col(p) = lp.y;
  Eigen::RowVectorXd means = Eigen::RowVectorXd::Zero(p + 1);
  if (intercept) {
    means = A.colwise().mean();
    A.rowwise() -= means;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv.size() < p + 1) throw std::runtime_error("TLS: fewer rows than unknowns");
  const double smallest = sv[p];
  const double next = sv[p - 1 >= 0 ? p - 1 : 0];
  BaselineResult res{Method::TLS, Eigen::VectorXd(), true, {}};
  if (p >= 1 && next - smallest <= 1e-12 * std::max(next, 1e-300)) {
    throw std::runtime_error("TLS: smallest singular value is repeated; the fit is not unique");
  }
  const Eigen::VectorXd v = svd.matrixV().col(p);
  if (std::abs(v[p]) <= 1e-14 * v.norm()) {
    throw std::runtime_error("TLS: null direction is orthogonal to the response; no finite solution");
  }
  const Eigen::VectorXd slopes = -v.head(p) / v[p];
  Eigen::VectorXd coef(lp.X.cols());
  if (intercept) {
    coef[0] = means[p] - means.head(p).dot(slopes.transpose());
    coef.tail(p) = slopes;
  } else {
    coef = slopes;
  }
  res.beta = to_beta(lp, coef);
  res.diagnostics["smallest_singular_value"] = smallest;
  return res;
}

BaselineResult fit_rob(const ModelSpec& spec, const Dataset& data, const RobustOptions& options) {
  if (!method_supports(Method::ROB, spec.form())) {
    throw std::invalid_argument("robust IRLS is not defined for the power-law form");
  }
  const LinearProblem lp = linear_problem(spec, data);
  const Eigen::Index n = lp.X.rows();
  const Eigen::Index p = lp.X.cols();
  Eigen::VectorXd b = solve_ls(lp.X, lp.y);

  // Leverage adjustment r / sqrt(1 - h) from the unweighted design.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(lp.X);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  Eigen::VectorXd adj(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = std::min(Q.row(i).squaredNorm(), 1.0 - 1e-12);
    adj[i] = 1.0 / std::sqrt(1.0 - h);
  }
  const double s_floor = std::max(1e-6 * sample_sd(lp.y), std::numeric_limits<double>::min());

  bool converged = false;
  std::size_t it = 0;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  for (; it < options.max_iter; ++it) {
    const Eigen::VectorXd r = (lp.y - lp.X * b).cwiseProduct(adj);
    std::vector<double> rv(r.data(), r.data() + n);
    const double med = median(rv);
    for (double& v : rv) v = std::abs(v - med);
    const double s = std::max(median(rv) / 0.6745, s_floor);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = r[i] / (options.tuning * s);
      w[i] = std::abs(u) < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
    }
    const Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::VectorXd b_new;
    try {
      b_new = solve_ls(sw.asDiagonal() * lp.X, sw.cwiseProduct(lp.y));
    } catch (const std::runtime_error&) {
      break;
    }
    const double change = (b_new - b).lpNorm<Eigen::Infinity>();
    b = b_new;
    if (change <= options.tolerance * std::max(b.lpNorm<Eigen::Infinity>(), 1.0)) {
      converged = true;
      ++it;
      break;
    }
  }
  BaselineResult res{Method::ROB, to_beta(lp, b), converged, {}};
  res.diagnostics["iterations"] = static_cast<double>(it);
  res.diagnostics["zero_weight_rows"] = static_cast<double>((w.array() == 0.0).count());
  return res;
}

BaselineResult fit_baseline(Method method, const ModelSpec& spec, const Dataset& data, const OptimOptions& options) {
  switch (method) {
    case Method::OLS: return fit_ols(spec, data);
    case Method::MAP: return fit_map(spec, data, options);
    case Method::TLS: return fit_tls(spec, data);
    case Method::ROB: return fit_rob(spec, data);
    case Method::GLS: break;
  }
  throw std::invalid_argument("fit_baseline: GLS is not a baseline");
}

}  // namespace geols
