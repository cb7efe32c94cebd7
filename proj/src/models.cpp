#include "geols/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace geols {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) {
    throw std::domain_error(std::string("nonpositive ") + what + " passed to a multiplicative model");
  }
}

}  // namespace

ModelForm parse_model_form(std::string_view name) {
  if (name == "linear") return ModelForm::SimpleLinear;
  if (name == "affine") return ModelForm::AffineLinear;
  if (name == "loglinear") return ModelForm::LogLinear;
  if (name == "powerlaw") return ModelForm::PowerLaw;
  throw std::invalid_argument("unknown model form '" + std::string(name) + "'");
}

std::string_view to_string(ModelForm form) {
  switch (form) {
    case ModelForm::SimpleLinear: return "linear";
    case ModelForm::AffineLinear: return "affine";
    case ModelForm::LogLinear: return "loglinear";
    case ModelForm::PowerLaw: return "powerlaw";
  }
  return "unknown";
}

ModelSpec::ModelSpec(ModelForm form, std::size_t n_predictors) : form_(form), n_predictors_(n_predictors) {
  if (n_predictors == 0) throw std::invalid_argument("ModelSpec: need at least one predictor");
  if (form == ModelForm::SimpleLinear && n_predictors != 1) {
    throw std::invalid_argument("ModelSpec: simple-linear takes exactly one predictor");
  }
}

std::size_t ModelSpec::coefficient_count() const noexcept {
  return form_ == ModelForm::SimpleLinear ? 1 : n_predictors_ + 1;
}

std::vector<std::string> ModelSpec::coefficient_names() const {
  if (form_ == ModelForm::SimpleLinear) return {"beta"};
  std::vector<std::string> names;
  for (std::size_t k = 0; k <= n_predictors_; ++k) names.push_back("beta" + std::to_string(k));
  return names;
}

void ModelSpec::check_coefficients(const Eigen::VectorXd& beta) const {
  if (static_cast<std::size_t>(beta.size()) != coefficient_count()) {
    throw std::invalid_argument("coefficient vector has length " + std::to_string(beta.size()) +
                                ", model expects " + std::to_string(coefficient_count()));
  }
}

Observation Observation::from_relative(std::string group, double y, double rel_err_y, std::vector<double> x,
                                       std::span<const double> rel_err_x) {
  if (rel_err_x.size() != x.size()) throw std::invalid_argument("Observation: error bar count mismatch");
  Observation obs;
  obs.y = y;
  obs.sigma_y = rel_err_y * std::abs(y);
  obs.sigma_x.resize(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) obs.sigma_x[k] = rel_err_x[k] * std::abs(x[k]);
  obs.x = std::move(x);
  obs.group = std::move(group);
  return obs;
}

double Observation::rel_err_y() const {
  if (sigma_y == 0.0) return 0.0;
  if (y == 0.0) throw std::domain_error("relative error undefined for a zero response");
  return sigma_y / std::abs(y);
}

double Observation::rel_err_x(std::size_t k) const {
  if (sigma_x.at(k) == 0.0) return 0.0;
  if (x[k] == 0.0) throw std::domain_error("relative error undefined for a zero predictor");
  return sigma_x[k] / std::abs(x[k]);
}

Dataset::Dataset(std::vector<Observation> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("Dataset: no observations");
  const std::size_t p = rows_.front().x.size();
  if (p == 0) throw std::invalid_argument("Dataset: observations need at least one predictor");
  std::map<std::string, std::size_t> labels;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Observation& o = rows_[i];
    if (o.x.size() != p || o.sigma_x.size() != p) {
      throw std::invalid_argument("Dataset: row " + std::to_string(i) + " has inconsistent predictor count");
    }
    bool finite = std::isfinite(o.y) && std::isfinite(o.sigma_y) && o.sigma_y >= 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      finite = finite && std::isfinite(o.x[k]) && std::isfinite(o.sigma_x[k]) && o.sigma_x[k] >= 0.0;
    }
    if (!finite) {
      throw std::invalid_argument("Dataset: row " + std::to_string(i) +
                                  " has a non-finite value or a negative error bar");
    }
    labels.emplace(o.group, 0);
  }
  std::size_t g = 0;
  for (auto& [label, index] : labels) {
    index = g++;
    groups_.push_back(label);
  }
  group_of_row_.reserve(rows_.size());
  for (const Observation& o : rows_) group_of_row_.push_back(labels.at(o.group));
}

std::size_t Dataset::group_size(std::size_t g) const {
  return static_cast<std::size_t>(std::count(group_of_row_.begin(), group_of_row_.end(), g));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Observation> picked;
  picked.reserve(rows.size());
  for (std::size_t i : rows) picked.push_back(rows_.at(i));
  return Dataset(std::move(picked));
}

void Dataset::check_compatible(const ModelSpec& spec) const {
  if (n_predictors() != spec.n_predictors()) {
    throw std::invalid_argument("dataset has " + std::to_string(n_predictors()) + " predictors, model expects " +
                                std::to_string(spec.n_predictors()));
  }
  if (!spec.multiplicative()) return;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    bool ok = rows_[i].y > 0.0;
    for (double v : rows_[i].x) ok = ok && v > 0.0;
    if (!ok) {
      throw std::domain_error("row " + std::to_string(i) + ": " + std::string(to_string(spec.form())) +
                              " model needs strictly positive response and predictors");
    }
  }
}

double model_mean(const ModelSpec& spec, const Eigen::VectorXd& beta, std::span<const double> x) {
  spec.check_coefficients(beta);
  if (x.size() != spec.n_predictors()) {
    throw std::invalid_argument("predictor vector has length " + std::to_string(x.size()) + ", model expects " +
                                std::to_string(spec.n_predictors()));
  }
  switch (spec.form()) {
    case ModelForm::SimpleLinear:
      return beta[0] * x[0];
    case ModelForm::AffineLinear: {
      double m = beta[0];
      for (std::size_t k = 0; k < x.size(); ++k) m += beta[k + 1] * x[k];
      return m;
    }
    case ModelForm::PowerLaw: {
      double m = beta[0];
      for (std::size_t k = 0; k < x.size(); ++k) {
        require_positive(x[k], "predictor");
        m *= std::pow(x[k], beta[k + 1]);
      }
      return m;
    }
    case ModelForm::LogLinear: {
      require_positive(beta[0], "prefactor");
      double m = std::log(beta[0]);
      for (std::size_t k = 0; k < x.size(); ++k) {
        require_positive(x[k], "predictor");
        m += beta[k + 1] * std::log(x[k]);
      }
      return m;
    }
  }
  return 0.0;
}

double modeled_sigma(const ModelSpec& spec, const Eigen::VectorXd& beta, const Observation& obs) {
  spec.check_coefficients(beta);
  const std::size_t p = obs.x.size();
  if (p != spec.n_predictors()) throw std::invalid_argument("observation predictor count does not match model");
  double var = 0.0;
  switch (spec.form()) {
    case ModelForm::SimpleLinear:
      var = obs.sigma_y * obs.sigma_y + beta[0] * beta[0] * obs.sigma_x[0] * obs.sigma_x[0];
      break;
    case ModelForm::AffineLinear:
      var = obs.sigma_y * obs.sigma_y;
      for (std::size_t k = 0; k < p; ++k) var += beta[k + 1] * beta[k + 1] * obs.sigma_x[k] * obs.sigma_x[k];
      break;
    case ModelForm::PowerLaw: {
      const double mu = model_mean(spec, beta, obs.x);
      double rel = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        const double r = obs.sigma_x[k] / obs.x[k];
        rel += beta[k + 1] * beta[k + 1] * r * r;
      }
      var = obs.sigma_y * obs.sigma_y + mu * mu * rel;
      break;
    }
    case ModelForm::LogLinear: {
      require_positive(obs.y, "response");
      const double ry = obs.sigma_y / obs.y;
      var = ry * ry;
      for (std::size_t k = 0; k < p; ++k) {
        require_positive(obs.x[k], "predictor");
        const double r = obs.sigma_x[k] / obs.x[k];
        var += beta[k + 1] * beta[k + 1] * r * r;
      }
      break;
    }
  }
  return std::sqrt(var);
}

GaussianPoint modeled_distribution(const ModelSpec& spec, const Eigen::VectorXd& beta, const Observation& obs) {
  return {model_mean(spec, beta, obs.x), modeled_sigma(spec, beta, obs)};
}

double observed_response(const ModelSpec& spec, const Observation& obs) {
  if (spec.form() == ModelForm::LogLinear) {
    require_positive(obs.y, "response");
    return std::log(obs.y);
  }
  return obs.y;
}

Dataset log_transform_dataset(const Dataset& data) {
  std::vector<Observation> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Observation& o = data[i];
    bool ok = o.y > 0.0;
    for (double v : o.x) ok = ok && v > 0.0;
    if (!ok) throw std::domain_error("log_transform_dataset: nonpositive value in row " + std::to_string(i));
    Observation t;
    t.group = o.group;
    t.y = std::log(o.y);
    t.sigma_y = o.sigma_y / o.y;
    t.x.resize(o.x.size());
    t.sigma_x.resize(o.x.size());
    for (std::size_t k = 0; k < o.x.size(); ++k) {
      t.x[k] = std::log(o.x[k]);
      t.sigma_x[k] = o.sigma_x[k] / o.x[k];
    }
    out.push_back(std::move(t));
  }
  return Dataset(std::move(out));
}

}  // namespace geols
