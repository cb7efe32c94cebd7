#pragma once

// Regression model forms and the Gaussian error propagation that turns one
// observation into its modeled distribution N(mu_mod, sigma_mod^2).

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "geols/manifold.hpp"

namespace geols {

enum class ModelForm { SimpleLinear, AffineLinear, LogLinear, PowerLaw };

/// "linear", "affine", "loglinear", "powerlaw".
ModelForm parse_model_form(std::string_view name);
std::string_view to_string(ModelForm form);

class ModelSpec {
public:
  ModelSpec(ModelForm form, std::size_t n_predictors);

  ModelForm form() const noexcept { return form_; }
  std::size_t n_predictors() const noexcept { return n_predictors_; }
  /// 1 for simple-linear, P + 1 otherwise (leading coefficient is the
  /// intercept or the multiplicative prefactor).
  std::size_t coefficient_count() const noexcept;
  bool multiplicative() const noexcept {
    return form_ == ModelForm::LogLinear || form_ == ModelForm::PowerLaw;
  }
  /// Names used in reports: "beta" for simple-linear, "beta0".."betaP" otherwise.
  std::vector<std::string> coefficient_names() const;

  void check_coefficients(const Eigen::VectorXd& beta) const;

private:
  ModelForm form_;
  std::size_t n_predictors_;
};

/// One measurement row. Error bars are stored as absolute standard deviations;
/// relative error bars are converted using the measured value.
struct Observation {
  double y = 0.0;
  std::vector<double> x;
  double sigma_y = 0.0;
  std::vector<double> sigma_x;
  std::string group;

  static Observation from_relative(std::string group, double y, double rel_err_y,
                                   std::vector<double> x, std::span<const double> rel_err_x);
  double rel_err_y() const;
  double rel_err_x(std::size_t k) const;
};

class Dataset {
public:
  /// Throws std::invalid_argument for an empty row list, inconsistent predictor
  /// counts, negative error bars or non-finite values.
  explicit Dataset(std::vector<Observation> rows);

  const std::vector<Observation>& rows() const noexcept { return rows_; }
  const Observation& operator[](std::size_t i) const { return rows_[i]; }
  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t n_predictors() const noexcept { return rows_.front().x.size(); }

  /// Distinct group labels in lexicographic order.
  const std::vector<std::string>& groups() const noexcept { return groups_; }
  std::size_t group_index(std::size_t row) const { return group_of_row_[row]; }
  std::size_t group_size(std::size_t g) const;

  Dataset subset(std::span<const std::size_t> rows) const;

  /// Positivity requirements of the multiplicative forms; the error message
  /// names the offending row.
  void check_compatible(const ModelSpec& spec) const;

private:
  std::vector<Observation> rows_;
  std::vector<std::string> groups_;
  std::vector<std::size_t> group_of_row_;
};

/// simple-linear: beta*x; affine: b0 + sum b_k x_k; power-law: b0 prod x_k^b_k;
/// log-linear: ln b0 + sum b_k ln x_k.
double model_mean(const ModelSpec& spec, const Eigen::VectorXd& beta, std::span<const double> x);

/// Gaussian error propagation. For the log-linear form the result is a
/// log-space standard deviation built from relative error bars.
double modeled_sigma(const ModelSpec& spec, const Eigen::VectorXd& beta, const Observation& obs);

GaussianPoint modeled_distribution(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                   const Observation& obs);

/// The measured response on the scale the model predicts (ln y for log-linear).
double observed_response(const ModelSpec& spec, const Observation& obs);

/// ln of every response and predictor; error bars become log-space sigmas
/// sigma/value. Throws std::domain_error naming the row for nonpositive values.
Dataset log_transform_dataset(const Dataset& data);

}  // namespace geols
