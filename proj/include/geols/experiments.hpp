#pragma once

// Study orchestration: Monte Carlo tables, relative-error histograms over the
// coefficient grid, the grouped scaling-law pipeline with bootstrap intervals,
// and error-bar sensitivity reruns.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "geols/baselines.hpp"
#include "geols/datagen.hpp"
#include "geols/gls.hpp"
#include "geols/optimize.hpp"
#include "geols/resample.hpp"

namespace geols {

struct MethodReport {
  std::string method;
  ResampleReport summary;
  /// Fit on the full dataset (pipeline runs); empty otherwise.
  std::vector<double> point_estimate;
};

/// 41 equal bins on [-100%, 100%] plus underflow and overflow.
struct Histogram {
  static constexpr std::size_t kBins = 41;
  static constexpr double kLow = -100.0;
  static constexpr double kHigh = 100.0;

  std::string method;
  std::string parameter;
  std::vector<double> mass;  // kBins entries
  double underflow = 0.0;
  double overflow = 0.0;
  std::size_t count = 0;
  /// Share of values with |error| <= 20%.
  double within_20 = 0.0;

  static Histogram build(std::string method, std::string parameter, const std::vector<double>& rel_errors_pct);
  double bin_low(std::size_t i) const;
  double bin_high(std::size_t i) const;
};

struct GroupSigma {
  std::string method;
  std::string group;
  double sigma_obs = 0.0;
  double sd = 0.0;
  /// sigma_obs as a relative error on the response.
  double rel_err = 0.0;
};

struct PredictionRow {
  std::string method;
  std::vector<double> x;
  double value = 0.0;
  double sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct ShiftRow {
  std::string method;
  std::string quantity;
  double baseline = 0.0;
  double modified = 0.0;
  double relative_change = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  std::map<std::string, std::string> metadata;
  std::vector<MethodReport> methods;
  std::vector<Histogram> histograms;
  std::vector<GroupSigma> group_sigma;
  std::vector<PredictionRow> predictions;
  std::vector<ShiftRow> shifts;

  const MethodReport& method(std::string_view name) const;
  const Histogram& histogram(std::string_view method, std::string_view parameter) const;
};

struct ExperimentOptions {
  std::uint64_t seed = 42;
  std::size_t n_runs = 100;
  OptimOptions optim;
  ParallelOptions parallel;
};

/// Single-predictor outlier study, all five methods. The GLS summary holds
/// beta, sigma_obs and the mean modeled sigma of each replicate.
ExperimentReport run_table1(const ExperimentOptions& options = {});

/// Single-predictor power law fitted in log space, all five methods.
ExperimentReport run_table2(const ExperimentOptions& options = {});

struct HistogramOptions {
  std::size_t n_grid_samples = 50;
  std::size_t replicates = 10;
  /// Used when `predictors` is empty.
  PredictorDesign design;
  std::optional<PredictorTable> predictors;
  std::vector<Method> methods = {Method::GLS, Method::OLS, Method::MAP, Method::TLS, Method::ROB};
  /// Per-group sigma_obs for GLS when predictors carry group labels.
  bool per_group_sigma = true;
  OutlierMultiOptions outlier_multi;
  LogMultiOptions log_multi;
};

/// Averages each method's estimates over the replicates of a grid point and
/// histograms (beta - beta_hat) / beta * 100 across grid points.
ExperimentReport run_histograms(GeneratorKind kind, const HistogramOptions& hist, const ExperimentOptions& options = {});

struct PipelineOptions {
  std::size_t n_boot = 100;
  std::vector<std::vector<double>> prediction_points;
  std::vector<Method> methods = {Method::GLS, Method::OLS, Method::MAP};
};

/// Full-data fits of the requested methods for any model form, with bootstrap
/// intervals when n_boot >= 2 (n_boot = 0 skips the bootstrap).
ExperimentReport run_fit(const Dataset& data, ModelForm form, const PipelineOptions& pipeline, bool per_group_sigma,
                         const ExperimentOptions& options = {});

/// Full-data fits plus bootstrap intervals; GLS uses one sigma_obs per group.
/// Throws std::invalid_argument for a method the model form does not support.
ExperimentReport run_scaling_pipeline(const Dataset& data, ModelForm mode, const PipelineOptions& pipeline,
                                      const ExperimentOptions& options = {});

struct SensitivityOptions {
  /// Multiplies every error bar; ignored when `averaged_errors` is set.
  double scale_factor = 2.0;
  /// Replace each variable's relative error bars by their dataset average.
  bool averaged_errors = false;
  std::vector<std::vector<double>> prediction_points;
};

/// Refits MAP and GLS with modified error bars and reports the shifts of the
/// coefficients, predictions and GLS group sigmas.
ExperimentReport run_errorbar_sensitivity(const Dataset& data, ModelForm mode, const SensitivityOptions& sensitivity,
                                          const ExperimentOptions& options = {});

/// Copy of `data` with error bars modified as in run_errorbar_sensitivity.
Dataset modify_error_bars(const Dataset& data, const SensitivityOptions& sensitivity);

/// Max-norm difference between the coefficient vectors a method estimates in
/// log-linear and in power-law mode on the same data.
double cross_mode_difference(const Dataset& data, Method method, const ExperimentOptions& options = {});

/// Response-scale prediction (exp of the log-space mean for log-linear).
double predict_response(const ModelSpec& spec, const Eigen::VectorXd& beta, const std::vector<double>& x);

}  // namespace geols
