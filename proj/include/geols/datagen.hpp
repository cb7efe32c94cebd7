#pragma once

// Seeded synthetic data for the simulation studies and a grouped surrogate
// for scaling-law work. Every generator is a pure function of its parameters
// and seed.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "geols/models.hpp"
#include "geols/random.hpp"

namespace geols {

enum class GeneratorKind { Outlier1D, OutlierMulti, Log1D, LogMulti, SurrogateItpa };

/// "outlier-1d", "outlier-multi", "log-1d", "log-multi", "surrogate-itpa".
GeneratorKind parse_generator_kind(std::string_view name);
std::string_view to_string(GeneratorKind kind);

/// True (noise-free) predictor values plus group labels, one row per
/// observation.
struct PredictorTable {
  std::vector<std::vector<double>> x;
  std::vector<std::string> groups;

  std::size_t size() const noexcept { return x.size(); }
  /// Single group "all"; throws on an empty or ragged table.
  static PredictorTable ungrouped(std::vector<std::vector<double>> rows);
};

/// Grouped predictor layout: group g has size z_g spread evenly over
/// `decades` decades and ln x_k = ln base_k + slope_k z_g + jitter_k * N(0,1).
/// Row i belongs to group i mod n_groups.
struct PredictorDesign {
  std::size_t n_rows = 616;
  std::size_t n_groups = 8;
  double decades = 1.5;
  std::vector<double> base = {1.5, 1.0, 1.0};
  std::vector<double> slope = {0.4, 0.5, 0.4};
  std::vector<double> jitter = {0.12, 0.25, 0.15};
};

PredictorTable surrogate_predictors(const PredictorDesign& design, std::uint64_t seed);

/// Zero-padded labels "M01", "M02", ... so lexicographic order matches numbering.
std::string machine_label(std::size_t g, std::size_t n_groups);

struct NoiseSpec {
  /// Relative noise multiplies the true value by (1 + level * N(0,1)),
  /// redrawing nonpositive results; absolute noise adds level * N(0,1).
  bool relative = true;
  double y = 0.0;
  std::vector<double> x;
};

struct OutlierSpec {
  std::size_t count = 1;
  double factor_low = 1.5;
  double factor_high = 2.5;
  /// Rows eligible for outliers; empty means every row.
  std::vector<std::size_t> candidates;
};

struct GeneratedData {
  Dataset data;
  Eigen::VectorXd true_beta;
  std::vector<std::size_t> outlier_indices;
  std::vector<double> outlier_factors;
  std::size_t rejections = 0;
  GeneratorKind kind = GeneratorKind::Outlier1D;
  std::uint64_t seed = 0;
};

/// A fully specified data-generating process: noise-free response from the
/// model, measurement noise on every variable, optional multiplicative
/// outliers on the response.
class ExperimentGenerator {
public:
  ExperimentGenerator(GeneratorKind kind, ModelSpec truth_model, Eigen::VectorXd true_beta,
                      PredictorTable predictors, NoiseSpec noise, std::optional<OutlierSpec> outliers);

  GeneratorKind kind() const noexcept { return kind_; }
  const ModelSpec& truth_model() const noexcept { return model_; }
  const Eigen::VectorXd& true_beta() const noexcept { return beta_; }
  const PredictorTable& predictors() const noexcept { return predictors_; }
  const NoiseSpec& noise() const noexcept { return noise_; }
  const std::optional<OutlierSpec>& outliers() const noexcept { return outliers_; }

  GeneratedData generate(std::uint64_t seed) const;

private:
  GeneratorKind kind_;
  ModelSpec model_;
  Eigen::VectorXd beta_;
  PredictorTable predictors_;
  NoiseSpec noise_;
  std::optional<OutlierSpec> outliers_;
};

/// Fixed grids of the two single-predictor studies.
const std::vector<double>& outlier_1d_grid();
const std::vector<double>& log_1d_grid();

struct Outlier1dOptions {
  double beta = 3.0;
  double sigma_y = 2.0;
  double sigma_x = 0.5;
  bool outlier = true;
};
ExperimentGenerator outlier_1d_generator(const Outlier1dOptions& options = {});
GeneratedData gen_outlier_1d(std::uint64_t seed, const Outlier1dOptions& options = {});

struct Log1dOptions {
  double beta0 = 0.8;
  double beta1 = 1.4;
  double rel_noise = 0.4;
};
ExperimentGenerator log_1d_generator(const Log1dOptions& options = {});
GeneratedData gen_log_1d(std::uint64_t seed, const Log1dOptions& options = {});

/// Linear law beta0 + sum beta_k x_k, relative noise (4%, 1%, 3%; 15% on y)
/// and `outlier_count` rows with y scaled by U(1.5, 2.5).
struct OutlierMultiOptions {
  std::vector<double> rel_x = {0.04, 0.01, 0.03};
  double rel_y = 0.15;
  std::size_t outlier_count = 10;
};
ExperimentGenerator outlier_multi_generator(const PredictorTable& predictors, const Eigen::VectorXd& beta,
                                            const OutlierMultiOptions& options = {});
GeneratedData gen_outlier_multi(const PredictorTable& predictors, const Eigen::VectorXd& beta, std::uint64_t seed,
                                const OutlierMultiOptions& options = {});

/// Power law beta0 prod x_k^beta_k with relative noise (20%, 5%, 15%; 15% on y).
struct LogMultiOptions {
  std::vector<double> rel_x = {0.20, 0.05, 0.15};
  double rel_y = 0.15;
};
ExperimentGenerator log_multi_generator(const PredictorTable& predictors, const Eigen::VectorXd& beta,
                                        const LogMultiOptions& options = {});
GeneratedData gen_log_multi(const PredictorTable& predictors, const Eigen::VectorXd& beta, std::uint64_t seed,
                            const LogMultiOptions& options = {});

/// Grouped power-law data standing in for a multi-machine scaling database.
/// Rows are assigned to groups round-robin. Each group gets a multiplicative
/// offset exp(N(0, offset_sd)) and its own response noise level drawn from
/// [noise_low, noise_high]; recorded error bars are the nominal levels in
/// `rel_err_y` and `rel_x`.
struct SurrogateOptions {
  std::vector<double> beta = {0.05, 0.7, 0.8, 0.95};
  /// Predictor k is log-uniform on [x_low[k], x_low[k] * 10^decades], drawn
  /// independently for every row.
  std::vector<double> x_low = {0.5, 2.0, 5.0};
  double decades = 1.5;
  std::vector<double> rel_x = {0.04, 0.01, 0.03};
  double rel_err_y = 0.15;
  double noise_low = 0.15;
  double noise_high = 0.38;
  double offset_sd = 0.1;
};
GeneratedData gen_surrogate_itpa(std::size_t n_rows, std::size_t n_groups, std::uint64_t seed,
                                 const SurrogateOptions& options = {});

/// Coefficient grid: beta0 in {1.0, 1.1, ..., 20.0}, beta1..3 in {0.1, ..., 2.0}.
struct CoefficientGrid {
  static constexpr std::size_t kBeta0Count = 191;
  static constexpr std::size_t kSlopeCount = 20;
  static std::size_t size() { return kBeta0Count * kSlopeCount * kSlopeCount * kSlopeCount; }
  static Eigen::VectorXd point(std::size_t index);
  /// n distinct grid indices drawn uniformly without replacement.
  static std::vector<std::size_t> sample(std::size_t n, std::uint64_t seed);
};

/// Sidecar JSON: kind, seed, true beta, outlier indices and factors, rejections.
std::string generation_metadata_json(const GeneratedData& generated);

}  // namespace geols
