#include "geols/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace geols {
namespace {

double relative_draw(RandomStream& rng, double value, double level, std::size_t& rejections) {
  if (level == 0.0) return value;
  while (true) {
    const double v = value * (1.0 + level * rng.normal());
    if (v > 0.0) return v;
    ++rejections;
  }
}

std::vector<std::size_t> choose_distinct(RandomStream& rng, std::vector<std::size_t> pool, std::size_t count) {
  if (count > pool.size()) throw std::invalid_argument("cannot choose more outliers than candidate rows");
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "outlier-1d") return GeneratorKind::Outlier1D;
  if (name == "outlier-multi") return GeneratorKind::OutlierMulti;
  if (name == "log-1d") return GeneratorKind::Log1D;
  if (name == "log-multi") return GeneratorKind::LogMulti;
  if (name == "surrogate-itpa") return GeneratorKind::SurrogateItpa;
  throw std::invalid_argument("unknown generator kind '" + std::string(name) + "'");
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Outlier1D: return "outlier-1d";
    case GeneratorKind::OutlierMulti: return "outlier-multi";
    case GeneratorKind::Log1D: return "log-1d";
    case GeneratorKind::LogMulti: return "log-multi";
    case GeneratorKind::SurrogateItpa: return "surrogate-itpa";
  }
  return "unknown";
}

PredictorTable PredictorTable::ungrouped(std::vector<std::vector<double>> rows) {
  if (rows.empty()) throw std::invalid_argument("predictor table is empty");
  for (const auto& r : rows) {
    if (r.size() != rows.front().size() || r.empty()) throw std::invalid_argument("predictor table is ragged");
  }
  PredictorTable t;
  t.groups.assign(rows.size(), "all");
  t.x = std::move(rows);
  return t;
}

std::string machine_label(std::size_t g, std::size_t n_groups) {
  const std::size_t width = std::to_string(n_groups).size();
  std::string digits = std::to_string(g + 1);
  return "M" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

PredictorTable surrogate_predictors(const PredictorDesign& d, std::uint64_t seed) {
  const std::size_t p = d.base.size();
  if (d.n_rows == 0 || d.n_groups == 0 || p == 0 || d.slope.size() != p || d.jitter.size() != p) {
    throw std::invalid_argument("surrogate_predictors: inconsistent design");
  }
  RandomStream rng(seed);
  PredictorTable t;
  const double span = d.decades * std::log(10.0);
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    const std::size_t g = i % d.n_groups;
    const double z = d.n_groups > 1 ? span * static_cast<double>(g) / static_cast<double>(d.n_groups - 1) : 0.0;
    std::vector<double> row(p);
    for (std::size_t k = 0; k < p; ++k) {
      row[k] = d.base[k] * std::exp(d.slope[k] * z + d.jitter[k] * rng.normal());
    }
    t.x.push_back(std::move(row));
    t.groups.push_back(machine_label(g, d.n_groups));
  }
  return t;
}

ExperimentGenerator::ExperimentGenerator(GeneratorKind kind, ModelSpec truth_model, Eigen::VectorXd true_beta,
                                         PredictorTable predictors, NoiseSpec noise,
                                         std::optional<OutlierSpec> outliers)
    : kind_(kind),
      model_(truth_model),
      beta_(std::move(true_beta)),
      predictors_(std::move(predictors)),
      noise_(std::move(noise)),
      outliers_(std::move(outliers)) {
  model_.check_coefficients(beta_);
  if (predictors_.size() == 0 || predictors_.groups.size() != predictors_.size()) {
    throw std::invalid_argument("ExperimentGenerator: predictor rows and labels disagree");
  }
  if (noise_.x.size() != model_.n_predictors()) {
    throw std::invalid_argument("ExperimentGenerator: one predictor noise level per predictor required");
  }
  if (outliers_) {
    if (!(outliers_->factor_low > 1.0) || outliers_->factor_high < outliers_->factor_low) {
      throw std::invalid_argument("ExperimentGenerator: outlier factors must lie in (1, inf)");
    }
    const std::size_t pool = outliers_->candidates.empty() ? predictors_.size() : outliers_->candidates.size();
    if (outliers_->count >= predictors_.size() || outliers_->count > pool) {
      throw std::invalid_argument("ExperimentGenerator: outlier count must be below the dataset size");
    }
    for (std::size_t c : outliers_->candidates) {
      if (c >= predictors_.size()) throw std::invalid_argument("ExperimentGenerator: outlier candidate out of range");
    }
  }
}

GeneratedData ExperimentGenerator::generate(std::uint64_t seed) const {
  RandomStream rng(seed);
  const std::size_t n = predictors_.size();
  const std::size_t p = model_.n_predictors();
  std::size_t rejections = 0;
  std::vector<Observation> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double>& xi = predictors_.x[i];
    const double eta = model_.form() == ModelForm::LogLinear ? std::exp(model_mean(model_, beta_, xi))
                                                             : model_mean(model_, beta_, xi);
    Observation& o = rows[i];
    o.group = predictors_.groups[i];
    o.x.resize(p);
    o.sigma_x.resize(p);
    for (std::size_t k = 0; k < p; ++k) {
      if (noise_.relative) {
        o.x[k] = relative_draw(rng, xi[k], noise_.x[k], rejections);
        o.sigma_x[k] = noise_.x[k] * o.x[k];
      } else {
        o.x[k] = xi[k] + noise_.x[k] * rng.normal();
        o.sigma_x[k] = noise_.x[k];
      }
    }
    if (noise_.relative) {
      o.y = relative_draw(rng, eta, noise_.y, rejections);
      o.sigma_y = noise_.y * o.y;
    } else {
      o.y = eta + noise_.y * rng.normal();
      o.sigma_y = noise_.y;
    }
  }

  GeneratedData out{Dataset({rows.front()}), beta_, {}, {}, rejections, kind_, seed};
  if (outliers_ && outliers_->count > 0) {
    std::vector<std::size_t> pool = outliers_->candidates;
    if (pool.empty()) {
      pool.resize(n);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
    }
    out.outlier_indices = choose_distinct(rng, pool, outliers_->count);
    for (std::size_t idx : out.outlier_indices) {
      const double factor = rng.uniform(outliers_->factor_low, outliers_->factor_high);
      out.outlier_factors.push_back(factor);
      rows[idx].y *= factor;
      if (noise_.relative) rows[idx].sigma_y = noise_.y * rows[idx].y;
    }
    std::vector<std::size_t> order(out.outlier_indices.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out.outlier_indices[a] < out.outlier_indices[b]; });
    std::vector<std::size_t> idx_sorted;
    std::vector<double> f_sorted;
    for (auto o : order) {
      idx_sorted.push_back(out.outlier_indices[o]);
      f_sorted.push_back(out.outlier_factors[o]);
    }
    out.outlier_indices = std::move(idx_sorted);
    out.outlier_factors = std::move(f_sorted);
  }
  out.data = Dataset(std::move(rows));
  return out;
}

const std::vector<double>& outlier_1d_grid() {
  static const std::vector<double> grid = {2, 5, 9, 14, 20, 27, 33, 40, 46, 50};
  return grid;
}

const std::vector<double>& log_1d_grid() {
  static const std::vector<double> grid = {2, 5, 9, 14, 20, 27, 33, 40, 46, 55};
  return grid;
}

namespace {

PredictorTable single_column(const std::vector<double>& grid) {
  std::vector<std::vector<double>> rows;
  for (double v : grid) rows.push_back({v});
  return PredictorTable::ungrouped(std::move(rows));
}

}  // namespace

ExperimentGenerator outlier_1d_generator(const Outlier1dOptions& opt) {
  std::optional<OutlierSpec> outliers;
  if (opt.outlier) outliers = OutlierSpec{1, 1.5, 2.5, {7, 8, 9}};
  Eigen::VectorXd beta(1);
  beta << opt.beta;
  return ExperimentGenerator(GeneratorKind::Outlier1D, ModelSpec(ModelForm::SimpleLinear, 1), beta,
                             single_column(outlier_1d_grid()), NoiseSpec{false, opt.sigma_y, {opt.sigma_x}},
                             outliers);
}

GeneratedData gen_outlier_1d(std::uint64_t seed, const Outlier1dOptions& options) {
  return outlier_1d_generator(options).generate(seed);
}

ExperimentGenerator log_1d_generator(const Log1dOptions& opt) {
  Eigen::VectorXd beta(2);
  beta << opt.beta0, opt.beta1;
  return ExperimentGenerator(GeneratorKind::Log1D, ModelSpec(ModelForm::PowerLaw, 1), beta,
                             single_column(log_1d_grid()), NoiseSpec{true, opt.rel_noise, {opt.rel_noise}},
                             std::nullopt);
}

GeneratedData gen_log_1d(std::uint64_t seed, const Log1dOptions& options) {
  return log_1d_generator(options).generate(seed);
}

ExperimentGenerator outlier_multi_generator(const PredictorTable& predictors, const Eigen::VectorXd& beta,
                                            const OutlierMultiOptions& opt) {
  std::optional<OutlierSpec> outliers;
  if (opt.outlier_count > 0) outliers = OutlierSpec{opt.outlier_count, 1.5, 2.5, {}};
  return ExperimentGenerator(GeneratorKind::OutlierMulti, ModelSpec(ModelForm::AffineLinear, opt.rel_x.size()), beta,
                             predictors, NoiseSpec{true, opt.rel_y, opt.rel_x}, outliers);
}

GeneratedData gen_outlier_multi(const PredictorTable& predictors, const Eigen::VectorXd& beta, std::uint64_t seed,
                                const OutlierMultiOptions& options) {
  return outlier_multi_generator(predictors, beta, options).generate(seed);
}

ExperimentGenerator log_multi_generator(const PredictorTable& predictors, const Eigen::VectorXd& beta,
                                        const LogMultiOptions& opt) {
  return ExperimentGenerator(GeneratorKind::LogMulti, ModelSpec(ModelForm::PowerLaw, opt.rel_x.size()), beta,
                             predictors, NoiseSpec{true, opt.rel_y, opt.rel_x}, std::nullopt);
}

GeneratedData gen_log_multi(const PredictorTable& predictors, const Eigen::VectorXd& beta, std::uint64_t seed,
                            const LogMultiOptions& options) {
  return log_multi_generator(predictors, beta, options).generate(seed);
}

GeneratedData gen_surrogate_itpa(std::size_t n_rows, std::size_t n_groups, std::uint64_t seed,
                                 const SurrogateOptions& opt) {
  if (n_rows < 2 || n_groups == 0 || n_groups > n_rows) {
    throw std::invalid_argument("gen_surrogate_itpa: need n_rows >= 2 and 1 <= n_groups <= n_rows");
  }
  const std::size_t p = opt.x_low.size();
  if (opt.beta.size() != p + 1 || opt.rel_x.size() != p) {
    throw std::invalid_argument("gen_surrogate_itpa: coefficient or noise vector has the wrong length");
  }
  if (!(opt.noise_low >= 0.0) || opt.noise_high < opt.noise_low) {
    throw std::invalid_argument("gen_surrogate_itpa: invalid group noise range");
  }
  if (!(opt.decades > 0.0)) throw std::invalid_argument("gen_surrogate_itpa: decades must be positive");
  for (double lo : opt.x_low) {
    if (!(lo > 0.0)) throw std::invalid_argument("gen_surrogate_itpa: x_low must be positive");
  }
  PredictorTable truth;
  RandomStream x_rng(derive_seed(seed, 1));
  const double span = opt.decades * std::log(10.0);
  for (std::size_t i = 0; i < n_rows; ++i) {
    std::vector<double> row(p);
    for (std::size_t k = 0; k < p; ++k) row[k] = opt.x_low[k] * std::exp(span * x_rng.uniform());
    truth.x.push_back(std::move(row));
    truth.groups.push_back(machine_label(i % n_groups, n_groups));
  }

  RandomStream group_rng(derive_seed(seed, 2));
  std::vector<double> offset(n_groups);
  std::vector<double> noise(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) {
    offset[g] = std::exp(opt.offset_sd * group_rng.normal());
    noise[g] = group_rng.uniform(opt.noise_low, opt.noise_high);
  }

  const ModelSpec model(ModelForm::PowerLaw, p);
  const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(opt.beta.data(), static_cast<Eigen::Index>(p + 1));
  RandomStream rng(derive_seed(seed, 3));
  std::size_t rejections = 0;
  std::vector<Observation> rows(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    const std::size_t g = i % n_groups;
    Observation& o = rows[i];
    o.group = truth.groups[i];
    o.x.resize(p);
    o.sigma_x.resize(p);
    for (std::size_t k = 0; k < p; ++k) {
      o.x[k] = relative_draw(rng, truth.x[i][k], opt.rel_x[k], rejections);
      o.sigma_x[k] = opt.rel_x[k] * o.x[k];
    }
    o.y = relative_draw(rng, offset[g] * model_mean(model, beta, truth.x[i]), noise[g], rejections);
    o.sigma_y = opt.rel_err_y * o.y;
  }
  return GeneratedData{Dataset(std::move(rows)), beta, {}, {}, rejections, GeneratorKind::SurrogateItpa, seed};
}

Eigen::VectorXd CoefficientGrid::point(std::size_t index) {
  if (index >= size()) throw std::out_of_range("coefficient grid index out of range");
  Eigen::VectorXd beta(4);
  std::size_t rest = index;
  for (int k = 3; k >= 1; --k) {
    beta[k] = static_cast<double>(rest % kSlopeCount + 1) / 10.0;
    rest /= kSlopeCount;
  }
  beta[0] = static_cast<double>(rest + 10) / 10.0;
  return beta;
}

std::vector<std::size_t> CoefficientGrid::sample(std::size_t n, std::uint64_t seed) {
  if (n > size()) throw std::invalid_argument("cannot sample more grid points than the grid holds");
  RandomStream rng(seed);
  std::vector<std::size_t> out;
  while (out.size() < n) {
    const std::size_t idx = rng.uniform_index(size());
    if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  }
  return out;
}

std::string generation_metadata_json(const GeneratedData& g) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(g.kind));
  j["seed"] = g.seed;
  j["true_beta"] = std::vector<double>(g.true_beta.data(), g.true_beta.data() + g.true_beta.size());
  j["outlier_indices"] = g.outlier_indices;
  j["outlier_factors"] = g.outlier_factors;
  j["rejections"] = g.rejections;
  j["rows"] = g.data.size();
  return j.dump(2) + "\n";
}

}  // namespace geols
