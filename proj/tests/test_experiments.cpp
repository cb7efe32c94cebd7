#include <cmath>

#include <gtest/gtest.h>

#include "geols/experiments.hpp"

using namespace geols;

namespace {

ExperimentOptions small(std::size_t runs = 10) {
  ExperimentOptions o;
  o.seed = 5;
  o.n_runs = runs;
  return o;
}

}  // namespace

TEST(Histogram, BinsAndWithin20) {
  const Histogram h = Histogram::build("gls", "beta1", {-150.0, -20.0, 0.0, 19.9, 20.0, 99.0, 100.0, 250.0, NAN});
  EXPECT_EQ(h.count, 8u);
  EXPECT_EQ(h.mass.size(), Histogram::kBins);
  EXPECT_DOUBLE_EQ(h.underflow, 1.0 / 8);
  EXPECT_DOUBLE_EQ(h.overflow, 1.0 / 8);
  EXPECT_DOUBLE_EQ(h.within_20, 4.0 / 8);
  double total = h.underflow + h.overflow;
  for (double m : h.mass) total += m;
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(h.bin_low(0), -100.0);
  EXPECT_NEAR(h.bin_high(Histogram::kBins - 1), 100.0, 1e-12);
}

TEST(Table1, SmallRunShape) {
  const ExperimentReport r = run_table1(small());
  EXPECT_EQ(r.experiment, "table1");
  EXPECT_EQ(r.methods.size(), 5u);
  const auto& gls = r.method("gls").summary;
  EXPECT_EQ(gls.parameter_names, (std::vector<std::string>{"beta", "sigma_obs", "mean_sigma_mod"}));
  EXPECT_EQ(gls.n_replicates, 10u);
  EXPECT_THROW(r.method("lasso"), std::out_of_range);
}

TEST(Table1, ThreadInvariant) {
  ExperimentOptions a = small(6);
  ExperimentOptions b = small(6);
  b.parallel.threads = 3;
  EXPECT_EQ(run_table1(a).method("gls").summary.raw_estimates, run_table1(b).method("gls").summary.raw_estimates);
}

TEST(Table2, SmallRunShape) {
  const ExperimentReport r = run_table2(small());
  EXPECT_EQ(r.method("ols").summary.parameter_names.front(), "beta0");
  EXPECT_EQ(r.metadata.at("model"), "loglinear");
}

TEST(Histograms, TinyStudy) {
  HistogramOptions h;
  h.n_grid_samples = 2;
  h.replicates = 2;
  h.methods = {Method::GLS, Method::OLS};
  const ExperimentReport r = run_histograms(GeneratorKind::OutlierMulti, h, small());
  EXPECT_EQ(r.histograms.size(), 8u);
  EXPECT_EQ(r.histogram("gls", "beta1").count, 2u);
  EXPECT_THROW(run_histograms(GeneratorKind::Outlier1D, h, small()), std::invalid_argument);
}

TEST(Pipeline, SurrogateSmoke) {
  const Dataset d = gen_surrogate_itpa(120, 4, 3).data;
  PipelineOptions p;
  p.n_boot = 5;
  p.prediction_points = {{1.0, 3.0, 10.0}};
  const ExperimentReport r = run_scaling_pipeline(d, ModelForm::PowerLaw, p, small());
  EXPECT_EQ(r.methods.size(), 3u);
  EXPECT_EQ(r.method("gls").summary.parameter_names.size(), 8u);
  EXPECT_EQ(r.predictions.size(), 3u);
  EXPECT_EQ(r.group_sigma.size(), 4u);
  for (const auto& m : r.methods) {
    EXPECT_EQ(m.point_estimate.size(), m.summary.parameter_names.size());
    for (Eigen::Index k = 0; k < m.summary.sd.size(); ++k) EXPECT_TRUE(std::isfinite(m.summary.sd[k]));
  }
  p.methods = {Method::TLS};
  EXPECT_THROW(run_scaling_pipeline(d, ModelForm::PowerLaw, p, small()), std::invalid_argument);
  p.methods = {Method::GLS};
  EXPECT_THROW(run_scaling_pipeline(d, ModelForm::AffineLinear, p, small()), std::invalid_argument);
}

TEST(Fit, NoBootstrapReportsPoint) {
  const Dataset d = gen_outlier_1d(4).data;
  PipelineOptions p;
  p.n_boot = 0;
  p.methods = {Method::GLS, Method::TLS};
  const ExperimentReport r = run_fit(d, ModelForm::SimpleLinear, p, false, small());
  const auto& g = r.method("gls");
  EXPECT_EQ(g.summary.mean[0], g.point_estimate[0]);
  EXPECT_EQ(g.summary.sd[0], 0.0);
  p.n_boot = 1;
  EXPECT_THROW(run_fit(d, ModelForm::SimpleLinear, p, false, small()), std::invalid_argument);
}

TEST(Sensitivity, ModifyErrorBars) {
  const Dataset d = gen_surrogate_itpa(60, 3, 2).data;
  SensitivityOptions s;
  s.scale_factor = 2.0;
  const Dataset m = modify_error_bars(d, s);
  EXPECT_NEAR(m[0].sigma_y, 2.0 * d[0].sigma_y, 1e-12);
  s.averaged_errors = true;
  const Dataset a = modify_error_bars(d, s);
  EXPECT_NEAR(a[0].rel_err_x(0), a[5].rel_err_x(0), 1e-12);
}

TEST(Sensitivity, ReportsShifts) {
  const Dataset d = gen_surrogate_itpa(120, 4, 3).data;
  SensitivityOptions s;
  s.prediction_points = {{1.0, 3.0, 10.0}};
  const ExperimentReport r = run_errorbar_sensitivity(d, ModelForm::LogLinear, s, small());
  bool has_pred = false;
  bool has_sigma = false;
  for (const auto& row : r.shifts) {
    has_pred = has_pred || row.quantity == "prediction1";
    has_sigma = has_sigma || row.quantity.rfind("sigma_obs[", 0) == 0;
  }
  EXPECT_TRUE(has_pred);
  EXPECT_TRUE(has_sigma);
}

TEST(PredictResponse, LogLinearExponentiates) {
  Eigen::Vector2d beta(2.0, 1.0);
  EXPECT_NEAR(predict_response(ModelSpec(ModelForm::LogLinear, 1), beta, {3.0}), 6.0, 1e-12);
  EXPECT_NEAR(predict_response(ModelSpec(ModelForm::PowerLaw, 1), beta, {3.0}), 6.0, 1e-12);
}
