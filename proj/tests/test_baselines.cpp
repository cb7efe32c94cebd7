#include <cmath>

#include <gtest/gtest.h>

#include "geols/baselines.hpp"
#include "geols/random.hpp"

using namespace geols;

namespace {

Dataset affine_data(double noise, std::uint64_t seed, std::size_t n = 60) {
  RandomStream r(seed);
  std::vector<Observation> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = r.uniform(1, 10);
    const double x2 = r.uniform(1, 10);
    rows.push_back({2.0 + 0.5 * x1 + 1.5 * x2 + noise * r.normal(), {x1, x2}, 0.5, {0.05, 0.05}, "a"});
  }
  return Dataset(rows);
}

}  // namespace

TEST(Method, ParseList) {
  EXPECT_EQ(parse_method_list("gls,ols,gls"), (std::vector<Method>{Method::GLS, Method::OLS}));
  EXPECT_THROW(parse_method_list(""), std::invalid_argument);
  EXPECT_THROW(parse_method("lasso"), std::invalid_argument);
  EXPECT_EQ(to_string(Method::ROB), "rob");
  EXPECT_FALSE(method_supports(Method::TLS, ModelForm::PowerLaw));
  EXPECT_TRUE(method_supports(Method::TLS, ModelForm::LogLinear));
}

TEST(Ols, ExactOnNoiselessAffine) {
  const BaselineResult r = fit_ols(ModelSpec(ModelForm::AffineLinear, 2), affine_data(0.0, 1));
  EXPECT_NEAR(r.beta[0], 2.0, 1e-10);
  EXPECT_NEAR(r.beta[1], 0.5, 1e-10);
  EXPECT_NEAR(r.beta[2], 1.5, 1e-10);
}

TEST(Ols, RankDeficientThrows) {
  std::vector<Observation> rows;
  for (int i = 0; i < 5; ++i) rows.push_back({1.0 * i, {1.0 * i, 2.0 * i}, 0.1, {0.1, 0.1}, "a"});
  EXPECT_THROW(fit_ols(ModelSpec(ModelForm::AffineLinear, 2), Dataset(rows)), std::runtime_error);
}

TEST(Ols, LogLinearReportsPrefactor) {
  std::vector<Observation> rows;
  for (int i = 1; i <= 10; ++i) {
    const double x = i;
    rows.push_back({0.8 * std::pow(x, 1.4), {x}, 0.1, {0.1}, "a"});
  }
  const Dataset d(rows);
  const BaselineResult r = fit_ols(ModelSpec(ModelForm::LogLinear, 1), d);
  EXPECT_NEAR(r.beta[0], 0.8, 1e-10);
  EXPECT_NEAR(r.beta[1], 1.4, 1e-10);
  const BaselineResult p = fit_ols(ModelSpec(ModelForm::PowerLaw, 1), d);
  EXPECT_NEAR(p.beta[0], 0.8, 1e-6);
  EXPECT_NEAR(p.beta[1], 1.4, 1e-6);
  const Eigen::VectorXd l = log_space_ols(ModelSpec(ModelForm::PowerLaw, 1), d);
  EXPECT_NEAR(l[0], 0.8, 1e-10);
}

TEST(Tls, ExactOnNoiselessLine) {
  std::vector<Observation> rows;
  for (int i = 1; i <= 8; ++i) rows.push_back({2.5 * i, {1.0 * i}, 0.1, {0.1}, "a"});
  const BaselineResult r = fit_tls(ModelSpec(ModelForm::SimpleLinear, 1), Dataset(rows));
  EXPECT_NEAR(r.beta[0], 2.5, 1e-10);
  EXPECT_THROW(fit_tls(ModelSpec(ModelForm::PowerLaw, 1), Dataset(rows)), std::invalid_argument);
}

TEST(Tls, AffineCloseToTruth) {
  const BaselineResult r = fit_tls(ModelSpec(ModelForm::AffineLinear, 2), affine_data(0.01, 3));
  EXPECT_NEAR(r.beta[1], 0.5, 0.01);
  EXPECT_NEAR(r.beta[2], 1.5, 0.01);
}

TEST(Rob, IgnoresGrossOutlier) {
  std::vector<Observation> rows = affine_data(0.1, 5).rows();
  rows[3].y += 500.0;
  const Dataset d(rows);
  const BaselineResult rob = fit_rob(ModelSpec(ModelForm::AffineLinear, 2), d);
  const BaselineResult ols = fit_ols(ModelSpec(ModelForm::AffineLinear, 2), d);
  EXPECT_TRUE(rob.converged);
  EXPECT_NEAR(rob.beta[2], 1.5, 0.05);
  EXPECT_GT(std::abs(ols.beta[0] - 2.0), std::abs(rob.beta[0] - 2.0));
}

TEST(Map, NearTruthOnCleanData) {
  const BaselineResult r = fit_map(ModelSpec(ModelForm::AffineLinear, 2), affine_data(0.5, 7));
  EXPECT_NEAR(r.beta[1], 0.5, 0.1);
  EXPECT_NEAR(r.beta[2], 1.5, 0.1);
}

TEST(FitBaseline, Dispatch) {
  const Dataset d = affine_data(0.0, 1);
  const ModelSpec spec(ModelForm::AffineLinear, 2);
  EXPECT_EQ(fit_baseline(Method::OLS, spec, d).method, Method::OLS);
  EXPECT_THROW(fit_baseline(Method::GLS, spec, d), std::invalid_argument);
}
