#include <cmath>

#include <gtest/gtest.h>

#include "geols/datagen.hpp"
#include "geols/gls.hpp"
#include "geols/manifold.hpp"

using namespace geols;

namespace {

Dataset line_data(double beta, double noise, std::uint64_t seed, std::size_t n = 40) {
  RandomStream r(seed);
  std::vector<Observation> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 1.0 + static_cast<double>(i) * 0.5;
    rows.push_back({beta * x + noise * r.normal(), {x}, 1.0, {0.1}, i % 2 ? "even" : "odd"});
  }
  return Dataset(rows);
}

}  // namespace

TEST(GlsParameters, SigmaFallback) {
  GlsParameters p{Eigen::VectorXd::Ones(1), {{"*", 2.0}, {"a", 3.0}}};
  EXPECT_EQ(p.sigma_for("a"), 3.0);
  EXPECT_EQ(p.sigma_for("b"), 2.0);
}

TEST(GlsObjective, SumOfSquaredDistances) {
  const ModelSpec spec(ModelForm::SimpleLinear, 1);
  const Dataset d({{2.0, {1.0}, 0.5, {0.0}, "a"}, {5.0, {2.0}, 0.5, {0.0}, "a"}});
  const GlsParameters p{Eigen::VectorXd::Constant(1, 2.0), {{"*", 1.0}}};
  const double g0 = rao_distance({2.0, 1.0}, {2.0, 0.5});
  const double g1 = rao_distance({5.0, 1.0}, {4.0, 0.5});
  const auto dist = gls_point_distances(spec, p, d);
  EXPECT_NEAR(dist[0], g0, 1e-14);
  EXPECT_NEAR(dist[1], g1, 1e-14);
  EXPECT_NEAR(gls_objective(spec, p, d), g0 * g0 + g1 * g1, 1e-13);
}

TEST(GlsObjective, MatchedSigmaOnlyPenalizesMeans) {
  const ModelSpec spec(ModelForm::SimpleLinear, 1);
  const Dataset d({{3.0, {1.0}, 1.0, {0.0}, "a"}});
  EXPECT_NEAR(gls_matched_sigma_objective(spec, Eigen::VectorXd::Constant(1, 3.0), d), 0.0, 1e-15);
  EXPECT_NEAR(gls_matched_sigma_objective(spec, Eigen::VectorXd::Constant(1, 2.0), d),
              std::pow(rao_distance({3, 1}, {2, 1}), 2), 1e-13);
}

TEST(FitGls, RecoversSlope) {
  const ModelSpec spec(ModelForm::SimpleLinear, 1);
  const FitResult r = fit_gls(spec, line_data(3.0, 1.0, 4));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.params.beta[0], 3.0, 0.1);
  EXPECT_EQ(r.params.sigma_obs.size(), 1u);
  EXPECT_EQ(r.per_point_gd.size(), 40u);
  EXPECT_GT(r.diagnostics.at("response_scale"), 0.0);
}

TEST(FitGls, ObjectiveNotWorseThanInitialization) {
  const ModelSpec spec(ModelForm::SimpleLinear, 1);
  const Dataset d = line_data(2.0, 1.5, 8);
  GlsParameters init{Eigen::VectorXd::Constant(1, 1.0), {{"*", 2.0}}};
  const FitResult r = fit_gls(spec, d, init);
  EXPECT_LE(r.objective, gls_objective(spec, init, d));
  EXPECT_NEAR(r.objective, gls_objective(spec, r.params, d), 1e-12);
}

TEST(FitGls, FirstOrderOptimalityProbe) {
  const ModelSpec spec(ModelForm::AffineLinear, 1);
  std::vector<Observation> rows;
  RandomStream r(21);
  for (int i = 0; i < 30; ++i) {
    const double x = r.uniform(1, 10);
    rows.push_back({1.0 + 2.0 * x + r.normal(), {x}, 0.5, {0.1}, "a"});
  }
  const Dataset d(rows);
  const FitResult fit = fit_gls(spec, d);
  const double f0 = gls_objective(spec, fit.params, d);
  for (Eigen::Index k = 0; k < fit.params.beta.size(); ++k) {
    for (double sgn : {-1.0, 1.0}) {
      GlsParameters p = fit.params;
      p.beta[k] *= 1.0 + sgn * 1e-4;
      EXPECT_GE(gls_objective(spec, p, d), f0 - 1e-8);
    }
  }
  for (double sgn : {-1.0, 1.0}) {
    GlsParameters p = fit.params;
    p.sigma_obs.at(kPooledGroup) *= 1.0 + sgn * 1e-4;
    EXPECT_GE(gls_objective(spec, p, d), f0 - 1e-8);
  }
}

TEST(FitGls, PerGroupSigmas) {
  const ModelSpec spec(ModelForm::SimpleLinear, 1);
  const FitResult r = fit_gls(spec, line_data(3.0, 1.0, 4), {}, {}, GlsOptions{true});
  EXPECT_EQ(r.params.sigma_obs.count("even"), 1u);
  EXPECT_EQ(r.params.sigma_obs.count("odd"), 1u);
}

TEST(FitGls, SingletonGroupsArePooled) {
  const ModelSpec spec(ModelForm::SimpleLinear, 1);
  std::vector<Observation> rows = line_data(3.0, 1.0, 4).rows();
  rows.back().group = "lonely";
  const FitResult r = fit_gls(spec, Dataset(rows), {}, {}, GlsOptions{true});
  EXPECT_EQ(r.params.sigma_obs.count("lonely"), 0u);
  EXPECT_EQ(r.params.sigma_obs.count(kPooledGroup), 1u);
}

TEST(FitGls, WarnsWhenUnderdetermined) {
  const ModelSpec spec(ModelForm::AffineLinear, 2);
  const Dataset d({{1.0, {1.0, 2.0}, 0.1, {0.1, 0.1}, "a"},
                   {2.0, {2.0, 1.0}, 0.1, {0.1, 0.1}, "a"},
                   {4.0, {3.0, 3.0}, 0.1, {0.1, 0.1}, "a"}});
  const FitResult r = fit_gls(spec, d);
  EXPECT_FALSE(r.warnings.empty());
}

// With constant sigma_mod the truth is an exact zero of the objective.
TEST(FitGls, PowerLawOnNoiselessData) {
  const ModelSpec spec(ModelForm::PowerLaw, 1);
  std::vector<Observation> rows;
  for (int i = 1; i <= 20; ++i) {
    const double x = i;
    const double y = 0.8 * std::pow(x, 1.4);
    rows.push_back({y, {x}, 0.5, {0.0}, "a"});
  }
  const FitResult r = fit_gls(spec, Dataset(rows));
  EXPECT_NEAR(r.params.beta[0], 0.8, 1e-3);
  EXPECT_NEAR(r.params.beta[1], 1.4, 1e-3);
  EXPECT_NEAR(r.params.sigma_obs.at(kPooledGroup), 0.5, 1e-3);
}

TEST(FitGls, RejectsIncompatibleData) {
  const Dataset d({{-1.0, {1.0}, 0.1, {0.1}, "a"}, {2.0, {2.0}, 0.1, {0.1}, "a"}});
  EXPECT_THROW(fit_gls(ModelSpec(ModelForm::LogLinear, 1), d), std::domain_error);
}
