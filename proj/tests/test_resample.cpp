#include <atomic>
#include <cmath>

#include <gtest/gtest.h>

#include "geols/resample.hpp"

using namespace geols;

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, ParallelOptions{4}, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsLowestIndexError) {
  try {
    parallel_for(10, ParallelOptions{3}, [](std::size_t i) {
      if (i == 4 || i == 7) throw std::runtime_error("bad " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "bad 4");
  }
}

TEST(Summarize, MeanSdAndInterval) {
  Eigen::MatrixXd m(4, 1);
  m << 1, 2, 3, 4;
  const ResampleReport r = summarize_replicates(m, {});
  EXPECT_EQ(r.parameter_names.front(), "p0");
  EXPECT_DOUBLE_EQ(r.mean[0], 2.5);
  EXPECT_NEAR(r.sd[0], std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(r.ci95[0].first, 2.5 - 1.96 * r.sd[0], 1e-15);
  EXPECT_NEAR(r.ci95[0].second, 2.5 + 1.96 * r.sd[0], 1e-15);
}

TEST(RunReplicates, ToleratesFewFailures) {
  const ResampleReport r = run_replicates(
      20,
      [](std::size_t i) -> Eigen::VectorXd {
        if (i == 3) throw std::runtime_error("no fit");
        return Eigen::VectorXd::Constant(1, static_cast<double>(i));
      },
      {"v"});
  EXPECT_EQ(r.n_requested, 20u);
  EXPECT_EQ(r.n_replicates, 19u);
  EXPECT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.replicate_ids[3], 4u);
}

TEST(RunReplicates, FailsAboveThreshold) {
  auto fn = [](std::size_t i) -> Eigen::VectorXd {
    if (i < 3) return Eigen::VectorXd::Constant(1, NAN);
    return Eigen::VectorXd::Constant(1, 1.0);
  };
  EXPECT_THROW(run_replicates(20, fn, {"v"}), ResampleError);
}

TEST(Bootstrap, IndicesDeterministicAndInRange) {
  const auto a = bootstrap_indices(50, 9, 3);
  EXPECT_EQ(a, bootstrap_indices(50, 9, 3));
  EXPECT_NE(a, bootstrap_indices(50, 9, 4));
  for (auto i : a) EXPECT_LT(i, 50u);
}

TEST(Bootstrap, ThreadCountDoesNotChangeResult) {
  std::vector<Observation> rows;
  for (int i = 0; i < 30; ++i) rows.push_back({static_cast<double>(i * i % 7), {1.0 * i}, 0.1, {0.0}, "a"});
  const Dataset d(rows);
  Estimator mean_y = [](const Dataset& s) {
    double m = 0;
    for (const auto& o : s.rows()) m += o.y;
    return Eigen::VectorXd::Constant(1, m / static_cast<double>(s.size()));
  };
  const auto a = bootstrap(d, mean_y, 40, 1, {"m"}, ParallelOptions{1});
  const auto b = bootstrap(d, mean_y, 40, 1, {"m"}, ParallelOptions{3});
  EXPECT_EQ(a.raw_estimates, b.raw_estimates);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_GT(a.sd[0], 0.0);
}
