#include <sstream>

#include <gtest/gtest.h>

#include "geols/report_io.hpp"

using namespace geols;

namespace {

ExperimentReport sample_report() {
  ExperimentReport r;
  r.experiment = "unit";
  r.metadata["seed"] = "1";
  Eigen::MatrixXd m(3, 2);
  m << 1, 2, 3, 4, 5, 6.5;
  r.methods.push_back({"gls", summarize_replicates(m, {"beta0", "beta1"}), {3.0, 4.0}});
  r.histograms.push_back(Histogram::build("gls", "beta1", {-5.0, 10.0, 300.0}));
  r.group_sigma.push_back({"gls", "M1", 0.2, 0.01, 0.15});
  r.predictions.push_back({"gls", {1.0, 2.0}, 5.0, 0.5, 4.0, 6.0});
  r.shifts.push_back({"map", "beta1", 1.0, 1.5, 0.5});
  return r;
}

}  // namespace

TEST(ReportJson, RoundTripIsLossless) {
  const ExperimentReport r = sample_report();
  const std::string a = report_to_json(r);
  const std::string b = report_to_json(report_from_json(a));
  EXPECT_EQ(a, b);
  EXPECT_THROW(report_from_json("{not json"), std::runtime_error);
}

TEST(ReportJson, NonFiniteValues) {
  ExperimentReport r = sample_report();
  r.shifts.front().relative_change = INFINITY;
  r.predictions.front().sd = NAN;
  const std::string a = report_to_json(r);
  EXPECT_NE(a.find("\"inf\""), std::string::npos);
  EXPECT_NE(a.find("null"), std::string::npos);
  const ExperimentReport back = report_from_json(a);
  EXPECT_TRUE(std::isinf(back.shifts.front().relative_change));
  EXPECT_TRUE(std::isnan(back.predictions.front().sd));
}

TEST(TableCsv, RowsForEverySection) {
  std::ostringstream out;
  write_table_csv(out, sample_report());
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("method,quantity,mean,sd,ci95_low,ci95_high,n\n", 0), 0u);
  EXPECT_NE(s.find("gls,beta0,3,"), std::string::npos);
  EXPECT_NE(s.find("gls,prediction1,5,0.5,4,6,"), std::string::npos);
  EXPECT_NE(s.find("gls,rel_err[M1],"), std::string::npos);
  EXPECT_NE(s.find("map,shift:beta1,"), std::string::npos);
}

TEST(HistogramCsv, OpenEdges) {
  std::ostringstream out;
  write_histograms_csv(out, sample_report());
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("method,parameter,bin_low,bin_high,mass\n", 0), 0u);
  EXPECT_NE(s.find("gls,beta1,-inf,-100,0\n"), std::string::npos);
  EXPECT_NE(s.find("gls,beta1,100,inf,"), std::string::npos);
}

TEST(ReplicatesCsv, Header) {
  std::ostringstream out;
  write_replicates_csv(out, sample_report().methods.front().summary);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "replicate,beta0,beta1");
}
