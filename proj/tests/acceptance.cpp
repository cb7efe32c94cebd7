// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geols/cli.hpp"
#include "geols/experiments.hpp"
#include "geols/manifold.hpp"
#include "geols/random.hpp"
#include "geols/report_io.hpp"
#include "json.hpp"

using namespace geols;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path g_out;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// Runs a CLI command into g_out/<tag> and returns the parsed report.
ExperimentReport cli_report(const std::string& tag, std::vector<std::string> args) {
  const fs::path dir = g_out / tag;
  fs::remove_all(dir);
  args.insert(args.begin(), "geols");
  args.push_back("--out");
  args.push_back(dir.string());
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (code != 0) throw std::runtime_error(tag + ": geols exited with " + std::to_string(code) + ": " + err.str());
  return report_from_json(slurp(dir / "result.json"));
}

struct Command {
  std::string tag;
  std::vector<std::string> args;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> list = {
      {"table1", {"table1", "--mc", "100", "--seed", "42"}},
      {"table2", {"table2", "--mc", "100", "--seed", "42"}},
      {"hist_outlier", {"histograms", "--kind", "outlier-multi", "--grid", "50", "--replicates", "10", "--seed", "42"}},
      {"hist_log", {"histograms", "--kind", "log-multi", "--grid", "50", "--replicates", "10", "--seed", "42"}},
      {"pipeline",
       {"pipeline", "--boot", "100", "--seed", "42", "--predict", "1,5,30", "--predict", "3,20,300"}},
  };
  return list;
}

const Command& command(const std::string& tag) {
  for (const auto& c : commands()) {
    if (c.tag == tag) return c;
  }
  throw std::logic_error("unknown command tag " + tag);
}

Outcome geodesic_oracle() {
  RandomStream rng(derive_seed(kSeed, 1));
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const GaussianPoint p(rng.uniform(-10, 10), std::exp(rng.uniform(std::log(0.1), std::log(10.0))));
    const GaussianPoint q(rng.uniform(-10, 10), std::exp(rng.uniform(std::log(0.1), std::log(10.0))));
    const double gd = rao_distance(p, q);
    const double num = numeric_geodesic_length(geodesic_between(p, q), 100000);
    worst = std::max(worst, std::abs(gd - num) / gd);
  }
  return {worst < 1e-6, "max relative deviation " + fmt("%.2e", worst) + " over 1000 pairs"};
}

Outcome metric_axioms() {
  RandomStream rng(derive_seed(kSeed, 2));
  auto draw = [&] { return GaussianPoint(rng.uniform(-20, 20), std::exp(rng.uniform(std::log(0.05), std::log(20.0)))); };
  double asym = 0.0;
  double slack = 0.0;
  bool identity = true;
  for (int i = 0; i < 10000; ++i) {
    const GaussianPoint a = draw(), b = draw(), c = draw();
    const double ab = rao_distance(a, b), ba = rao_distance(b, a);
    const double bc = rao_distance(b, c), ac = rao_distance(a, c);
    asym = std::max(asym, std::abs(ab - ba));
    slack = std::max(slack, ac - ab - bc);
    identity = identity && rao_distance(a, a) == 0.0 && (a == b || ab > 0.0);
  }
  const bool pass = asym <= 1e-12 && slack <= 1e-9 && identity;
  return {pass, "max asymmetry " + fmt("%.1e", asym) + ", max triangle excess " + fmt("%.1e", slack) +
                    (identity ? ", identity holds" : ", identity violated")};
}

Outcome table1() {
  const ExperimentReport r = cli_report("table1", command("table1").args);
  const auto& g = r.method("gls").summary;
  const double gls = g.mean[0], gls_sd = g.sd[0], sig = g.mean[1];
  const double ols = r.method("ols").summary.mean[0];
  const double rob = r.method("rob").summary.mean[0];
  const double tls = r.method("tls").summary.mean[0];
  const bool pass = gls >= 2.93 && gls <= 3.13 && gls_sd < 0.10 && ols > 3.4 && rob >= 2.9 && rob <= 3.1 &&
                    tls > 4.0 && sig >= 4.7 && sig <= 6.2;
  return {pass, "GLS " + fmt("%.3f", gls) + " (sd " + fmt("%.3f", gls_sd) + "), OLS " + fmt("%.3f", ols) + ", ROB " +
                    fmt("%.3f", rob) + ", TLS " + fmt("%.3f", tls) + ", sigma_obs " + fmt("%.2f", sig)};
}

Outcome table2() {
  const ExperimentReport r = cli_report("table2", command("table2").args);
  const auto& g = r.method("gls").summary;
  const double b0 = g.mean[0], b1 = g.mean[1];
  const double ols = r.method("ols").summary.mean[1];
  const double rob = r.method("rob").summary.mean[1];
  const bool pass = b1 >= 1.25 && b1 <= 1.55 && b0 >= 0.5 && b0 <= 1.5 && ols < 1.30 && rob < 1.30;
  return {pass, "GLS beta1 " + fmt("%.3f", b1) + ", beta0 " + fmt("%.3f", b0) + ", OLS beta1 " + fmt("%.3f", ols) +
                    ", ROB beta1 " + fmt("%.3f", rob)};
}

std::string masses(const ExperimentReport& r, const std::string& p) {
  std::string s = p + ":";
  for (const char* m : {"gls", "ols", "map", "tls", "rob"}) s += std::string(" ") + m + " " + fmt("%.2f", r.histogram(m, p).within_20);
  return s;
}

Outcome outlier_histograms() {
  const ExperimentReport r = cli_report("hist_outlier", command("hist_outlier").args);
  bool pass = true;
  for (const char* p : {"beta1", "beta2", "beta3"}) pass = pass && r.histogram("gls", p).within_20 >= 0.70;
  const double g1 = r.histogram("gls", "beta1").within_20;
  for (const char* m : {"ols", "map", "tls"}) pass = pass && g1 > r.histogram(m, "beta1").within_20;
  return {pass, "within 20%: " + masses(r, "beta1") + "; gls beta2 " + fmt("%.2f", r.histogram("gls", "beta2").within_20) +
                    ", beta3 " + fmt("%.2f", r.histogram("gls", "beta3").within_20)};
}

Outcome log_histograms() {
  const ExperimentReport r = cli_report("hist_log", command("hist_log").args);
  bool pass = r.histogram("gls", "beta2").within_20 >= 0.70 && r.histogram("gls", "beta3").within_20 >= 0.70;
  for (const char* p : {"beta1", "beta2", "beta3"}) {
    const double g = r.histogram("gls", p).within_20;
    for (const char* m : {"ols", "map", "tls", "rob"}) pass = pass && g > r.histogram(m, p).within_20;
  }
  return {pass, "within 20%: " + masses(r, "beta1") + "; " + masses(r, "beta2") + "; " + masses(r, "beta3")};
}

Outcome mechanism() {
  const ExperimentReport r = report_from_json(slurp(g_out / "table1" / "result.json"));
  const auto& g = r.method("gls").summary;
  std::size_t ok = 0;
  for (Eigen::Index i = 0; i < g.raw_estimates.rows(); ++i) ok += g.raw_estimates(i, 1) > g.raw_estimates(i, 2);
  const bool pass = g.n_requested == 100 && ok == 100;
  return {pass, std::to_string(ok) + "/" + std::to_string(g.n_requested) + " replicates with sigma_obs > mean sigma_mod"};
}

Outcome cross_model() {
  int ok = 0;
  std::string worst;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const Dataset d = gen_surrogate_itpa(600, 8, s).data;
    const double g = cross_mode_difference(d, Method::GLS);
    const double o = cross_mode_difference(d, Method::OLS);
    ok += g < o;
    if (!(g < o)) worst += " seed " + std::to_string(s) + " (gls " + fmt("%.3f", g) + " vs ols " + fmt("%.3f", o) + ")";
  }
  return {ok >= 9, std::to_string(ok) + "/10 surrogates with smaller GLS mode difference" + worst};
}

Outcome sensitivity() {
  int ok = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const Dataset d = gen_surrogate_itpa(600, 8, s).data;
    SensitivityOptions so;
    so.scale_factor = 2.0;
    so.prediction_points = {{1.0, 5.0, 30.0}, {3.0, 20.0, 300.0}};
    const ExperimentReport r = run_errorbar_sensitivity(d, ModelForm::LogLinear, so);
    double gls[2] = {NAN, NAN}, map[2] = {NAN, NAN};
    bool sigma_up = true;
    for (const auto& row : r.shifts) {
      if (row.quantity == "prediction1" || row.quantity == "prediction2") {
        const int k = row.quantity.back() - '1';
        (row.method == "gls" ? gls : map)[k] = std::abs(row.relative_change);
      }
      if (row.method == "gls" && row.quantity.rfind("sigma_obs[", 0) == 0) sigma_up = sigma_up && row.relative_change > 0;
    }
    ok += gls[0] < map[0] && gls[1] < map[1] && sigma_up;
  }
  return {ok >= 8, std::to_string(ok) + "/10 surrogates with smaller GLS prediction shift and rising group sigmas"};
}

bool finite_positive_interval(const std::pair<double, double>& ci) {
  return std::isfinite(ci.first) && std::isfinite(ci.second) && ci.second > ci.first;
}

Outcome pipeline_smoke() {
  const ExperimentReport r = cli_report("pipeline", command("pipeline").args);
  const fs::path dir = g_out / "pipeline";
  std::string problems;
  const auto j = nlohmann::json::parse(slurp(dir / "result.json"));
  for (const char* key : {"experiment", "metadata", "methods", "histograms", "group_sigma", "predictions", "shifts"}) {
    if (!j.contains(key)) problems += std::string(" missing result key ") + key;
  }
  for (const auto& m : j["methods"]) {
    for (const char* key : {"method", "point_estimate", "summary"}) {
      if (!m.contains(key)) problems += std::string(" missing method key ") + key;
    }
  }
  const auto meta = nlohmann::json::parse(slurp(dir / "meta.json"));
  for (const char* key : {"version", "seed", "threads", "created_utc", "config"}) {
    if (!meta.contains(key)) problems += std::string(" missing meta key ") + key;
  }
  if (slurp(dir / "table.csv").rfind("method,quantity,mean,sd,ci95_low,ci95_high,n\n", 0) != 0) {
    problems += " bad table.csv header";
  }
  std::size_t intervals = 0;
  for (const auto& m : r.methods) {
    if (m.summary.n_requested != 100) problems += " " + m.method + " n_boot != 100";
    for (const auto& ci : m.summary.ci95) {
      ++intervals;
      if (!finite_positive_interval(ci)) problems += " " + m.method + " degenerate coefficient CI";
    }
  }
  for (const auto& p : r.predictions) {
    ++intervals;
    if (!finite_positive_interval({p.ci_low, p.ci_high}) || !(p.ci_low > 0.0)) {
      problems += " " + p.method + " bad prediction CI";
    }
  }
  if (r.methods.size() != 3 || r.predictions.size() != 6) problems += " unexpected report shape";
  return {problems.empty(), problems.empty() ? std::to_string(intervals) + " bootstrap intervals finite and positive"
                                             : "problems:" + problems};
}

Outcome determinism() {
  std::string diff;
  for (const auto& c : commands()) {
    const fs::path first = g_out / c.tag / "result.json";
    if (!fs::exists(first)) cli_report(c.tag, c.args);
    const std::string a = slurp(first);
    cli_report(c.tag + "_repeat", c.args);
    if (a != slurp(g_out / (c.tag + "_repeat") / "result.json")) diff += " " + c.tag;
  }
  return {diff.empty(), diff.empty() ? "result.json byte-identical on rerun for " + std::to_string(commands().size()) + " commands"
                                     : "differs:" + diff};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string out = (fs::temp_directory_path() / "geols_acceptance").string();
  std::vector<int> only;
  app.add_option("--out", out, "Scratch directory for CLI outputs");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);
  g_out = out;
  fs::create_directories(g_out);

  const double no_limit = 0.0;
  const std::vector<Criterion> criteria = {
      {1, "geodesic oracle equivalence", 10, geodesic_oracle},
      {2, "metric axioms", 10, metric_axioms},
      {3, "table1 outlier study", 120, table1},
      {4, "table2 power-law study", 120, table2},
      {5, "outlier-multi histograms", 900, outlier_histograms},
      {6, "log-multi histograms", 900, log_histograms},
      {7, "robustness mechanism", no_limit, mechanism},
      {8, "cross-model consistency", no_limit, cross_model},
      {9, "error-bar sensitivity", no_limit, sensitivity},
      {10, "pipeline smoke test", 300, pipeline_smoke},
      {11, "determinism", no_limit, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    if (c.id == 7 && !fs::exists(g_out / "table1" / "result.json")) cli_report("table1", command("table1").args);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += "; runtime " + fmt("%.1f", secs) + " s exceeds " + fmt("%.0f", c.limit_s) + " s";
    }
    failed += !o.pass;
    std::printf("[%s] criterion %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
