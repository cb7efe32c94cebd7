#pragma once

// Command-line front end. Exit codes: 0 success, 1 runtime failure, 2 usage
// error (unknown flag, missing or invalid option, bad config file).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geols/baselines.hpp"
#include "geols/datagen.hpp"
#include "geols/experiments.hpp"
#include "geols/models.hpp"
#include "geols/optimize.hpp"

namespace geols {

enum class Command { Fit, Table1, Table2, Histograms, Pipeline, Sensitivity, Gen };

std::string_view to_string(Command command);

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::Fit;
  std::optional<ModelForm> model;
  std::vector<Method> methods;
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> predictors;
  std::optional<std::filesystem::path> config_file;
  std::uint64_t seed = 0;
  bool seed_generated = false;
  std::size_t boot = 100;
  std::size_t mc = 100;
  std::size_t threads = 1;
  std::filesystem::path out = "results";
  GeneratorKind kind = GeneratorKind::OutlierMulti;
  std::size_t grid = 50;
  std::size_t replicates = 10;
  std::vector<std::vector<double>> predict;
  double scale = 2.0;
  bool averaged = false;
  std::size_t rows = 616;
  std::size_t groups = 8;
  std::vector<double> beta;
  double max_rel_err = 1.0;
  bool per_group = false;
  OptimOptions optim;
  std::vector<std::string> warnings;
};

/// Throws UsageError. argv[0] is the program name.
RunConfig parse_args(const std::vector<std::string>& args);

/// Writes result.json, table.csv, histograms.csv (when the report has
/// histograms) and meta.json into config.out, each via a temporary file and
/// rename. Only meta.json carries a timestamp.
void emit_outputs(const ExperimentReport& report, const RunConfig& config);

/// Canonical JSON echo of a configuration (no timestamp, no thread count).
std::string config_to_json(const RunConfig& config);

/// Runs the configured command and writes its outputs.
ExperimentReport execute(const RunConfig& config, std::ostream& log);

/// Full front end: parse, run, report; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes `content` to `path` through a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace geols
