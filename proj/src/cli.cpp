#include "geols/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "geols/dataset_io.hpp"
#include "geols/report_io.hpp"
#include "json.hpp"
#include "text_format.hpp"

namespace geols {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

class HelpRequested : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

Command parse_command(const std::string& name) {
  static const std::map<std::string, Command> table = {
      {"fit", Command::Fit},           {"table1", Command::Table1},       {"table2", Command::Table2},
      {"histograms", Command::Histograms}, {"pipeline", Command::Pipeline}, {"sensitivity", Command::Sensitivity},
      {"gen", Command::Gen}};
  const auto it = table.find(name);
  if (it == table.end()) throw UsageError("unknown command '" + name + "'");
  return it->second;
}

std::uint64_t parse_u64(const std::string& flag, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError(flag + " expects a nonnegative integer, got '" + text + "'");
  }
  return v;
}

double parse_real(const std::string& flag, const std::string& text) {
  const auto v = parse_double(text);
  if (!v || !std::isfinite(*v)) throw UsageError(flag + " expects a number, got '" + text + "'");
  return *v;
}

std::vector<double> parse_real_list(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(parse_real(flag, text.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

ModelForm parse_model_flag(const std::string& text) {
  try {
    return parse_model_form(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--model: ") + e.what());
  }
}

std::vector<Method> parse_methods_flag(const std::string& text) {
  try {
    return parse_method_list(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--method: ") + e.what());
  }
}

GeneratorKind parse_kind_flag(const std::string& text) {
  try {
    return parse_generator_kind(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--kind: ") + e.what());
  }
}

// String-valued options collected by CLI11; values are converted afterwards
// so every message names the offending flag.
struct RawFlags {
  std::map<std::string, std::string> single;
  std::vector<std::string> predict;
  bool averaged = false;
  bool per_group = false;
};

void apply_flag(RunConfig& c, const std::string& name, const std::string& v) {
  if (name == "model") c.model = parse_model_flag(v);
  else if (name == "method") c.methods = parse_methods_flag(v);
  else if (name == "data") c.data = v;
  else if (name == "predictors") c.predictors = v;
  else if (name == "seed") c.seed = parse_u64("--seed", v);
  else if (name == "boot") c.boot = parse_u64("--boot", v);
  else if (name == "mc") c.mc = parse_u64("--mc", v);
  else if (name == "threads") c.threads = parse_u64("--threads", v);
  else if (name == "out") c.out = v;
  else if (name == "kind") c.kind = parse_kind_flag(v);
  else if (name == "grid") c.grid = parse_u64("--grid", v);
  else if (name == "replicates") c.replicates = parse_u64("--replicates", v);
  else if (name == "scale") c.scale = parse_real("--scale", v);
  else if (name == "rows") c.rows = parse_u64("--rows", v);
  else if (name == "groups") c.groups = parse_u64("--groups", v);
  else if (name == "beta") c.beta = parse_real_list("--beta", v);
  else if (name == "max-rel-err") c.max_rel_err = parse_real("--max-rel-err", v);
  else throw UsageError("internal: unhandled flag --" + name);
}

std::string key_to_flag(const std::string& key) {
  std::string f = key;
  for (char& ch : f) {
    if (ch == '_') ch = '-';
  }
  return f;
}

template <typename T>
T json_get(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + key + "' has the wrong type");
  }
}

void apply_optimizer_json(OptimOptions& o, const json& j) {
  if (!j.is_object()) throw UsageError("config key 'optimizer' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "f_tol") o.f_tol = json_get<double>(value, key);
    else if (key == "x_tol") o.x_tol = json_get<double>(value, key);
    else if (key == "max_iter") o.max_iter = json_get<std::size_t>(value, key);
    else if (key == "multistart") o.multistart = json_get<std::size_t>(value, key);
    else if (key == "multistart_jitter") o.multistart_jitter = json_get<double>(value, key);
    else if (key == "seed") o.seed = json_get<std::uint64_t>(value, key);
    else if (key == "sigma_floor") o.sigma_floor = json_get<double>(value, key);
    else if (key == "sigma_ceil") o.sigma_ceil = json_get<double>(value, key);
    else throw UsageError("unknown optimizer config key '" + key + "'");
  }
  if (!(o.f_tol > 0.0) || !(o.x_tol > 0.0) || o.max_iter == 0) {
    throw UsageError("optimizer tolerances must be positive and max_iter nonzero");
  }
  if (!(o.sigma_floor > 0.0) || !(o.sigma_ceil > o.sigma_floor)) {
    throw UsageError("optimizer sigma bounds must satisfy 0 < sigma_floor < sigma_ceil");
  }
}

// Applies a JSON config on top of the flags; keys that were also given on the
// command line win from the file, with a warning.
void apply_config_file(RunConfig& c, const std::filesystem::path& path, const std::set<std::string>& given,
                       bool& seed_set) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    const std::string flag = key_to_flag(key);
    if (given.count(flag)) {
      c.warnings.push_back("config file overrides --" + flag + " given on the command line");
    }
    if (key == "command") {
      if (json_get<std::string>(value, key) != to_string(c.command)) {
        throw UsageError("config file is for command '" + value.get<std::string>() + "'");
      }
    } else if (key == "optimizer") {
      apply_optimizer_json(c.optim, value);
    } else if (key == "methods" || key == "method") {
      if (value.is_array()) {
        std::string joined;
        for (const auto& m : value) joined += (joined.empty() ? "" : ",") + json_get<std::string>(m, key);
        c.methods = parse_methods_flag(joined);
      } else {
        c.methods = parse_methods_flag(json_get<std::string>(value, key));
      }
    } else if (key == "predict") {
      c.predict.clear();
      for (const auto& p : value) c.predict.push_back(json_get<std::vector<double>>(p, key));
    } else if (key == "beta") {
      c.beta = json_get<std::vector<double>>(value, key);
    } else if (key == "averaged") {
      c.averaged = json_get<bool>(value, key);
    } else if (key == "per_group") {
      c.per_group = json_get<bool>(value, key);
    } else if (key == "seed") {
      c.seed = json_get<std::uint64_t>(value, key);
      seed_set = true;
    } else if (key == "model" || key == "data" || key == "predictors" || key == "out" || key == "kind") {
      apply_flag(c, key, json_get<std::string>(value, key));
    } else if (key == "boot" || key == "mc" || key == "threads" || key == "grid" || key == "replicates" ||
               key == "rows" || key == "groups") {
      apply_flag(c, key, std::to_string(json_get<std::uint64_t>(value, key)));
    } else if (key == "scale" || key == "max_rel_err") {
      apply_flag(c, flag, format_double(json_get<double>(value, key)));
    } else {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
}

void validate(RunConfig& c) {
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
  };
  require(c.threads >= 1 || c.threads == 0, "--threads must be >= 0");
  if (c.data) require(std::filesystem::exists(*c.data), "--data file '" + c.data->string() + "' does not exist");
  if (c.predictors) {
    require(std::filesystem::exists(*c.predictors), "--predictors file '" + c.predictors->string() + "' does not exist");
  }
  require(c.max_rel_err > 0.0, "--max-rel-err must be positive");
  switch (c.command) {
    case Command::Fit:
      require(c.data.has_value(), "fit requires --data PATH");
      require(c.model.has_value(), "fit requires --model {linear|affine|loglinear|powerlaw}");
      require(c.boot != 1, "--boot must be 0 or at least 2");
      if (c.methods.empty()) c.methods = {Method::GLS};
      break;
    case Command::Table1:
    case Command::Table2:
      require(c.mc >= 2, "--mc must be at least 2");
      break;
    case Command::Histograms:
      require(c.kind == GeneratorKind::OutlierMulti || c.kind == GeneratorKind::LogMulti,
              "histograms --kind must be outlier-multi or log-multi");
      require(c.grid >= 1 && c.replicates >= 1, "--grid and --replicates must be positive");
      if (c.methods.empty()) c.methods = {Method::GLS, Method::OLS, Method::MAP, Method::TLS, Method::ROB};
      break;
    case Command::Pipeline:
    case Command::Sensitivity:
      if (!c.model) c.model = ModelForm::LogLinear;
      require(*c.model == ModelForm::LogLinear || *c.model == ModelForm::PowerLaw,
              to_string(c.command) == std::string_view("pipeline") ? "pipeline --model must be loglinear or powerlaw"
                                                                   : "sensitivity --model must be loglinear or powerlaw");
      require(c.boot >= 2 || c.command == Command::Sensitivity, "--boot must be at least 2");
      require(c.scale > 0.0, "--scale must be positive");
      require(c.groups >= 1 && c.rows >= 2 && c.groups <= c.rows, "--rows/--groups are inconsistent");
      if (c.methods.empty()) c.methods = {Method::GLS, Method::OLS, Method::MAP};
      break;
    case Command::Gen:
      require(c.groups >= 1 && c.rows >= 2 && c.groups <= c.rows, "--rows/--groups are inconsistent");
      break;
  }
}

std::string iso_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Dataset load_or_generate(const RunConfig& c, ExperimentReport& rep_meta_sink, std::ostream& log) {
  if (c.data) return read_dataset_csv(*c.data, CsvReadOptions{c.max_rel_err});
  log << "no --data given; generating a surrogate dataset (" << c.rows << " rows, " << c.groups << " groups)\n";
  rep_meta_sink.metadata["data_source"] = "surrogate-itpa";
  return gen_surrogate_itpa(c.rows, c.groups, derive_seed(c.seed, 0x5u)).data;
}

std::string summary_line(const MethodReport& m) {
  std::ostringstream s;
  s << m.method;
  const auto& r = m.summary;
  for (std::size_t k = 0; k < r.parameter_names.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    if (kk >= r.mean.size()) break;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  %s=%.4g", r.parameter_names[k].c_str(), r.mean[kk]);
    s << buf;
    if (r.n_replicates >= 2) {
      std::snprintf(buf, sizeof(buf), " (sd %.3g)", r.sd[kk]);
      s << buf;
    }
  }
  return s.str();
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Fit: return "fit";
    case Command::Table1: return "table1";
    case Command::Table2: return "table2";
    case Command::Histograms: return "histograms";
    case Command::Pipeline: return "pipeline";
    case Command::Sensitivity: return "sensitivity";
    case Command::Gen: return "gen";
  }
  return "unknown";
}

RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Geodesic least squares regression and comparison estimators", "geols"};
  app.require_subcommand(1);
  app.set_help_flag("-h,--help", "Print help and exit");

  RawFlags raw;
  struct Spec {
    const char* command;
    const char* description;
    std::vector<const char*> options;
  };
  const std::vector<Spec> specs = {
      {"fit", "Fit a dataset CSV with the chosen methods", {"model", "method", "data", "seed", "boot", "out", "config", "threads", "max-rel-err"}},
      {"table1", "Single-predictor outlier Monte Carlo study", {"seed", "mc", "out", "config", "threads"}},
      {"table2", "Single-predictor power-law Monte Carlo study", {"seed", "mc", "out", "config", "threads"}},
      {"histograms", "Relative-error histograms over the coefficient grid", {"kind", "method", "grid", "replicates", "predictors", "seed", "out", "config", "threads"}},
      {"pipeline", "Grouped scaling-law fits with bootstrap intervals", {"model", "method", "data", "seed", "boot", "out", "config", "threads", "rows", "groups", "max-rel-err"}},
      {"sensitivity", "Refit MAP and GLS with modified error bars", {"model", "data", "seed", "scale", "out", "config", "threads", "rows", "groups", "max-rel-err"}},
      {"gen", "Write a synthetic dataset and its metadata", {"kind", "seed", "beta", "predictors", "rows", "groups", "out", "config"}},
  };
  const std::map<std::string, std::string> help = {
      {"model", "Model form: linear|affine|loglinear|powerlaw"},
      {"method", "Comma list of gls,ols,map,tls,rob"},
      {"data", "Dataset CSV (group,y,rel_err_y,x1,rel_err_x1,...)"},
      {"seed", "Master seed"},
      {"boot", "Bootstrap replicates"},
      {"mc", "Monte Carlo runs"},
      {"out", "Output directory"},
      {"config", "JSON config; its values override flags"},
      {"threads", "Worker threads (0 = all cores)"},
      {"kind", "Generator: outlier-1d|outlier-multi|log-1d|log-multi|surrogate-itpa"},
      {"grid", "Sampled coefficient grid points"},
      {"replicates", "Datasets per grid point"},
      {"predictors", "Predictor CSV (x1,x2,x3)"},
      {"rows", "Surrogate rows"},
      {"groups", "Surrogate groups"},
      {"scale", "Error-bar scale factor"},
      {"beta", "True coefficients, comma list"},
      {"max-rel-err", "Upper bound on relative error bars in --data"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& s : specs) {
    CLI::App* sub = app.add_subcommand(s.command, s.description);
    subs[s.command] = sub;
    for (const char* o : s.options) {
      sub->add_option(std::string("--") + o, raw.single[o], help.at(o));
    }
    const std::string cmd = s.command;
    if (cmd == "fit" || cmd == "pipeline" || cmd == "sensitivity") {
      sub->add_option("--predict", raw.predict, "Prediction point x1,x2,... (repeatable)");
    }
    if (cmd == "fit") sub->add_flag("--per-group", raw.per_group, "One sigma_obs per group label");
    if (cmd == "sensitivity") sub->add_flag("--averaged", raw.averaged, "Use dataset-average relative error bars");
  }

  std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig c;
  CLI::App* chosen = app.get_subcommands().front();
  c.command = parse_command(chosen->get_name());
  std::set<std::string> given;
  bool seed_set = false;
  for (const auto& s : specs) {
    if (chosen->get_name() != s.command) continue;
    for (const char* o : s.options) {
      if (chosen->count(std::string("--") + o) == 0) continue;
      given.insert(o);
      const std::string& v = raw.single[o];
      if (std::string(o) == "config") {
        c.config_file = v;
      } else {
        apply_flag(c, o, v);
        if (std::string(o) == "seed") seed_set = true;
      }
    }
  }
  for (const auto& p : raw.predict) c.predict.push_back(parse_real_list("--predict", p));
  if (!raw.predict.empty()) given.insert("predict");
  c.averaged = raw.averaged;
  c.per_group = raw.per_group;
  if (raw.averaged) given.insert("averaged");
  if (raw.per_group) given.insert("per-group");
  if (c.config_file) apply_config_file(c, *c.config_file, given, seed_set);
  if (!seed_set) {
    std::random_device rd;
    c.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    c.seed_generated = true;
    c.warnings.push_back("no seed given; using generated seed " + std::to_string(c.seed));
  }
  validate(c);
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["command"] = std::string(to_string(c.command));
  if (c.model) j["model"] = std::string(to_string(*c.model));
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = methods;
  if (c.data) j["data"] = c.data->string();
  if (c.predictors) j["predictors"] = c.predictors->string();
  j["seed"] = c.seed;
  j["boot"] = c.boot;
  j["mc"] = c.mc;
  j["out"] = c.out.string();
  j["kind"] = std::string(to_string(c.kind));
  j["grid"] = c.grid;
  j["replicates"] = c.replicates;
  j["predict"] = c.predict;
  j["scale"] = c.scale;
  j["averaged"] = c.averaged;
  j["per_group"] = c.per_group;
  j["rows"] = c.rows;
  j["groups"] = c.groups;
  j["beta"] = c.beta;
  j["max_rel_err"] = c.max_rel_err;
  j["optimizer"] = {{"f_tol", c.optim.f_tol},
                    {"x_tol", c.optim.x_tol},
                    {"max_iter", c.optim.max_iter},
                    {"multistart", c.optim.multistart},
                    {"multistart_jitter", c.optim.multistart_jitter},
                    {"seed", c.optim.seed},
                    {"sigma_floor", c.optim.sigma_floor},
                    {"sigma_ceil", c.optim.sigma_ceil}};
  return j.dump(2);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

void emit_outputs(const ExperimentReport& report, const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + config.out.string() + "': " + ec.message());

  write_file_atomic(config.out / "result.json", report_to_json(report));
  std::ostringstream table;
  write_table_csv(table, report);
  write_file_atomic(config.out / "table.csv", table.str());
  if (!report.histograms.empty()) {
    std::ostringstream hist;
    write_histograms_csv(hist, report);
    write_file_atomic(config.out / "histograms.csv", hist.str());
  }
  json meta;
  meta["tool"] = "geols";
  meta["version"] = kVersion;
  meta["command"] = std::string(to_string(config.command));
  meta["seed"] = config.seed;
  meta["seed_generated"] = config.seed_generated;
  meta["threads"] = config.threads;
  meta["compiler"] = __VERSION__;
  meta["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                  std::to_string(EIGEN_MINOR_VERSION);
  meta["created_utc"] = iso_timestamp();
  meta["config"] = json::parse(config_to_json(config));
  meta["warnings"] = config.warnings;
  write_file_atomic(config.out / "meta.json", meta.dump(2) + "\n");
}

ExperimentReport execute(const RunConfig& c, std::ostream& log) {
  ExperimentOptions opt;
  opt.seed = c.seed;
  opt.n_runs = c.mc;
  opt.optim = c.optim;
  opt.parallel.threads = c.threads;

  switch (c.command) {
    case Command::Fit: {
      const Dataset data = read_dataset_csv(*c.data, CsvReadOptions{c.max_rel_err});
      PipelineOptions p;
      p.n_boot = c.boot;
      p.methods = c.methods;
      p.prediction_points = c.predict;
      return run_fit(data, *c.model, p, c.per_group, opt);
    }
    case Command::Table1:
      return run_table1(opt);
    case Command::Table2:
      return run_table2(opt);
    case Command::Histograms: {
      HistogramOptions h;
      h.n_grid_samples = c.grid;
      h.replicates = c.replicates;
      h.methods = c.methods;
      if (c.predictors) h.predictors = PredictorTable::ungrouped(read_predictor_csv(*c.predictors));
      return run_histograms(c.kind, h, opt);
    }
    case Command::Pipeline: {
      ExperimentReport source;
      const Dataset data = load_or_generate(c, source, log);
      PipelineOptions p;
      p.n_boot = c.boot;
      p.methods = c.methods;
      p.prediction_points = c.predict;
      ExperimentReport rep = run_scaling_pipeline(data, *c.model, p, opt);
      for (const auto& [k, v] : source.metadata) rep.metadata[k] = v;
      return rep;
    }
    case Command::Sensitivity: {
      ExperimentReport source;
      const Dataset data = load_or_generate(c, source, log);
      SensitivityOptions s;
      s.scale_factor = c.scale;
      s.averaged_errors = c.averaged;
      s.prediction_points = c.predict;
      ExperimentReport rep = run_errorbar_sensitivity(data, *c.model, s, opt);
      for (const auto& [k, v] : source.metadata) rep.metadata[k] = v;
      return rep;
    }
    case Command::Gen: {
      GeneratedData g = [&]() -> GeneratedData {
        switch (c.kind) {
          case GeneratorKind::Outlier1D: return gen_outlier_1d(c.seed);
          case GeneratorKind::Log1D: return gen_log_1d(c.seed);
          case GeneratorKind::SurrogateItpa: return gen_surrogate_itpa(c.rows, c.groups, c.seed);
          case GeneratorKind::OutlierMulti:
          case GeneratorKind::LogMulti: break;
        }
        PredictorTable table = c.predictors ? PredictorTable::ungrouped(read_predictor_csv(*c.predictors))
                                            : surrogate_predictors(PredictorDesign{}, derive_seed(c.seed, 0xA11CE));
        Eigen::VectorXd beta;
        if (c.beta.empty()) {
          beta = CoefficientGrid::point(CoefficientGrid::sample(1, c.seed).front());
        } else {
          beta = Eigen::Map<const Eigen::VectorXd>(c.beta.data(), static_cast<Eigen::Index>(c.beta.size()));
        }
        return c.kind == GeneratorKind::OutlierMulti ? gen_outlier_multi(table, beta, c.seed)
                                                     : gen_log_multi(table, beta, c.seed);
      }();
      std::error_code ec;
      std::filesystem::create_directories(c.out, ec);
      if (ec) throw std::runtime_error("cannot create output directory '" + c.out.string() + "'");
      std::ostringstream csv;
      write_dataset_csv(csv, g.data);
      write_file_atomic(c.out / "dataset.csv", csv.str());
      write_file_atomic(c.out / "dataset.meta.json", generation_metadata_json(g));
      ExperimentReport rep;
      rep.experiment = "gen";
      rep.metadata["kind"] = std::string(to_string(g.kind));
      rep.metadata["seed"] = std::to_string(c.seed);
      rep.metadata["rows"] = std::to_string(g.data.size());
      rep.metadata["rejections"] = std::to_string(g.rejections);
      return rep;
    }
  }
  throw std::logic_error("unhandled command");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun 'geols --help' for usage\n";
    return 2;
  }
  for (const auto& w : config.warnings) err << "warning: " << w << '\n';
  try {
    const ExperimentReport report = execute(config, err);
    emit_outputs(report, config);
    out << report.experiment << " finished; outputs in " << config.out.string() << '\n';
    for (const auto& m : report.methods) out << summary_line(m) << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace geols
