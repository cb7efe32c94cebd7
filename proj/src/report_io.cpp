#include "geols/report_io.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "text_format.hpp"

namespace geols {
namespace {

using json = nlohmann::ordered_json;

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

double to_number(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::runtime_error("unexpected string '" + s + "' where a number was expected");
  }
  return j.get<double>();
}

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

Eigen::VectorXd to_eigen(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = to_number(a[i]);
  return v;
}

std::vector<double> to_vector(const json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(to_number(x));
  return v;
}

json pairs(const std::vector<std::pair<double, double>>& v) {
  json a = json::array();
  for (const auto& [lo, hi] : v) a.push_back(json::array({number(lo), number(hi)}));
  return a;
}

std::vector<std::pair<double, double>> to_pairs(const json& a) {
  std::vector<std::pair<double, double>> v;
  for (const auto& p : a) v.emplace_back(to_number(p.at(0)), to_number(p.at(1)));
  return v;
}

json resample_json(const ResampleReport& r) {
  json j;
  j["parameters"] = r.parameter_names;
  j["mean"] = vec(r.mean);
  j["sd"] = vec(r.sd);
  j["ci95"] = pairs(r.ci95);
  j["percentile95"] = pairs(r.percentile95);
  j["n_requested"] = r.n_requested;
  j["n_replicates"] = r.n_replicates;
  j["replicate_ids"] = r.replicate_ids;
  j["failures"] = r.failures;
  json raw = json::array();
  for (Eigen::Index i = 0; i < r.raw_estimates.rows(); ++i) raw.push_back(vec(Eigen::VectorXd(r.raw_estimates.row(i).transpose())));
  j["raw_estimates"] = raw;
  return j;
}

ResampleReport resample_from(const json& j) {
  ResampleReport r;
  r.parameter_names = j.at("parameters").get<std::vector<std::string>>();
  r.mean = to_eigen(j.at("mean"));
  r.sd = to_eigen(j.at("sd"));
  r.ci95 = to_pairs(j.at("ci95"));
  r.percentile95 = to_pairs(j.at("percentile95"));
  r.n_requested = j.at("n_requested").get<std::size_t>();
  r.n_replicates = j.at("n_replicates").get<std::size_t>();
  r.replicate_ids = j.at("replicate_ids").get<std::vector<std::size_t>>();
  r.failures = j.at("failures").get<std::vector<std::string>>();
  const auto& raw = j.at("raw_estimates");
  r.raw_estimates.resize(static_cast<Eigen::Index>(raw.size()), static_cast<Eigen::Index>(r.parameter_names.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].size() != r.parameter_names.size()) throw std::runtime_error("raw estimate row has the wrong width");
    r.raw_estimates.row(static_cast<Eigen::Index>(i)) = to_eigen(raw[i]).transpose();
  }
  return r;
}

std::string cell(double v) { return std::isnan(v) ? "" : format_double(v); }

}  // namespace

std::string report_to_json(const ExperimentReport& rep) {
  json j;
  j["experiment"] = rep.experiment;
  j["metadata"] = json::object();
  for (const auto& [k, v] : rep.metadata) j["metadata"][k] = v;
  json methods = json::array();
  for (const auto& m : rep.methods) {
    json e;
    e["method"] = m.method;
    e["point_estimate"] = vec(m.point_estimate);
    e["summary"] = resample_json(m.summary);
    methods.push_back(e);
  }
  j["methods"] = methods;
  json hists = json::array();
  for (const auto& h : rep.histograms) {
    json e;
    e["method"] = h.method;
    e["parameter"] = h.parameter;
    e["count"] = h.count;
    e["within_20"] = number(h.within_20);
    e["underflow"] = number(h.underflow);
    e["overflow"] = number(h.overflow);
    e["mass"] = vec(h.mass);
    hists.push_back(e);
  }
  j["histograms"] = hists;
  json groups = json::array();
  for (const auto& g : rep.group_sigma) {
    groups.push_back({{"method", g.method}, {"group", g.group}, {"sigma_obs", number(g.sigma_obs)},
                      {"sd", number(g.sd)}, {"rel_err", number(g.rel_err)}});
  }
  j["group_sigma"] = groups;
  json preds = json::array();
  for (const auto& p : rep.predictions) {
    preds.push_back({{"method", p.method}, {"x", vec(p.x)}, {"value", number(p.value)}, {"sd", number(p.sd)},
                     {"ci95", json::array({number(p.ci_low), number(p.ci_high)})}});
  }
  j["predictions"] = preds;
  json shifts = json::array();
  for (const auto& s : rep.shifts) {
    shifts.push_back({{"method", s.method}, {"quantity", s.quantity}, {"baseline", number(s.baseline)},
                      {"modified", number(s.modified)}, {"relative_change", number(s.relative_change)}});
  }
  j["shifts"] = shifts;
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("result JSON does not parse: ") + e.what());
  }
  try {
    ExperimentReport rep;
    rep.experiment = j.at("experiment").get<std::string>();
    for (const auto& [k, v] : j.at("metadata").items()) rep.metadata[k] = v.get<std::string>();
    for (const auto& e : j.at("methods")) {
      rep.methods.push_back({e.at("method").get<std::string>(), resample_from(e.at("summary")),
                             to_vector(e.at("point_estimate"))});
    }
    for (const auto& e : j.at("histograms")) {
      Histogram h;
      h.method = e.at("method").get<std::string>();
      h.parameter = e.at("parameter").get<std::string>();
      h.count = e.at("count").get<std::size_t>();
      h.within_20 = to_number(e.at("within_20"));
      h.underflow = to_number(e.at("underflow"));
      h.overflow = to_number(e.at("overflow"));
      h.mass = to_vector(e.at("mass"));
      rep.histograms.push_back(std::move(h));
    }
    for (const auto& e : j.at("group_sigma")) {
      rep.group_sigma.push_back({e.at("method").get<std::string>(), e.at("group").get<std::string>(),
                                 to_number(e.at("sigma_obs")), to_number(e.at("sd")), to_number(e.at("rel_err"))});
    }
    for (const auto& e : j.at("predictions")) {
      rep.predictions.push_back({e.at("method").get<std::string>(), to_vector(e.at("x")), to_number(e.at("value")),
                                 to_number(e.at("sd")), to_number(e.at("ci95").at(0)),
                                 to_number(e.at("ci95").at(1))});
    }
    for (const auto& e : j.at("shifts")) {
      rep.shifts.push_back({e.at("method").get<std::string>(), e.at("quantity").get<std::string>(),
                            to_number(e.at("baseline")), to_number(e.at("modified")),
                            to_number(e.at("relative_change"))});
    }
    return rep;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("result JSON has an unexpected shape: ") + e.what());
  }
}

void write_table_csv(std::ostream& out, const ExperimentReport& rep) {
  out << "method,quantity,mean,sd,ci95_low,ci95_high,n\n";
  for (const auto& m : rep.methods) {
    const auto& s = m.summary;
    for (std::size_t k = 0; k < s.parameter_names.size(); ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      out << m.method << ',' << s.parameter_names[k] << ',' << cell(s.mean[kk]) << ',' << cell(s.sd[kk]) << ','
          << cell(s.ci95[k].first) << ',' << cell(s.ci95[k].second) << ',' << s.n_replicates << '\n';
    }
  }
  std::size_t index = 0;
  std::string last;
  for (const auto& p : rep.predictions) {
    index = p.method == last ? index + 1 : 1;
    last = p.method;
    out << p.method << ",prediction" << index << ',' << cell(p.value) << ',' << cell(p.sd) << ',' << cell(p.ci_low)
        << ',' << cell(p.ci_high) << ",\n";
  }
  for (const auto& g : rep.group_sigma) {
    out << g.method << ",rel_err[" << g.group << "]," << cell(g.rel_err) << ",,,,\n";
  }
  for (const auto& s : rep.shifts) {
    out << s.method << ",shift:" << s.quantity << ',' << cell(s.relative_change) << ",,,,\n";
  }
}

void write_histograms_csv(std::ostream& out, const ExperimentReport& rep) {
  out << "method,parameter,bin_low,bin_high,mass\n";
  for (const auto& h : rep.histograms) {
    out << h.method << ',' << h.parameter << ",-inf," << format_double(Histogram::kLow) << ','
        << format_double(h.underflow) << '\n';
    for (std::size_t i = 0; i < h.mass.size(); ++i) {
      out << h.method << ',' << h.parameter << ',' << format_double(h.bin_low(i)) << ','
          << format_double(h.bin_high(i)) << ',' << format_double(h.mass[i]) << '\n';
    }
    out << h.method << ',' << h.parameter << ',' << format_double(Histogram::kHigh) << ",inf,"
        << format_double(h.overflow) << '\n';
  }
}

void write_replicates_csv(std::ostream& out, const ResampleReport& r) {
  out << "replicate";
  for (const auto& n : r.parameter_names) out << ',' << n;
  out << '\n';
  for (Eigen::Index i = 0; i < r.raw_estimates.rows(); ++i) {
    out << (static_cast<std::size_t>(i) < r.replicate_ids.size() ? r.replicate_ids[static_cast<std::size_t>(i)]
                                                                  : static_cast<std::size_t>(i));
    for (Eigen::Index k = 0; k < r.raw_estimates.cols(); ++k) out << ',' << cell(r.raw_estimates(i, k));
    out << '\n';
  }
}

}  // namespace geols
