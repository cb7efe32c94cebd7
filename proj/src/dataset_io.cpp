#include "geols/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "text_format.hpp"

namespace geols {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool blank(std::string_view s) { return trim(s).empty(); }

double number_field(std::string_view field, std::size_t line, const char* name) {
  auto v = parse_double(field);
  if (!v || !std::isfinite(*v)) {
    throw CsvError(line, std::string("cannot parse ") + name + " value '" + std::string(trim(field)) + "'");
  }
  return *v;
}

double rel_field(std::string_view field, std::size_t line, const char* name, const CsvReadOptions& opt) {
  const double v = number_field(field, line, name);
  if (v < 0.0) throw CsvError(line, std::string(name) + " must be nonnegative");
  if (!(v < opt.max_rel_err)) {
    throw CsvError(line, std::string(name) + " = " + format_double(v) + " is not below the bound " +
                             format_double(opt.max_rel_err));
  }
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

CsvError::CsvError(std::size_t line, const std::string& message, const std::string& source)
    : std::runtime_error((source.empty() ? "line " : source + ":") + std::to_string(line) + ": " + message),
      line_(line),
      message_(message) {}

Dataset read_dataset_csv(std::istream& in, const CsvReadOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) break;
  }
  if (line_no == 0 || blank(line)) throw CsvError(line_no, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_fields(line);
  if (header.size() < 5 || (header.size() - 3) % 2 != 0) {
    throw CsvError(line_no, "header must be group,y,rel_err_y followed by xK,rel_err_xK pairs");
  }
  const std::size_t p = (header.size() - 3) / 2;
  std::vector<std::string> expected = {"group", "y", "rel_err_y"};
  for (std::size_t k = 1; k <= p; ++k) {
    expected.push_back("x" + std::to_string(k));
    expected.push_back("rel_err_x" + std::to_string(k));
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) != expected[i]) {
      throw CsvError(line_no, "header column " + std::to_string(i + 1) + " is '" + std::string(trim(header[i])) +
                                  "', expected '" + expected[i] + "'");
    }
  }

  std::vector<Observation> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw CsvError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                  std::to_string(fields.size()));
    }
    const std::string group(trim(fields[0]));
    if (group.empty()) throw CsvError(line_no, "empty group label");
    const double y = number_field(fields[1], line_no, "y");
    const double ry = rel_field(fields[2], line_no, "rel_err_y", options);
    std::vector<double> x(p);
    std::vector<double> rx(p);
    for (std::size_t k = 0; k < p; ++k) {
      x[k] = number_field(fields[3 + 2 * k], line_no, "x");
      rx[k] = rel_field(fields[4 + 2 * k], line_no, "rel_err_x", options);
    }
    rows.push_back(Observation::from_relative(group, y, ry, std::move(x), rx));
  }
  if (rows.empty()) throw CsvError(line_no, "no data rows");
  return Dataset(std::move(rows));
}

Dataset read_dataset_csv(const std::filesystem::path& path, const CsvReadOptions& options) {
  auto in = open_input(path);
  try {
    return read_dataset_csv(in, options);
  } catch (const CsvError& e) {
    throw CsvError(e.line(), e.message(), path.string());
  }
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const std::size_t p = data.n_predictors();
  out << "group,y,rel_err_y";
  for (std::size_t k = 1; k <= p; ++k) out << ",x" << k << ",rel_err_x" << k;
  out << '\n';
  for (const Observation& o : data.rows()) {
    out << o.group << ',' << format_double(o.y) << ',' << format_double(o.rel_err_y());
    for (std::size_t k = 0; k < p; ++k) out << ',' << format_double(o.x[k]) << ',' << format_double(o.rel_err_x(k));
    out << '\n';
  }
}

std::vector<std::vector<double>> read_predictor_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) break;
  }
  if (line_no == 0 || blank(line)) throw CsvError(line_no, "missing header row");
  const auto header = split_fields(line);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) != "x" + std::to_string(i + 1)) {
      throw CsvError(line_no, "predictor header must read x1,x2,...");
    }
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw CsvError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                  std::to_string(fields.size()));
    }
    std::vector<double> row;
    for (auto f : fields) row.push_back(number_field(f, line_no, "predictor"));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError(line_no, "no predictor rows");
  return rows;
}

std::vector<std::vector<double>> read_predictor_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_predictor_csv(in);
  } catch (const CsvError& e) {
    throw CsvError(e.line(), e.message(), path.string());
  }
}

void write_predictor_csv(std::ostream& out, const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("write_predictor_csv: no rows");
  for (std::size_t k = 0; k < rows.front().size(); ++k) out << (k ? ",x" : "x") << k + 1;
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
}

}  // namespace geols
