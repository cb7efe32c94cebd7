#pragma once

// Dataset CSV schema:
//   group,y,rel_err_y,x1,rel_err_x1,...,xP,rel_err_xP
// Relative error bars are fractions of the measured value. Fields are not
// quoted, so group labels must not contain commas.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "geols/models.hpp"

namespace geols {

/// Parse failure carrying the 1-based line number of the offending row.
class CsvError : public std::runtime_error {
public:
  CsvError(std::size_t line, const std::string& message, const std::string& source = {});
  std::size_t line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

private:
  std::size_t line_;
  std::string message_;
};

struct CsvReadOptions {
  /// Relative error bars must be strictly below this bound.
  double max_rel_err = 1.0;
};

Dataset read_dataset_csv(std::istream& in, const CsvReadOptions& options = {});
Dataset read_dataset_csv(const std::filesystem::path& path, const CsvReadOptions& options = {});

/// Writes relative error bars; throws std::domain_error when a nonzero error
/// bar sits on a zero value (no relative form exists).
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Predictor-source file: header `x1,x2,...` followed by numeric rows.
std::vector<std::vector<double>> read_predictor_csv(std::istream& in);
std::vector<std::vector<double>> read_predictor_csv(const std::filesystem::path& path);
void write_predictor_csv(std::ostream& out, const std::vector<std::vector<double>>& rows);

}  // namespace geols
