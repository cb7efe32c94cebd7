#pragma once

// Report serialization: result.json (lossless round trip), the table CSV, the
// histogram CSV `method,parameter,bin_low,bin_high,mass` and per-replicate CSV.

#include <iosfwd>
#include <string>

#include "geols/experiments.hpp"
#include "geols/resample.hpp"

namespace geols {

std::string report_to_json(const ExperimentReport& report);
/// Throws std::runtime_error on malformed input.
ExperimentReport report_from_json(const std::string& text);

/// `method,quantity,mean,sd,ci95_low,ci95_high,n`: coefficient summaries,
/// predictions, group sigmas (as relative errors) and sensitivity shifts.
void write_table_csv(std::ostream& out, const ExperimentReport& report);

/// Underflow and overflow rows use -inf and inf as the open edge.
void write_histograms_csv(std::ostream& out, const ExperimentReport& report);

/// `replicate,<parameter names...>`, one row per successful replicate.
void write_replicates_csv(std::ostream& out, const ResampleReport& report);

}  // namespace geols
