#pragma once

// Monte Carlo replication and row bootstrap. Replicate r always draws from
// the substream derive_seed(seed, r) and results are reduced in replicate
// order, so reports do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "geols/datagen.hpp"
#include "geols/models.hpp"

namespace geols {

/// 0 means std::thread::hardware_concurrency().
struct ParallelOptions {
  std::size_t threads = 1;
};

/// Runs fn(0..n-1) on up to `threads` workers. The first exception (lowest
/// index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const ParallelOptions& options, const std::function<void(std::size_t)>& fn);

class ResampleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ResampleReport {
  std::vector<std::string> parameter_names;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
  /// mean +- 1.96 sd.
  std::vector<std::pair<double, double>> ci95;
  /// 2.5% and 97.5% empirical quantiles, kept for diagnostics.
  std::vector<std::pair<double, double>> percentile95;
  /// One row per successful replicate, in replicate order.
  Eigen::MatrixXd raw_estimates;
  std::vector<std::size_t> replicate_ids;
  std::size_t n_requested = 0;
  std::size_t n_replicates = 0;
  std::vector<std::string> failures;
};

using Estimator = std::function<Eigen::VectorXd(const Dataset&)>;
using ReplicateFn = std::function<Eigen::VectorXd(std::size_t replicate)>;

/// Maximum tolerated share of failed replicates.
inline constexpr double kMaxFailureFraction = 0.10;

/// Runs fn for every replicate, records exceptions and non-finite outputs as
/// failures and summarizes the rest. Throws ResampleError when more than 10%
/// fail or fewer than two succeed.
ResampleReport run_replicates(std::size_t n, const ReplicateFn& fn, std::vector<std::string> parameter_names,
                              const ParallelOptions& parallel = {});

/// Summary statistics of a replicate matrix (rows = replicates).
ResampleReport summarize_replicates(const Eigen::MatrixXd& estimates, std::vector<std::string> parameter_names);

ResampleReport monte_carlo(const ExperimentGenerator& generator, const Estimator& estimator, std::size_t n_runs,
                           std::uint64_t seed, std::vector<std::string> parameter_names = {},
                           const ParallelOptions& parallel = {});

/// Resamples rows with replacement (same size) n_boot times.
ResampleReport bootstrap(const Dataset& data, const Estimator& estimator, std::size_t n_boot, std::uint64_t seed,
                         std::vector<std::string> parameter_names = {}, const ParallelOptions& parallel = {});

/// Row indices of bootstrap replicate r.
std::vector<std::size_t> bootstrap_indices(std::size_t n_rows, std::uint64_t seed, std::size_t replicate);

}  // namespace geols
