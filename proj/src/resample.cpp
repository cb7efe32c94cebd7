#include "geols/resample.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <thread>

#include "geols/random.hpp"
#include "numeric_util.hpp"

namespace geols {
namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<std::string> default_names(std::vector<std::string> names, Eigen::Index count) {
  if (!names.empty()) {
    if (static_cast<Eigen::Index>(names.size()) != count) {
      throw std::invalid_argument("parameter name count does not match estimate length");
    }
    return names;
  }
  for (Eigen::Index k = 0; k < count; ++k) names.push_back("p" + std::to_string(k));
  return names;
}

}  // namespace

void parallel_for(std::size_t n, const ParallelOptions& options, const std::function<void(std::size_t)>& fn) {
  std::size_t threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = std::min(threads, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ResampleReport summarize_replicates(const Eigen::MatrixXd& est, std::vector<std::string> names) {
  if (est.rows() < 2) throw ResampleError("need at least two successful replicates");
  ResampleReport rep;
  rep.parameter_names = default_names(std::move(names), est.cols());
  rep.raw_estimates = est;
  rep.n_requested = rep.n_replicates = static_cast<std::size_t>(est.rows());
  for (Eigen::Index r = 0; r < est.rows(); ++r) rep.replicate_ids.push_back(static_cast<std::size_t>(r));
  const auto m = est.cols();
  rep.mean.resize(m);
  rep.sd.resize(m);
  const double n = static_cast<double>(est.rows());
  for (Eigen::Index k = 0; k < m; ++k) {
    std::vector<double> col(est.rows());
    for (Eigen::Index r = 0; r < est.rows(); ++r) col[r] = est(r, k);
    const double mean = pairwise_sum(col) / n;
    std::vector<double> dev(col.size());
    for (std::size_t r = 0; r < col.size(); ++r) dev[r] = (col[r] - mean) * (col[r] - mean);
    const double sd = std::sqrt(pairwise_sum(dev) / (n - 1.0));
    rep.mean[k] = mean;
    rep.sd[k] = sd;
    rep.ci95.emplace_back(mean - 1.96 * sd, mean + 1.96 * sd);
    rep.percentile95.emplace_back(quantile(col, 0.025), quantile(col, 0.975));
  }
  return rep;
}

ResampleReport run_replicates(std::size_t n, const ReplicateFn& fn, std::vector<std::string> names,
                              const ParallelOptions& parallel) {
  if (n < 2) throw std::invalid_argument("need at least two replicates");
  std::vector<std::optional<Eigen::VectorXd>> results(n);
  std::vector<std::string> messages(n);
  parallel_for(n, parallel, [&](std::size_t r) {
    try {
      Eigen::VectorXd v = fn(r);
      if (!v.allFinite()) {
        messages[r] = "non-finite estimate";
        return;
      }
      results[r] = std::move(v);
    } catch (const std::exception& e) {
      messages[r] = e.what();
    }
  });

  std::vector<std::size_t> ok;
  std::vector<std::string> failures;
  for (std::size_t r = 0; r < n; ++r) {
    if (results[r]) {
      ok.push_back(r);
    } else {
      failures.push_back("replicate " + std::to_string(r) + ": " + messages[r]);
    }
  }
  if (static_cast<double>(failures.size()) > kMaxFailureFraction * static_cast<double>(n)) {
    throw ResampleError(std::to_string(failures.size()) + " of " + std::to_string(n) +
                        " replicates failed; first: " + failures.front());
  }
  if (ok.size() < 2) throw ResampleError("fewer than two replicates succeeded");
  const Eigen::Index m = results[ok.front()]->size();
  Eigen::MatrixXd est(static_cast<Eigen::Index>(ok.size()), m);
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (results[ok[i]]->size() != m) throw ResampleError("replicates returned estimates of different lengths");
    est.row(static_cast<Eigen::Index>(i)) = results[ok[i]]->transpose();
  }
  ResampleReport rep = summarize_replicates(est, std::move(names));
  rep.replicate_ids = ok;
  rep.n_requested = n;
  rep.failures = std::move(failures);
  return rep;
}

ResampleReport monte_carlo(const ExperimentGenerator& generator, const Estimator& estimator, std::size_t n_runs,
                           std::uint64_t seed, std::vector<std::string> names, const ParallelOptions& parallel) {
  return run_replicates(
      n_runs, [&](std::size_t r) { return estimator(generator.generate(derive_seed(seed, r)).data); },
      std::move(names), parallel);
}

std::vector<std::size_t> bootstrap_indices(std::size_t n_rows, std::uint64_t seed, std::size_t replicate) {
  RandomStream rng(derive_seed(seed, replicate));
  std::vector<std::size_t> idx(n_rows);
  for (auto& i : idx) i = rng.uniform_index(n_rows);
  return idx;
}

ResampleReport bootstrap(const Dataset& data, const Estimator& estimator, std::size_t n_boot, std::uint64_t seed,
                         std::vector<std::string> names, const ParallelOptions& parallel) {
  return run_replicates(
      n_boot,
      [&](std::size_t r) {
        const auto idx = bootstrap_indices(data.size(), seed, r);
        return estimator(data.subset(idx));
      },
      std::move(names), parallel);
}

}  // namespace geols
