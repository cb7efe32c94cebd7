#include "geols/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "geols/random.hpp"

namespace geols {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Counted {
public:
  explicit Counted(const Objective& f) : f_(f) {}
  double operator()(const Eigen::VectorXd& x) {
    ++count;
    try {
      const double v = f_(x);
      return std::isnan(v) ? kInf : v;
    } catch (const std::domain_error&) {
      return kInf;
    }
  }
  std::size_t count = 0;

private:
  const Objective& f_;
};

double scaled(double v) { return std::max(1.0, std::abs(v)); }

bool small_change(double f_old, double f_new, const Eigen::VectorXd& x_old, const Eigen::VectorXd& x_new,
                  const OptimOptions& opt) {
  const double df = std::abs(f_old - f_new);
  const double dx = (x_new - x_old).lpNorm<Eigen::Infinity>();
  return df <= opt.f_tol * scaled(f_new) && dx <= opt.x_tol * scaled(x_new.lpNorm<Eigen::Infinity>());
}

// Forward differences, stepping backwards at an upper bound so every probe
// stays feasible.
Eigen::VectorXd gradient(Counted& f, const Eigen::VectorXd& x, double fx, const Bounds& b) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double h = 1e-6 * (1.0 + std::abs(x[i]));
    if (x[i] + h > b.upper[i]) h = -h;
    probe[i] = x[i] + h;
    const double step = probe[i] - x[i];
    g[i] = (f(probe) - fx) / step;
    probe[i] = x[i];
  }
  return g;
}

}  // namespace

Bounds Bounds::unbounded(Eigen::Index n) {
  return {Eigen::VectorXd::Constant(n, -kInf), Eigen::VectorXd::Constant(n, kInf)};
}

Eigen::VectorXd Bounds::project(Eigen::VectorXd x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

OptimResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0, const Bounds& bounds,
                        const OptimOptions& opt) {
  const Eigen::Index n = x0.size();
  Counted f(objective);
  auto reflect_into = [&](Eigen::VectorXd x) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (x[i] < bounds.lower[i]) x[i] = bounds.lower[i] + (bounds.lower[i] - x[i]);
      if (x[i] > bounds.upper[i]) x[i] = bounds.upper[i] - (x[i] - bounds.upper[i]);
    }
    return bounds.project(std::move(x));
  };

  std::vector<Eigen::VectorXd> simplex(n + 1, bounds.project(x0));
  std::vector<double> fv(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = simplex[0];
    const double step = v[i] != 0.0 ? 0.05 * std::abs(v[i]) : 2.5e-4;
    v[i] += step;
    if (v[i] > bounds.upper[i]) v[i] = simplex[0][i] - step;
    simplex[i + 1] = reflect_into(v);
  }
  for (Eigen::Index i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  std::vector<Eigen::Index> order(n + 1);
  OptimResult res;
  res.method = "nelder-mead";
  std::size_t it = 0;
  for (; it < opt.max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const Eigen::VectorXd& best = simplex[order[0]];
    double fspread = 0.0;
    double xspread = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i) {
      fspread = std::max(fspread, std::abs(fv[order[i]] - fv[order[0]]));
      xspread = std::max(xspread, (simplex[order[i]] - best).lpNorm<Eigen::Infinity>());
    }
    if (std::isfinite(fv[order[0]]) && fspread <= opt.f_tol * scaled(fv[order[0]]) &&
        xspread <= opt.x_tol * scaled(best.lpNorm<Eigen::Infinity>())) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += simplex[order[i]];
    centroid /= static_cast<double>(n);
    const Eigen::Index worst = order[n];
    const double f_best = fv[order[0]];
    const double f_second = fv[order[n - 1]];

    const Eigen::VectorXd xr = reflect_into(centroid + (centroid - simplex[worst]));
    const double fr = f(xr);
    if (fr < f_best) {
      const Eigen::VectorXd xe = reflect_into(centroid + 2.0 * (centroid - simplex[worst]));
      const double fe = f(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < f_second) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Eigen::VectorXd xc = outside ? reflect_into(centroid + 0.5 * (xr - centroid))
                                       : reflect_into(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    const Eigen::VectorXd anchor = simplex[order[0]];
    for (Eigen::Index i = 1; i <= n; ++i) {
      simplex[order[i]] = bounds.project(anchor + 0.5 * (simplex[order[i]] - anchor));
      fv[order[i]] = f(simplex[order[i]]);
    }
  }
  const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
  res.x = simplex[best];
  res.f = fv[best];
  res.iterations = it;
  res.evaluations = f.count;
  res.converged = res.converged && std::isfinite(res.f);
  return res;
}

OptimResult minimize_bounded(const Objective& objective, const Eigen::VectorXd& x0, const Bounds& bounds,
                             const OptimOptions& opt) {
  const Eigen::Index n = x0.size();
  if (bounds.lower.size() != n || bounds.upper.size() != n) {
    throw std::invalid_argument("minimize_bounded: bounds dimension mismatch");
  }
  if ((bounds.lower.array() > bounds.upper.array()).any()) {
    throw std::invalid_argument("minimize_bounded: lower bound above upper bound");
  }
  Counted f(objective);
  Eigen::VectorXd x = bounds.project(x0);
  double fx = f(x);
  if (!std::isfinite(fx)) throw std::domain_error("minimize_bounded: objective not finite at the initial point");
  Eigen::VectorXd g = gradient(f, x, fx, bounds);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);

  OptimResult res;
  res.method = "bfgs";
  bool stalled = false;
  std::size_t it = 0;
  for (; it < opt.max_iter; ++it) {
    Eigen::VectorXd free = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((x[i] <= bounds.lower[i] && g[i] > 0.0) || (x[i] >= bounds.upper[i] && g[i] < 0.0)) free[i] = 0.0;
    }
    const Eigen::VectorXd gf = g.cwiseProduct(free);
    if (gf.lpNorm<Eigen::Infinity>() == 0.0) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd d = -(free.asDiagonal() * H * gf);
    if (!(d.dot(gf) < 0.0)) {
      H.setIdentity();
      d = -gf;
    }
    // Projected backtracking with an Armijo test on the actual displacement.
    double alpha = 1.0;
    Eigen::VectorXd x_new;
    double f_new = kInf;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, alpha *= 0.5) {
      x_new = bounds.project(x + alpha * d);
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    const Eigen::VectorXd g_new = gradient(f, x_new, f_new, bounds);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g_new - g;
    const bool done = small_change(fx, f_new, x, x_new, opt);
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * yv.transpose()) * H * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
    }
    x = x_new;
    fx = f_new;
    g = g_new;
    if (done && alpha < 1.0) {
      // A tiny damped step is not evidence of a minimum; let the simplex decide.
      stalled = true;
      ++it;
      break;
    }
    if (done) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.x = x;
  res.f = fx;
  res.iterations = it;
  res.evaluations = f.count;
  if (stalled) {
    OptimOptions nm_opt = opt;
    nm_opt.max_iter = opt.max_iter > it ? opt.max_iter - it : 0;
    OptimResult nm = nelder_mead(objective, x, bounds, nm_opt);
    res.method = "bfgs+nelder-mead";
    res.iterations += nm.iterations;
    res.evaluations += nm.evaluations;
    res.converged = nm.converged;
    if (nm.f <= res.f) {
      res.x = nm.x;
      res.f = nm.f;
    }
  }
  return res;
}

OptimResult minimize_multistart(const Objective& f, const Eigen::VectorXd& x0, const Bounds& bounds,
                                const OptimOptions& opt) {
  OptimResult best = minimize_bounded(f, x0, bounds, opt);
  RandomStream rng(derive_seed(opt.seed, 0x6d73));
  for (std::size_t k = 0; k < opt.multistart; ++k) {
    Eigen::VectorXd start = x0;
    for (Eigen::Index i = 0; i < start.size(); ++i) {
      start[i] *= 1.0 + opt.multistart_jitter * (2.0 * rng.uniform() - 1.0);
    }
    OptimResult r;
    try {
      r = minimize_bounded(f, bounds.project(start), bounds, opt);
    } catch (const std::domain_error&) {
      continue;
    }
    if (r.f < best.f) best = std::move(r);
  }
  return best;
}

}  // namespace geols
