#include "geols/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "text_format.hpp"

namespace geols {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kDeltaCap = 1.0 - 1e-15;

// Hyperbolic arc-length coordinate along a half circle: ds = dphi / sin(phi).
double arc_coordinate(double phi) { return std::log(std::tan(0.5 * phi)); }

double angle_from_arc(double s) { return 2.0 * std::atan(std::exp(s)); }

}  // namespace

GaussianPoint::GaussianPoint(double mu, double sigma) : mu_(mu), sigma_(sigma) {
  if (!std::isfinite(mu) || !std::isfinite(sigma)) {
    throw std::domain_error("GaussianPoint: mu and sigma must be finite");
  }
  if (!(sigma > 0.0)) {
    throw std::domain_error("GaussianPoint: sigma must be > 0, got " + std::to_string(sigma));
  }
}

double rao_distance(const GaussianPoint& p, const GaussianPoint& q) {
  const double dmu = p.mu() - q.mu();
  const double dmu2 = dmu * dmu;
  const double ds = p.sigma() - q.sigma();
  const double ss = p.sigma() + q.sigma();
  const double num = dmu2 + 2.0 * ds * ds;
  if (num == 0.0) return 0.0;
  const double den = dmu2 + 2.0 * ss * ss;
  const double delta = std::min(std::sqrt(num / den), kDeltaCap);
  // 1 - delta^2 = 8 s1 s2 / den exactly; forming it directly avoids the
  // cancellation in 1 - delta for distant points.
  const double one_minus_delta2 = 8.0 * p.sigma() * q.sigma() / den;
  const double one_minus_delta = std::max(one_minus_delta2 / (1.0 + delta), 1.0 - kDeltaCap);
  // atanh(d) = 0.5 * log1p(2d / (1 - d))
  return kSqrt2 * std::log1p(2.0 * delta / one_minus_delta);
}

double fixed_sigma_distance(double mu1, double mu2, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("fixed_sigma_distance: sigma must be finite and > 0");
  }
  return std::abs(mu1 - mu2) / sigma;
}

GeodesicPath geodesic_between(const GaussianPoint& p, const GaussianPoint& q) {
  if (p == q) {
    throw std::invalid_argument("geodesic_between: endpoints coincide; the path is degenerate");
  }
  const double u1 = p.mu() / kSqrt2;
  const double u2 = q.mu() / kSqrt2;
  const double du = u2 - u1;
  const double scale = std::abs(u1) + std::abs(u2) + p.sigma() + q.sigma();
  if (std::abs(du) <= 1e-14 * scale) {
    return GeodesicPath{p, q, GeodesicKind::VerticalLine, u1, 0.0, 0.0, 0.0};
  }
  // Offsets of the endpoints from the circle center, written without forming
  // the center itself so nearly vertical geodesics keep their precision.
  const double dsig2 = q.sigma() * q.sigma() - p.sigma() * p.sigma();
  const double off1 = (-du * du - dsig2) / (2.0 * du);
  const double off2 = (du * du - dsig2) / (2.0 * du);
  GeodesicPath path{p, q, GeodesicKind::HalfCircle, u1 - off1, std::hypot(off1, p.sigma()), 0.0, 0.0};
  path.angle_start = std::atan2(p.sigma(), off1);
  path.angle_end = std::atan2(q.sigma(), off2);
  return path;
}

GaussianPoint geodesic_point(const GeodesicPath& path, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::out_of_range("geodesic_point: t must lie in [0, 1]");
  }
  if (t == 0.0) return path.start;
  if (t == 1.0) return path.end;
  if (path.kind == GeodesicKind::VerticalLine) {
    const double log_ratio = std::log(path.end.sigma() / path.start.sigma());
    return {path.start.mu(), path.start.sigma() * std::exp(t * log_ratio)};
  }
  const double s0 = arc_coordinate(path.angle_start);
  const double s1 = arc_coordinate(path.angle_end);
  const double phi = angle_from_arc(s0 + t * (s1 - s0));
  const double u = path.start.mu() / kSqrt2 + path.radius * (std::cos(phi) - std::cos(path.angle_start));
  return {kSqrt2 * u, path.radius * std::sin(phi)};
}

double numeric_geodesic_length(const GeodesicPath& path, std::size_t n_steps) {
  if (n_steps < 2) {
    throw std::invalid_argument("numeric_geodesic_length: n_steps must be >= 2");
  }
  const std::size_t n = n_steps + (n_steps % 2);

  // Parameterization theta(tau) = (mu, sigma) and its derivative; the integrand
  // is the Fisher line element sqrt(g_ij dtheta^i dtheta^j).
  double a = 0.0;
  double b = 0.0;
  auto line_element = [&](double tau) {
    double mu_dot = 0.0;
    double sigma = 0.0;
    double sigma_dot = 0.0;
    if (path.kind == GeodesicKind::VerticalLine) {
      sigma = tau;
      sigma_dot = 1.0;
    } else {
      mu_dot = -kSqrt2 * path.radius * std::sin(tau);
      sigma = path.radius * std::sin(tau);
      sigma_dot = path.radius * std::cos(tau);
    }
    const double g_mumu = 1.0 / (sigma * sigma);
    const double g_sigsig = 2.0 / (sigma * sigma);
    return std::sqrt(g_mumu * mu_dot * mu_dot + g_sigsig * sigma_dot * sigma_dot);
  };

  if (path.kind == GeodesicKind::VerticalLine) {
    a = path.start.sigma();
    b = path.end.sigma();
  } else {
    a = path.angle_start;
    b = path.angle_end;
  }
  const double h = (b - a) / static_cast<double>(n);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double v = line_element(a + static_cast<double>(i) * h);
    (i % 2 == 1 ? odd : even) += v;
  }
  const double total = line_element(a) + line_element(b) + 4.0 * odd + 2.0 * even;
  return std::abs(h) / 3.0 * total;
}

void write_geodesic_csv(std::ostream& out, const GeodesicPath& path, std::size_t k) {
  if (k < 2) throw std::invalid_argument("write_geodesic_csv: need at least 2 samples");
  out << "t,mu,sigma\n";
  for (std::size_t i = 0; i < k; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(k - 1);
    const GaussianPoint g = geodesic_point(path, t);
    out << format_double(t) << ',' << format_double(g.mu()) << ',' << format_double(g.sigma()) << '\n';
  }
}

}  // namespace geols
