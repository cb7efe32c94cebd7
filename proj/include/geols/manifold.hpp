#pragma once

// The univariate normal family N(mu, sigma^2) with the Fisher information
// metric ds^2 = dmu^2/sigma^2 + 2 dsigma^2/sigma^2. Internally the metric is
// handled as a scaled Poincare half-plane in (u, sigma), u = mu / sqrt(2);
// nothing in this header exposes u except GeodesicPath::center_u.

#include <iosfwd>
#include <cstddef>

namespace geols {

/// A point (mu, sigma) on the normal manifold. sigma is strictly positive and
/// both fields are finite; the constructor throws std::domain_error otherwise.
class GaussianPoint {
public:
  GaussianPoint(double mu, double sigma);

  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }

  friend bool operator==(const GaussianPoint&, const GaussianPoint&) = default;

private:
  double mu_;
  double sigma_;
};

/// Rao geodesic distance, 2*sqrt(2)*atanh(delta) with
/// delta^2 = (dmu^2 + 2 dsigma^2) / (dmu^2 + 2 (sigma1 + sigma2)^2).
double rao_distance(const GaussianPoint& p, const GaussianPoint& q);

/// Length of the constant-sigma path between N(mu1, sigma^2) and N(mu2, sigma^2),
/// i.e. |mu1 - mu2| / sigma. Never shorter than the geodesic.
double fixed_sigma_distance(double mu1, double mu2, double sigma);

enum class GeodesicKind { VerticalLine, HalfCircle };

/// Closed-form geodesic between two distinct points. For HalfCircle the curve is
/// (u - center_u)^2 + sigma^2 = radius^2 in the half-plane coordinates.
struct GeodesicPath {
  GaussianPoint start;
  GaussianPoint end;
  GeodesicKind kind;
  double center_u = 0.0;
  double radius = 0.0;
  // Polar angles of the endpoints measured at the circle center (HalfCircle only).
  double angle_start = 0.0;
  double angle_end = 0.0;
};

/// Throws std::invalid_argument when p == q.
GeodesicPath geodesic_between(const GaussianPoint& p, const GaussianPoint& q);

/// Point at fraction t of the geodesic arc length; t outside [0, 1] throws
/// std::out_of_range.
GaussianPoint geodesic_point(const GeodesicPath& path, double t);

/// Composite Simpson quadrature of the Fisher line element along the path,
/// integrated over the polar angle (half circles) or over sigma (vertical
/// lines). Odd n_steps is rounded up to the next even count.
double numeric_geodesic_length(const GeodesicPath& path, std::size_t n_steps);

/// Writes `t,mu,sigma` rows for k equally spaced arc-length fractions.
void write_geodesic_csv(std::ostream& out, const GeodesicPath& path, std::size_t k);

}  // namespace geols
