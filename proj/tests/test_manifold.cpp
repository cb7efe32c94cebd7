#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "geols/manifold.hpp"
#include "geols/random.hpp"

using namespace geols;

namespace {

// Reference values from an adaptive-quadrature oracle (30 significant digits)
// along the half-circle geodesic.
constexpr double kV12 = 5.286745169795069;
constexpr double kV34 = 2.402389600988315;
constexpr double kEqualSigma = 3.775042443269865;

}  // namespace

TEST(GaussianPoint, RejectsNonpositiveSigma) {
  EXPECT_THROW(GaussianPoint(0.0, 0.0), std::domain_error);
  EXPECT_THROW(GaussianPoint(0.0, -1.0), std::domain_error);
  EXPECT_THROW(GaussianPoint(NAN, 1.0), std::domain_error);
  EXPECT_THROW(GaussianPoint(0.0, INFINITY), std::domain_error);
}

TEST(RaoDistance, OracleValues) {
  EXPECT_NEAR(rao_distance({4, 1.2}, {16, 1.5}), kV12, 1e-12);
  EXPECT_NEAR(rao_distance({4, 4.0}, {16, 5.0}), kV34, 1e-12);
  EXPECT_NEAR(rao_distance({0, 2}, {10, 2}), kEqualSigma, 1e-12);
}

TEST(RaoDistance, SameMeanIsScaledLogRatio) {
  EXPECT_NEAR(rao_distance({0, 1}, {0, std::numbers::e}), std::numbers::sqrt2, 1e-14);
  EXPECT_NEAR(rao_distance({3, 2}, {3, 8}), std::numbers::sqrt2 * std::log(4.0), 1e-13);
}

TEST(RaoDistance, IdentityAndSymmetry) {
  EXPECT_EQ(rao_distance({1.5, 0.3}, {1.5, 0.3}), 0.0);
  EXPECT_DOUBLE_EQ(rao_distance({1, 2}, {5, 0.1}), rao_distance({5, 0.1}, {1, 2}));
}

TEST(RaoDistance, FiniteForDistantPoints) {
  const double d = rao_distance({0, 1e-6}, {1e6, 1e-6});
  EXPECT_TRUE(std::isfinite(d));
  EXPECT_GT(d, 30.0);
}

TEST(RaoDistance, NeverExceedsFixedSigmaPath) {
  RandomStream rng(11);
  for (int i = 0; i < 200; ++i) {
    const double s = rng.uniform(0.1, 5.0);
    const double a = rng.uniform(-10, 10);
    const double b = rng.uniform(-10, 10);
    EXPECT_LE(rao_distance({a, s}, {b, s}), fixed_sigma_distance(a, b, s) + 1e-12);
  }
  EXPECT_THROW(fixed_sigma_distance(0, 1, 0), std::domain_error);
}

TEST(Geodesic, VerticalForEqualMeans) {
  const GeodesicPath p = geodesic_between({0, 1}, {0, 3});
  EXPECT_EQ(p.kind, GeodesicKind::VerticalLine);
}

TEST(Geodesic, HalfCircleCenterAndRadius) {
  const GeodesicPath a = geodesic_between({4, 1.2}, {16, 1.5});
  EXPECT_EQ(a.kind, GeodesicKind::HalfCircle);
  EXPECT_NEAR(a.center_u, 7.118797519595566, 1e-12);
  EXPECT_NEAR(a.radius, 4.455028409000328, 1e-12);
  const GeodesicPath b = geodesic_between({4, 4.0}, {16, 5.0});
  EXPECT_NEAR(b.center_u, 7.601397897755385, 1e-12);
  EXPECT_NEAR(b.radius, 6.227459353540575, 1e-12);
}

TEST(Geodesic, CoincidentEndpointsThrow) {
  EXPECT_THROW(geodesic_between({1, 1}, {1, 1}), std::invalid_argument);
}

TEST(Geodesic, PointEndpointsAndMidpoint) {
  const GeodesicPath v = geodesic_between({0, 1}, {0, 4});
  const GaussianPoint mid = geodesic_point(v, 0.5);
  EXPECT_NEAR(mid.mu(), 0.0, 1e-15);
  EXPECT_NEAR(mid.sigma(), 2.0, 1e-14);
  const GeodesicPath c = geodesic_between({4, 1.2}, {16, 1.5});
  EXPECT_EQ(geodesic_point(c, 0.0), c.start);
  EXPECT_EQ(geodesic_point(c, 1.0), c.end);
  EXPECT_THROW(geodesic_point(c, 1.5), std::out_of_range);
  EXPECT_THROW(geodesic_point(c, -0.1), std::out_of_range);
}

TEST(Geodesic, PointsAreEquallySpacedInArcLength) {
  const GeodesicPath c = geodesic_between({4, 1.2}, {16, 1.5});
  const double total = rao_distance(c.start, c.end);
  for (double t : {0.1, 0.25, 0.5, 0.8}) {
    const GaussianPoint g = geodesic_point(c, t);
    EXPECT_NEAR(rao_distance(c.start, g), t * total, 1e-10);
    EXPECT_NEAR(rao_distance(g, c.end), (1 - t) * total, 1e-10);
  }
}

TEST(NumericLength, MatchesAnalyticValues) {
  EXPECT_NEAR(numeric_geodesic_length(geodesic_between({0, 1}, {0, std::numbers::e}), 10000),
              std::numbers::sqrt2, 1e-6);
  EXPECT_NEAR(numeric_geodesic_length(geodesic_between({4, 1.2}, {16, 1.5}), 10000), kV12, 1e-6);
  EXPECT_NEAR(numeric_geodesic_length(geodesic_between({4, 4.0}, {16, 5.0}), 10000), kV34, 1e-6);
  EXPECT_THROW(numeric_geodesic_length(geodesic_between({0, 1}, {0, 2}), 1), std::invalid_argument);
}

TEST(NumericLength, ConvergesAtLeastQuadratically) {
  const GeodesicPath c = geodesic_between({4, 1.2}, {16, 1.5});
  const double e1 = std::abs(numeric_geodesic_length(c, 16) - kV12);
  const double e2 = std::abs(numeric_geodesic_length(c, 32) - kV12);
  const double order = std::log2(e1 / e2);
  EXPECT_GE(order, 2.0);
}

TEST(NumericLength, CoarseErrorRatio) {
  const GeodesicPath c = geodesic_between({4, 1.2}, {16, 1.5});
  const double ratio = std::abs(numeric_geodesic_length(c, 2) - kV12) / std::abs(numeric_geodesic_length(c, 4) - kV12);
  EXPECT_GT(ratio, 3.0);
  EXPECT_LT(ratio, 6.0);
}

TEST(GeodesicCsv, WritesHeaderAndRows) {
  std::ostringstream out;
  write_geodesic_csv(out, geodesic_between({0, 1}, {0, 4}), 3);
  EXPECT_EQ(out.str(), "t,mu,sigma\n0,0,1\n0.5,0,2\n1,0,4\n");
  EXPECT_THROW(write_geodesic_csv(out, geodesic_between({0, 1}, {0, 4}), 1), std::invalid_argument);
}
