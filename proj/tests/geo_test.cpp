#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mowplan/error.hpp"
#include "mowplan/geo.hpp"

using namespace mowplan;
using namespace mowplan::geo;

namespace {

constexpr double kA = 6378137.0;
constexpr double kF = 1.0 / 298.257223563;

GeoPolygon square_around(double lat, double lon, double half_deg) {
  GeoPolygon p;
  p.boundary = {{lat - half_deg, lon - half_deg},
                {lat - half_deg, lon + half_deg},
                {lat + half_deg, lon + half_deg},
                {lat + half_deg, lon - half_deg},
                {lat - half_deg, lon - half_deg}};
  return p;
}

// Meridian arc length between two latitudes by Simpson quadrature of M(phi).
double meridian_arc(double lat0_deg, double lat1_deg) {
  const double e2 = kF * (2 - kF);
  auto m = [&](double phi) {
    const double s = std::sin(phi);
    return kA * (1 - e2) / std::pow(1 - e2 * s * s, 1.5);
  };
  const double a = lat0_deg * std::numbers::pi / 180, b = lat1_deg * std::numbers::pi / 180;
  const int n = 64;
  const double h = (b - a) / n;
  double sum = m(a) + m(b);
  for (int i = 1; i < n; ++i) sum += m(a + i * h) * (i % 2 ? 4 : 2);
  return sum * h / 3;
}

}  // namespace

TEST(MakeFrame, OriginIsBoundingBoxCenter) {
  const LocalFrame f = make_frame(square_around(35.0, 139.0, 0.001));
  EXPECT_NEAR(f.origin.lat, 35.0, 1e-12);
  EXPECT_NEAR(f.origin.lon, 139.0, 1e-12);
}

TEST(MakeFrame, EquatorScalesNearlyEqual) {
  const LocalFrame f = make_frame(square_around(0.0, 10.0, 0.001));
  // Oracle: equatorial circumference / 360 and a(1 - e^2) * pi / 180.
  const double e2 = kF * (2 - kF);
  EXPECT_NEAR(f.meters_per_deg_lon, 2 * std::numbers::pi * kA / 360, 1e-6);
  EXPECT_NEAR(f.meters_per_deg_lat, kA * (1 - e2) * std::numbers::pi / 180, 1e-6);
  EXPECT_LT(std::abs(f.meters_per_deg_lon - f.meters_per_deg_lat) / f.meters_per_deg_lat, 0.007);
}

TEST(MakeFrame, SixtyDegreesHalvesLongitudeScale) {
  const LocalFrame eq = make_frame(square_around(0.0, 10.0, 0.001));
  const LocalFrame f = make_frame(square_around(60.0, 10.0, 0.001));
  EXPECT_NEAR(f.meters_per_deg_lon / eq.meters_per_deg_lon, 0.5, 0.005);
}

TEST(MakeFrame, ZeroAreaRejected) {
  GeoPolygon p;
  p.boundary = {{1, 1}, {1, 2}, {1, 3}, {1, 1}};
  EXPECT_THROW(make_frame(p), PlanningError);
}

TEST(ToLocal, OriginMapsToZero) {
  const LocalFrame f = make_frame(square_around(47.0, 8.0, 0.001));
  const LocalPoint p = to_local(f, f.origin);
  EXPECT_EQ(p.x, 0.0);
  EXPECT_EQ(p.y, 0.0);
}

TEST(ToLocal, NorthStepMatchesMeridianArc) {
  const LocalFrame f = make_frame(square_around(45.0, 8.0, 0.001));
  const LocalPoint p = to_local(f, {45.001, 8.0});
  EXPECT_NEAR(p.y, 111.3, 0.2);
  EXPECT_NEAR(p.y, meridian_arc(45.0, 45.001), 1e-3);
  EXPECT_NEAR(p.x, 0.0, 1e-12);
}

TEST(ToLocal, EastStepAtEquator) {
  const LocalFrame f = make_frame(square_around(0.0, 20.0, 0.001));
  const LocalPoint p = to_local(f, {0.0, 20.001});
  EXPECT_NEAR(p.x, 2 * std::numbers::pi * kA / 360 / 1000, 1e-6);
  EXPECT_NEAR(p.x, 111.3, 0.2);
}

TEST(ToLocal, OutsideValidityWindowThrows) {
  const LocalFrame f = make_frame(square_around(45.0, 8.0, 0.001));
  try {
    (void)to_local(f, {45.2, 8.0});
    FAIL() << "expected out-of-range";
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOutOfRange);
  }
}

TEST(ToGeodetic, ZeroMapsToOrigin) {
  const LocalFrame f = make_frame(square_around(-33.9, 18.4, 0.002));
  const GeoPoint g = to_geodetic(f, {0, 0});
  EXPECT_EQ(g, f.origin);
}

TEST(ToGeodetic, HundredMetersRoundTrip) {
  const LocalFrame f = make_frame(square_around(51.5, -0.1, 0.002));
  const LocalPoint back = to_local(f, to_geodetic(f, {100.0, 0.0}));
  EXPECT_LT(std::abs(back.x - 100.0), 1e-6);
  EXPECT_LT(std::abs(back.y), 1e-6);
}

TEST(ToGeodetic, NonFiniteRejected) {
  const LocalFrame f = make_frame(square_around(51.5, -0.1, 0.002));
  EXPECT_THROW(to_geodetic(f, {std::nan(""), 0.0}), PlanningError);
}

TEST(GeoProperties, RoundTripLinearityMonotonicity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat0(-70, 70), lon0(-179, 179);
  // Dyadic offsets keep midpoints exactly representable in degrees, so the
  // affine check measures the transform rather than input rounding.
  std::uniform_int_distribution<long> ticks(-(1L << 22), 1L << 22);
  auto off = [&](std::mt19937_64& g) { return std::ldexp(static_cast<double>(ticks(g)), -30); };
  for (int trial = 0; trial < 200; ++trial) {
    const LocalFrame f = make_frame(square_around(lat0(rng), lon0(rng), 0.001));
    const GeoPoint a{f.origin.lat + off(rng), f.origin.lon + off(rng)};
    const GeoPoint b{f.origin.lat + off(rng), f.origin.lon + off(rng)};
    const GeoPoint back = to_geodetic(f, to_local(f, a));
    EXPECT_LT(std::abs(back.lat - a.lat), 1e-9);
    EXPECT_LT(std::abs(back.lon - a.lon), 1e-9);

    const LocalPoint pa = to_local(f, a), pb = to_local(f, b);
    const LocalPoint pm = to_local(f, {(a.lat + b.lat) / 2, (a.lon + b.lon) / 2});
    EXPECT_NEAR(pm.x, (pa.x + pb.x) / 2, 1e-9);
    EXPECT_NEAR(pm.y, (pa.y + pb.y) / 2, 1e-9);

    const LocalPoint north = to_local(f, {a.lat + 1e-7, a.lon});
    const LocalPoint east = to_local(f, {a.lat, a.lon + 1e-7});
    EXPECT_GT(north.y, pa.y);
    EXPECT_GT(east.x, pa.x);
  }
}
