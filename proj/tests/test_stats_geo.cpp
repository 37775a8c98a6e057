// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ranopt/geo.hpp"
#include "ranopt/random.hpp"
#include "ranopt/stats.hpp"

namespace ranopt {
namespace {

TEST(Median, OddAndEvenCounts) {
  std::vector<double> odd{4, 100, 8};
  std::vector<double> even{8, 4};
  EXPECT_EQ(*stats::median(odd), 8.0);
  EXPECT_EQ(*stats::median(even), 6.0);
  EXPECT_FALSE(stats::median(std::vector<double>{}));
}

// Type-7 quantile written from its definition: h = (n - 1) q.
double quantile_oracle(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

TEST(Quantile, MatchesDefinitionOnRandomInput) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + rng() % 40);
    for (auto& x : v) x = u(rng);
    const double q = std::uniform_real_distribution<double>(0, 1)(rng);
    EXPECT_NEAR(*stats::quantile(v, q), quantile_oracle(v, q), 1e-12);
  }
}

TEST(Ols, RecoversExactLine) {
  std::vector<double> x{1, 2, 3, 4, 5}, y;
  for (double xi : x) y.push_back(3.0 - 2.0 * xi);
  const auto fit = stats::ols(x, y);
  ASSERT_TRUE(fit);
  EXPECT_NEAR(fit->slope, -2.0, 1e-12);
  EXPECT_NEAR(fit->intercept, 3.0, 1e-12);
  EXPECT_NEAR(fit->r_squared, 1.0, 1e-12);
}

TEST(Ols, NeedsTwoDistinctX) {
  std::vector<double> x{2, 2, 2}, y{1, 2, 3};
  EXPECT_FALSE(stats::ols(x, y));
}

TEST(Ols, MatchesNormalEquationsInLongDouble) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(30), y(30);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = n(rng) * 10;
      y[i] = 5 + 0.7 * x[i] + n(rng);
    }
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += static_cast<long double>(x[i]) * x[i];
      sxy += static_cast<long double>(x[i]) * y[i];
    }
    const long double m = x.size();
    const long double b = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const long double a = (sy - b * sx) / m;
    const auto fit = stats::ols(x, y);
    ASSERT_TRUE(fit);
    EXPECT_NEAR(fit->slope, static_cast<double>(b), 1e-10);
    EXPECT_NEAR(fit->intercept, static_cast<double>(a), 1e-9);
  }
}

TEST(WeightedLeastSquares, UnitWeightsEqualOls) {
  std::vector<double> x{1, 2, 4, 7, 9}, y{2, 3, 3, 8, 10}, w(5, 1.0);
  const auto a = stats::ols(x, y);
  const auto b = stats::weighted_least_squares(x, y, w);
  ASSERT_TRUE(a && b);
  EXPECT_NEAR(a->slope, b->slope, 1e-12);
  EXPECT_NEAR(a->intercept, b->intercept, 1e-12);
}

TEST(WeightedLeastSquares, IntegerWeightsEqualRepeatedPoints) {
  std::vector<double> x{1, 2, 3}, y{1, 5, 4}, w{3, 1, 2};
  std::vector<double> xr, yr;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int k = 0; k < static_cast<int>(w[i]); ++k) {
      xr.push_back(x[i]);
      yr.push_back(y[i]);
    }
  }
  const auto a = stats::weighted_least_squares(x, y, w);
  const auto b = stats::ols(xr, yr);
  ASSERT_TRUE(a && b);
  EXPECT_NEAR(a->slope, b->slope, 1e-12);
  EXPECT_NEAR(a->intercept, b->intercept, 1e-12);
}

// Non-increasing isotonic regression by the min-max formula
// f_i = min_{j <= i} max_{k >= i} wavg(y_j..y_k), independent of pooling.
std::vector<double> isotonic_oracle(const std::vector<double>& y, const std::vector<double>& w) {
  const std::size_t n = y.size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = INFINITY;
    for (std::size_t j = 0; j <= i; ++j) {
      double worst = -INFINITY;
      for (std::size_t k = i; k < n; ++k) {
        double sw = 0, swy = 0;
        for (std::size_t t = j; t <= k; ++t) {
          sw += w[t];
          swy += w[t] * y[t];
        }
        worst = std::max(worst, swy / sw);
      }
      best = std::min(best, worst);
    }
    f[i] = best;
  }
  return f;
}

TEST(PoolAdjacentViolators, MatchesMinMaxOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> y(1 + rng() % 12), w(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = u(rng) - 5.0 * static_cast<double>(i);
      w[i] = 1 + static_cast<double>(rng() % 5);
    }
    const auto fit = stats::pav_non_increasing(y, w);
    const auto oracle = isotonic_oracle(y, w);
    ASSERT_EQ(fit.size(), y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      EXPECT_NEAR(fit[i], oracle[i], 1e-9);
      if (i > 0) EXPECT_LE(fit[i], fit[i - 1] + 1e-12);
    }
  }
}

TEST(PoolAdjacentViolators, MonotoneInputUnchanged) {
  std::vector<double> y{9, 7, 7, 3, 1}, w(5, 1.0);
  EXPECT_EQ(stats::pav_non_increasing(y, w), y);
}

TEST(Mean, Basic) {
  std::vector<double> v{1, 2, 6};
  EXPECT_EQ(*stats::mean(v), 3.0);
  EXPECT_FALSE(stats::mean(std::vector<double>{}));
}

// ---------------------------------------------------------------- geo

TEST(Geo, RoundTripThroughTangentPlane) {
  const GeoPoint origin{40.0, -100.0};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-40000, 40000);
  for (int i = 0; i < 1000; ++i) {
    const geo::Enu e{u(rng), u(rng)};
    const auto back = geo::to_local(origin, geo::from_local(origin, e));
    EXPECT_NEAR(back.east, e.east, 1e-6);
    EXPECT_NEAR(back.north, e.north, 1e-6);
  }
}

TEST(Geo, CardinalBearings) {
  EXPECT_DOUBLE_EQ(geo::bearing_deg({0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(geo::bearing_deg({1, 0}), 90.0);
  EXPECT_DOUBLE_EQ(geo::bearing_deg({0, -1}), 180.0);
  EXPECT_DOUBLE_EQ(geo::bearing_deg({-1, 0}), 270.0);
  EXPECT_DOUBLE_EQ(geo::horizontal_distance_m({3, 4}), 5.0);
}

// Spherical haversine over short baselines agrees with the ellipsoidal
// tangent plane to well under a percent.
TEST(Geo, DistanceAgreesWithHaversineAtShortRange) {
  const GeoPoint origin{40.0, -100.0};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint p{origin.lat + u(rng), origin.lon + u(rng)};
    constexpr double r = 6371008.8, d2r = std::numbers::pi / 180.0;
    const double dlat = (p.lat - origin.lat) * d2r, dlon = (p.lon - origin.lon) * d2r;
    const double a = std::pow(std::sin(dlat / 2), 2) +
                     std::cos(origin.lat * d2r) * std::cos(p.lat * d2r) * std::pow(std::sin(dlon / 2), 2);
    const double hav = 2 * r * std::asin(std::sqrt(a));
    const double plane = geo::horizontal_distance_m(geo::to_local(origin, p));
    EXPECT_NEAR(plane, hav, 0.005 * hav + 0.01);
  }
}

TEST(Geo, NormalizeAndWrap) {
  EXPECT_EQ(geo::normalize_deg(-10), 350.0);
  EXPECT_EQ(geo::normalize_deg(720), 0.0);
  EXPECT_EQ(geo::wrap_delta_deg(180), 180.0);
  EXPECT_EQ(geo::wrap_delta_deg(-180), 180.0);
  EXPECT_EQ(geo::wrap_delta_deg(190), -170.0);
}

TEST(Geo, AzimuthDeltaExamples) {
  EXPECT_EQ(geo::azimuth_delta(170, 90), -80.0);
  EXPECT_EQ(geo::azimuth_delta(350, 10), 20.0);
  EXPECT_EQ(geo::azimuth_delta(42.5, 42.5), 0.0);
}

TEST(Geo, DeltaWrapPropertyOnRandomPairs) {
  PortableRng rng(2024);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(-720, 720), b = rng.uniform(-720, 720);
    const double d = geo::azimuth_delta(a, b);
    ASSERT_GT(d, -180.0);
    ASSERT_LE(d, 180.0);
    ASSERT_EQ(geo::apply_azimuth_delta(a, d), geo::quantize_azimuth(geo::normalize_deg(b))) << a << " " << b;
  }
}

}  // namespace
}  // namespace ranopt
