// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ranopt/error.hpp"
#include "ranopt/geo.hpp"
#include "ranopt/random.hpp"
#include "ranopt/rf_tuning.hpp"
#include "ranopt/stats.hpp"
#include "support.hpp"

namespace ranopt {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Vincenty inverse on WGS84: geodesic distance and initial bearing.
struct Geodesic {
  double distance_m;
  double bearing_deg;
};

Geodesic vincenty(GeoPoint p1, GeoPoint p2) {
  const long double a = 6378137.0L, f = 1.0L / 298.257223563L, b = a * (1 - f);
  const long double L = (p2.lon - p1.lon) * kDeg;
  const long double u1 = std::atan((1 - f) * std::tan(static_cast<long double>(p1.lat) * kDeg));
  const long double u2 = std::atan((1 - f) * std::tan(static_cast<long double>(p2.lat) * kDeg));
  const long double su1 = std::sin(u1), cu1 = std::cos(u1), su2 = std::sin(u2), cu2 = std::cos(u2);
  long double lambda = L, sin_sigma = 0, cos_sigma = 0, sigma = 0, cos2_alpha = 0, cos_2sm = 0;
  for (int i = 0; i < 200; ++i) {
    const long double sl = std::sin(lambda), cl = std::cos(lambda);
    sin_sigma = std::sqrt(std::pow(cu2 * sl, 2) + std::pow(cu1 * su2 - su1 * cu2 * cl, 2));
    if (sin_sigma == 0) return {0, 0};
    cos_sigma = su1 * su2 + cu1 * cu2 * cl;
    sigma = std::atan2(sin_sigma, cos_sigma);
    const long double sin_alpha = cu1 * cu2 * sl / sin_sigma;
    cos2_alpha = 1 - sin_alpha * sin_alpha;
    cos_2sm = cos2_alpha != 0 ? cos_sigma - 2 * su1 * su2 / cos2_alpha : 0;
    const long double c = f / 16 * cos2_alpha * (4 + f * (4 - 3 * cos2_alpha));
    const long double prev = lambda;
    lambda = L + (1 - c) * f * sin_alpha *
                     (sigma + c * sin_sigma * (cos_2sm + c * cos_sigma * (-1 + 2 * cos_2sm * cos_2sm)));
    if (std::abs(lambda - prev) < 1e-15L) break;
  }
  const long double u_sq = cos2_alpha * (a * a - b * b) / (b * b);
  const long double A = 1 + u_sq / 16384 * (4096 + u_sq * (-768 + u_sq * (320 - 175 * u_sq)));
  const long double B = u_sq / 1024 * (256 + u_sq * (-128 + u_sq * (74 - 47 * u_sq)));
  const long double ds =
      B * sin_sigma *
      (cos_2sm + B / 4 *
                     (cos_sigma * (-1 + 2 * cos_2sm * cos_2sm) -
                      B / 6 * cos_2sm * (-3 + 4 * sin_sigma * sin_sigma) * (-3 + 4 * cos_2sm * cos_2sm)));
  const long double s = b * A * (sigma - ds);
  const long double sl = std::sin(lambda), cl = std::cos(lambda);
  const long double alpha = std::atan2(cu2 * sl, cu1 * su2 - su1 * cu2 * cl);
  return {static_cast<double>(s), geo::normalize_deg(static_cast<double>(alpha) / kDeg)};
}

SiteConfig site_at(GeoPoint loc, std::vector<CellConfig> cells = {{"s-0", 0, 0.0, {}, {}}}) {
  return {"s", loc, 30, std::move(cells)};
}

MeasurementSample located(const std::string& cell, GeoPoint p, std::optional<double> rsrp = {}) {
  auto s = test::sample(cell, 0, 1000, rsrp);
  s.location = p;
  return s;
}

TEST(GeoSummary, SinglePointDueEast) {
  const auto site = site_at({40, -100});
  const GeoPoint east = geo::from_local(site.location, {1000, 0});
  std::vector<MeasurementSample> s(10, located("s-0", east));
  const auto g = cell_geo_summary(s, site, site.cells[0]);
  EXPECT_NEAR(g.bearing_site_to_centroid_deg, 90.0, 1e-9);
  EXPECT_NEAR(g.site_to_centroid_m, 1000.0, 1.0);
  EXPECT_NEAR(vincenty(site.location, g.centroid).distance_m, 1000.0, 1.0);
  EXPECT_EQ(g.n_located_samples, 10u);
  EXPECT_TRUE(g.low_confidence);
}

TEST(GeoSummary, SymmetricAboutNorth) {
  const auto site = site_at({40, -100});
  std::vector<MeasurementSample> s;
  for (double e : {-300.0, -100.0, 100.0, 300.0}) {
    s.push_back(located("s-0", geo::from_local(site.location, {e, 800})));
  }
  const auto g = cell_geo_summary(s, site, site.cells[0]);
  const double b = g.bearing_site_to_centroid_deg;
  EXPECT_LE(std::min(b, 360.0 - b), 0.5);
}

TEST(GeoSummary, RandomCloudMatchesVincentyProjection) {
  PortableRng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const GeoPoint origin{rng.uniform(-60, 60), rng.uniform(-179, 179)};
    const auto site = site_at(origin);
    std::vector<MeasurementSample> s;
    double se = 0, sn = 0;
    for (int i = 0; i < 300; ++i) {
      const GeoPoint p{origin.lat + rng.uniform(-0.02, 0.03), origin.lon + rng.uniform(-0.02, 0.03)};
      s.push_back(located("s-0", p));
      const auto g = vincenty(origin, p);
      se += g.distance_m * std::sin(g.bearing_deg * kDeg);
      sn += g.distance_m * std::cos(g.bearing_deg * kDeg);
    }
    se /= 300;
    sn /= 300;
    const auto g = cell_geo_summary(s, site, site.cells[0]);
    const double ge = g.site_to_centroid_m * std::sin(g.bearing_site_to_centroid_deg * kDeg);
    const double gn = g.site_to_centroid_m * std::cos(g.bearing_site_to_centroid_deg * kDeg);
    EXPECT_LT(std::hypot(ge - se, gn - sn), 1.0) << origin.lat << "," << origin.lon;
  }
}

TEST(GeoSummary, NoLocatedSamplesIsNoGeoData) {
  const auto site = site_at({40, -100});
  std::vector<MeasurementSample> s{test::sample("s-0", 0, 100)};
  try {
    cell_geo_summary(s, site, site.cells[0]);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_geo_data);
  }
}

AzimuthRecommendation rec_for(double current, double bearing, int sector = 0, std::string cell = "s-0") {
  CellGeoSummary g;
  g.cell_id = cell;
  g.bearing_site_to_centroid_deg = bearing;
  const auto site = site_at({40, -100});
  return recommend_azimuth(g, site, {cell, sector, current, {}, {}});
}

TEST(Recommend, WrapExamples) {
  auto r = rec_for(170, 90);
  EXPECT_EQ(r.recommended_azimuth_deg, 90.0);
  EXPECT_EQ(r.delta_deg, -80.0);
  EXPECT_EQ(rec_for(42, 42).delta_deg, 0.0);
  EXPECT_EQ(rec_for(350, 10).delta_deg, 20.0);
}

CellGeoSummary at_distance(const std::string& cell, double m) {
  CellGeoSummary g;
  g.cell_id = cell;
  g.site_to_centroid_m = m;
  return g;
}

TEST(SiteAudit, StrengthLevels) {
  const auto site = site_at({40, -100}, {{"s-0", 0, 0, {}, {}}, {"s-1", 1, 120, {}, {}}, {"s-2", 2, 240, {}, {}}});
  std::vector<CellGeoSummary> all{at_distance("s-0", 30000), at_distance("s-1", 30000), at_distance("s-2", 30000)};
  auto a = audit_site_location(site, all, 10000);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->strength, AuditStrength::strong);
  EXPECT_EQ(a->evidence.size(), 3u);

  std::vector<CellGeoSummary> one{at_distance("s-0", 400), at_distance("s-1", 30000), at_distance("s-2", 500)};
  a = audit_site_location(site, one, 10000);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->strength, AuditStrength::weak);
  EXPECT_EQ(a->evidence[0].sector_id, 1);

  std::vector<CellGeoSummary> none{at_distance("s-0", 400), at_distance("s-1", 300), at_distance("s-2", 500)};
  EXPECT_FALSE(audit_site_location(site, none, 10000));
}

TEST(SectorSwap, OppositeDeltasFlaggedWithCorrectedRecord) {
  // Sector 0 is recorded at 75 but serves 170; sector 2 is recorded at 170 but serves 79.
  std::vector<AzimuthRecommendation> recs{rec_for(75, 170, 0, "s-0"), rec_for(300, 302, 1, "s-1"),
                                          rec_for(170, 79, 2, "s-2")};
  ASSERT_EQ(recs[0].delta_deg, 95.0);
  ASSERT_EQ(recs[2].delta_deg, -91.0);
  const auto audits = detect_sector_swap(recs);
  ASSERT_EQ(audits.size(), 1u);
  const auto& ev = audits[0].evidence;
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].cell_id, "s-0");
  EXPECT_EQ(*ev[0].corrected_azimuth_deg, 170.0);
  EXPECT_EQ(*ev[1].corrected_azimuth_deg, 75.0);
  EXPECT_EQ(audits[0].strength, AuditStrength::strong);
}

TEST(SectorSwap, SameSignOrSmallDeltasNotFlagged) {
  std::vector<AzimuthRecommendation> same{rec_for(75, 170, 0, "s-0"), rec_for(170, 261, 2, "s-2")};
  EXPECT_TRUE(detect_sector_swap(same).empty());
  std::vector<AzimuthRecommendation> small{rec_for(75, 85, 0, "s-0"), rec_for(170, 158, 2, "s-2")};
  EXPECT_TRUE(detect_sector_swap(small).empty());
  std::vector<AzimuthRecommendation> lopsided{rec_for(75, 170, 0, "s-0"), rec_for(170, 110, 2, "s-2")};
  EXPECT_TRUE(detect_sector_swap(lopsided).empty());
}

TEST(AntennaGain, PatternValues) {
  EXPECT_EQ(horizontal_antenna_gain(0), 0.0);
  EXPECT_EQ(horizontal_antenna_gain(70), -12.0);
  EXPECT_EQ(horizontal_antenna_gain(-70), -12.0);
  EXPECT_EQ(horizontal_antenna_gain(180), -25.0);
  EXPECT_EQ(horizontal_antenna_gain(290), -12.0);
  EXPECT_DOUBLE_EQ(horizontal_antenna_gain(35), -3.0);
}

struct Cloud {
  SiteConfig site;
  std::vector<MeasurementSample> samples;
};

Cloud cloud_at_bearings(double lo, double hi, std::size_t n, std::uint64_t seed) {
  Cloud c{site_at({40, -100}), {}};
  PortableRng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = rng.uniform(lo, hi) * kDeg, d = rng.uniform(200, 2000);
    c.samples.push_back(located("s-0", geo::from_local(c.site.location, {d * std::sin(b), d * std::cos(b)}),
                                rng.uniform(-110, -95)));
  }
  return c;
}

TEST(PostTuning, ZeroDeltaGivesExactZeros) {
  const auto c = cloud_at_bearings(20, 80, 100, 1);
  const auto p = predict_post_tuning(c.site, c.site.cells[0], c.samples, 0.0, nullptr, nullptr);
  EXPECT_EQ(p.rsrp_gain_median_db, 0.0);
  EXPECT_EQ(p.rsrp_gain_p10_db, 0.0);
  EXPECT_EQ(p.rsrp_gain_p90_db, 0.0);
  EXPECT_EQ(*p.predicted_delta_kbps, 0.0);
  EXPECT_EQ(*p.predicted_delta_rtt_ms, 0.0);
  EXPECT_EQ(p.n_samples, 100u);
}

TEST(PostTuning, SamplesOnNewBoresightGainTwelveDb) {
  const auto c = cloud_at_bearings(70, 70, 50, 2);
  const auto p = predict_post_tuning(c.site, c.site.cells[0], c.samples, 70.0, nullptr, nullptr);
  EXPECT_NEAR(p.rsrp_gain_median_db, 12.0, 1e-6);
  EXPECT_NEAR(p.rsrp_gain_p10_db, 12.0, 1e-6);
}

TEST(PostTuning, ExperienceDeltaMatchesPerSampleSimulation) {
  // Gain at 49.5 deg off boresight is about -6 dB.
  const auto c = cloud_at_bearings(44, 55, 400, 3);
  const auto kbps_of = [](double rsrp) { return 30000 + 200 * rsrp; };
  std::vector<XYPoint> pts;
  PortableRng rng(4);
  for (int i = 0; i < 8000; ++i) {
    const double x = rng.uniform(-115, -80);
    pts.push_back({x, kbps_of(x)});
  }
  const auto model = fit_sensitivity(pts, "s-0", Metric::rsrp_dbm, Metric::app_kbps,
                                     default_sensitivity_params(Metric::rsrp_dbm));
  const double delta = 49.5;
  const auto p = predict_post_tuning(c.site, c.site.cells[0], c.samples, delta, &model, nullptr);

  std::vector<double> oracle;
  for (const auto& s : c.samples) {
    const auto e = geo::to_local(c.site.location, *s.location);
    const double bearing = std::atan2(e.east, e.north) / kDeg;
    const auto g = [](double off) { return -std::min(12 * std::pow(off / 70, 2), 25.0); };
    const double gain = g(bearing - delta) - g(bearing);
    oracle.push_back(kbps_of(*s.rsrp_dbm + gain) - kbps_of(*s.rsrp_dbm));
  }
  const double want = *stats::median(oracle);
  EXPECT_NEAR(want, 1200.0, 180.0);
  ASSERT_TRUE(p.predicted_delta_kbps);
  EXPECT_TRUE(test::near_rel(*p.predicted_delta_kbps, want, 0.15)) << *p.predicted_delta_kbps << " vs " << want;
  EXPECT_FALSE(p.predicted_delta_rtt_ms);
}

TEST(PostTuning, NoLocatedRsrpThrows) {
  const auto site = site_at({40, -100});
  std::vector<MeasurementSample> s{located("s-0", {40.01, -100})};
  EXPECT_THROW(predict_post_tuning(site, site.cells[0], s, 10, nullptr, nullptr), Error);
}

struct Field {
  std::vector<CellProfile> profiles;
  std::map<std::string, SensitivityModel> models;
};

Field priority_field() {
  Field f;
  for (int i = 0; i < 6; ++i) {
    const std::string id = "c" + std::to_string(i);
    f.profiles.push_back(test::profile(id, 1000.0 * (i + 1), -100));
    SensitivityModel m;
    m.cell_id = id;
    m.bins.push_back({-50, -99, -100, 1000, 100, 100.0 - 10 * i, 1.0});
    f.models.emplace(id, m);
  }
  return f;
}

TEST(Iterate, TopKAndCooldown) {
  const auto f = priority_field();
  const EpochSeconds now = 1'000'000;
  auto batch = iterate_optimization(f.profiles, f.models, {}, {}, {}, now, {1, 7, {}});
  ASSERT_EQ(batch.size(), 1u);
  EXPECT_EQ(batch[0].priority.cell_id, "c0");

  batch = iterate_optimization(f.profiles, f.models, {}, {}, {}, now, {100, 7, {}});
  EXPECT_EQ(batch.size(), 6u);

  std::map<std::string, EpochSeconds> tuned{{"c0", now - 86400}, {"c1", now - 8 * 86400}};
  batch = iterate_optimization(f.profiles, f.models, {}, {}, tuned, now, {2, 7, {}});
  ASSERT_EQ(batch.size(), 2u);
  EXPECT_EQ(batch[0].priority.cell_id, "c1");
  EXPECT_EQ(batch[1].priority.cell_id, "c2");

  std::map<std::string, EpochSeconds> all;
  for (const auto& p : f.profiles) all[p.cell_id] = now;
  EXPECT_TRUE(iterate_optimization(f.profiles, f.models, {}, {}, all, now, {5, 7, {}}).empty());
}

}  // namespace
}  // namespace ranopt
