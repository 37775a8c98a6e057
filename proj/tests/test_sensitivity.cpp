// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "ranopt/error.hpp"
#include "ranopt/random.hpp"
#include "ranopt/sensitivity.hpp"
#include "support.hpp"

namespace ranopt {
namespace {

std::vector<XYPoint> planted(const std::function<double(double)>& f, double lo, double hi, std::size_t n,
                             double noise_sd, std::uint64_t seed) {
  PortableRng rng(seed);
  std::vector<XYPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(lo, hi);
    pts.push_back({x, f(x) + (noise_sd > 0 ? rng.normal(0, noise_sd) : 0.0)});
  }
  return pts;
}

SensitivityModel fit(const std::vector<XYPoint>& pts, const SensitivityParams& params = {}) {
  return fit_sensitivity(pts, "c", Metric::rsrp_dbm, Metric::app_kbps, params);
}

const auto linear50 = [](double x) { return 100.0 + 50.0 * x; };

TEST(FitSensitivity, LinearGeneratorGivesItsSlope) {
  const auto m = fit(planted(linear50, -15, -5, 6000, 0, 1));
  std::size_t defined = 0;
  for (const auto& b : m.bins) {
    if (!b.slope) continue;
    ++defined;
    EXPECT_NEAR(*b.slope, 50.0, 1.0) << b.index;
  }
  EXPECT_GE(defined, 4u);
  for (std::size_t i = 1; i < m.bins.size(); ++i) EXPECT_LT(m.bins[i - 1].x_center, m.bins[i].x_center);
}

TEST(FitSensitivity, SaturatingCurveMatchesAnalyticDerivative) {
  constexpr double c = 20000, x0 = -125, tau = 15;
  const auto f = [&](double x) { return c * (1 - std::exp(-(x - x0) / tau)); };
  const auto df = [&](double x) { return c / tau * std::exp(-(x - x0) / tau); };
  const auto m = fit(planted(f, -120, -80, 20000, 0, 2));
  std::size_t defined = 0;
  for (const auto& b : m.bins) {
    if (!b.slope) continue;
    ++defined;
    EXPECT_TRUE(test::near_rel(*b.slope, df(b.x_median), 0.15)) << b.x_median << " " << *b.slope;
    EXPECT_GT(*b.slope, 0.0);
  }
  EXPECT_GE(defined, 15u);
}

TEST(FitSensitivity, TooFewPointsIsInsufficientData) {
  try {
    fit(planted(linear50, -15, -5, 10, 0, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_data);
  }
}

TEST(FitSensitivity, SparseBinsLeaveSlopesUndefined) {
  SensitivityParams params;
  params.min_bin_samples = 1;
  params.min_window_points = 0;
  // Bins four apart never share a window.
  std::vector<XYPoint> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({i % 2 ? -101.0 : -109.0, 1000.0});
  const auto m = fit(pts, params);
  ASSERT_EQ(m.bins.size(), 2u);
  EXPECT_FALSE(m.bins[0].slope);
  EXPECT_FALSE(m.bins[1].slope);
}

TEST(LocalSlope, LookupInsideAndOutside) {
  const auto m = fit(planted(linear50, -15, -5, 6000, 0, 4));
  const auto& mid = m.bins[m.bins.size() / 2];
  EXPECT_EQ(local_slope(m, mid.x_center), mid.slope);
  EXPECT_FALSE(local_slope(m, m.support_low() - 0.5));
  EXPECT_FALSE(local_slope(m, m.support_high() + 0.5));
  EXPECT_NEAR(*local_slope(m, -9.3), 50.0, 1.0);
}

TEST(PredictUplift, LinearExamples) {
  const auto m = fit(planted(linear50, -15, -5, 6000, 0, 5));
  EXPECT_NEAR(predict_uplift(m, -11, 2).predicted_delta_y, 100.0, 2.0);
  const auto zero = predict_uplift(m, -11, 0);
  EXPECT_EQ(zero.predicted_delta_y, 0.0);
  EXPECT_TRUE(zero.path.empty());
  EXPECT_NEAR(predict_uplift(m, -9, -2).predicted_delta_y, -100.0, 2.0);
}

TEST(PredictUplift, OutOfSupportThrows) {
  const auto m = fit(planted(linear50, -15, -5, 6000, 0, 6));
  try {
    predict_uplift(m, 10, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_support);
  }
}

TEST(PredictUplift, PathPartitionsTheIntervalAndSums) {
  const auto m = fit(planted(linear50, -15, -5, 6000, 0, 7));
  const auto u = predict_uplift(m, -16.3, 9.1);
  ASSERT_FALSE(u.path.empty());
  EXPECT_DOUBLE_EQ(u.path.front().from, -16.3);
  EXPECT_DOUBLE_EQ(u.path.back().to, -16.3 + 9.1);
  double sum = 0;
  for (std::size_t i = 0; i < u.path.size(); ++i) {
    if (i > 0) EXPECT_EQ(u.path[i].from, u.path[i - 1].to);
    sum += u.path[i].contribution;
  }
  EXPECT_NEAR(sum, u.predicted_delta_y, 1e-9);
  // The part below the populated range has no slope and contributes zero.
  EXPECT_TRUE(u.crosses_undefined);
  EXPECT_FALSE(u.path.front().slope);
  EXPECT_EQ(u.path.front().contribution, 0.0);
}

TEST(PredictUplift, PiecewiseGeneratorAcrossTwoRegimes) {
  const auto f = [](double x) { return x <= -100 ? 200.0 * (x + 120) : 4000.0 + 50.0 * (x + 100); };
  const auto m = fit(planted(f, -120, -80, 20000, 0, 8));
  const double truth = f(-94) - f(-106);
  EXPECT_TRUE(test::near_rel(predict_uplift(m, -106, 12).predicted_delta_y, truth, 0.15));
}

TEST(PredictUplift, AdditiveOverSplitIntervals) {
  const auto f = [](double x) { return 3000 + 80 * x + 0.5 * x * x; };
  const auto m = fit(planted(f, -120, -80, 20000, 50, 9));
  PortableRng rng(10);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-118, -100), a = rng.uniform(0, 8), b = rng.uniform(0, 8);
    const double whole = predict_uplift(m, x, a + b).predicted_delta_y;
    const double parts = predict_uplift(m, x, a).predicted_delta_y + predict_uplift(m, x + a, b).predicted_delta_y;
    EXPECT_NEAR(whole, parts, 1e-7 * std::max(1.0, std::abs(whole)));
  }
}

// Standard error of the count-weighted slope over one bin's window.
double window_slope_se(const SensitivityModel& m, const SensitivityBin& bin) {
  double sw = 0, swx = 0, swy = 0;
  std::vector<const SensitivityBin*> win;
  for (const auto& o : m.bins) {
    if (std::abs(o.index - bin.index) <= 2) win.push_back(&o);
  }
  for (const auto* o : win) {
    const double w = static_cast<double>(o->count);
    sw += w;
    swx += w * o->x_median;
    swy += w * o->median_y;
  }
  const double xb = swx / sw, yb = swy / sw;
  double sxx = 0, sxy = 0;
  for (const auto* o : win) {
    const double w = static_cast<double>(o->count);
    sxx += w * (o->x_median - xb) * (o->x_median - xb);
    sxy += w * (o->x_median - xb) * (o->median_y - yb);
  }
  const double slope = sxy / sxx, icept = yb - slope * xb;
  double rss = 0;
  for (const auto* o : win) {
    const double r = o->median_y - icept - slope * o->x_median;
    rss += static_cast<double>(o->count) * r * r;
  }
  // Treat the window as sw weighted observations of the bin medians.
  const double sigma2 = rss / sw * static_cast<double>(win.size()) / std::max(1.0, static_cast<double>(win.size()) - 2);
  return std::sqrt(sigma2 / sxx);
}

TEST(FitSensitivity, HalfSampleSlopesAgreeWithinTwoStandardErrors) {
  const auto pts = planted(linear50, -120, -80, 40000, 400, 11);
  std::vector<XYPoint> half;
  for (std::size_t i = 0; i < pts.size(); i += 2) half.push_back(pts[i]);
  const auto full = fit(pts);
  const auto sub = fit(half);
  std::size_t compared = 0;
  for (const auto& b : sub.bins) {
    const auto* f = full.bin_at(b.x_center);
    if (!b.slope || !f || !f->slope) continue;
    // Median of n normal draws has sd ~ 1.2533 sigma / sqrt(n).
    const double per_bin_sd = 1.2533 * 400 / std::sqrt(static_cast<double>(b.count));
    const double se = std::max(window_slope_se(sub, b), per_bin_sd / std::sqrt(8.0));
    EXPECT_LE(std::abs(*b.slope - *f->slope), 2 * se) << b.index;
    ++compared;
  }
  EXPECT_GE(compared, 15u);
}

// Independent scorer for the prioritization rule.
std::vector<std::string> priority_oracle(const std::vector<CellProfile>& cells, const std::vector<double>& slopes) {
  const std::size_t n = cells.size();
  std::vector<std::pair<double, std::string>> scored;
  for (std::size_t i = 0; i < n; ++i) {
    double better = 0, flatter = 0;
    for (std::size_t j = 0; j < n; ++j) {
      better += *cells[j].median_kbps > *cells[i].median_kbps;
      flatter += std::abs(slopes[j]) < std::abs(slopes[i]);
    }
    scored.push_back({0.5 * better / (n - 1) + 0.5 * flatter / (n - 1), cells[i].cell_id});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> ids;
  for (auto& s : scored) ids.push_back(s.second);
  return ids;
}

SensitivityModel single_bin_model(const std::string& cell, double x, double slope) {
  SensitivityModel m;
  m.cell_id = cell;
  SensitivityBin b;
  b.index = static_cast<std::int64_t>(std::floor(x / 2.0));
  b.x_center = (static_cast<double>(b.index) + 0.5) * 2.0;
  b.x_median = x;
  b.count = 100;
  b.slope = slope;
  m.bins.push_back(b);
  return m;
}

TEST(Prioritize, MatchesBruteForceScorerAndIgnoresInputOrder) {
  PortableRng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<CellProfile> cells;
    std::vector<double> slopes;
    std::map<std::string, SensitivityModel> models;
    for (int i = 0; i < 20; ++i) {
      const std::string id = "c" + std::to_string(i);
      const double rsrp = rng.uniform(-120, -80);
      cells.push_back(test::profile(id, std::round(rng.uniform(1000, 9000) / 500) * 500, rsrp));
      slopes.push_back(std::round(rng.uniform(-300, 300) / 50) * 50);
      models.emplace(id, single_bin_model(id, rsrp, slopes.back()));
    }
    const auto expect = priority_oracle(cells, slopes);
    auto got = prioritize_cells(cells, models);
    ASSERT_EQ(got.size(), expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].cell_id, expect[i]);

    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    std::vector<CellProfile> shuffled;
    for (auto i : order) shuffled.push_back(cells[i]);
    const auto again = prioritize_cells(shuffled, models);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(again[i].cell_id, got[i].cell_id);
      EXPECT_EQ(again[i].score, got[i].score);
    }
  }
}

TEST(Prioritize, DominantCellFirstAndTiesByCellId) {
  std::vector<CellProfile> cells{test::profile("b", 5000, -100), test::profile("a", 5000, -100),
                                 test::profile("w", 1000, -100)};
  std::map<std::string, SensitivityModel> models{{"a", single_bin_model("a", -100, 10)},
                                                 {"b", single_bin_model("b", -100, 10)},
                                                 {"w", single_bin_model("w", -100, 90)}};
  const auto p = prioritize_cells(cells, models);
  EXPECT_EQ(p[0].cell_id, "w");
  EXPECT_EQ(p[0].score, 1.0);
  EXPECT_EQ(p[1].cell_id, "a");
  EXPECT_EQ(p[2].cell_id, "b");
}

}  // namespace
}  // namespace ranopt
