// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>

#include "ranopt/aggregation.hpp"
#include "ranopt/random.hpp"
#include "support.hpp"

namespace ranopt {
namespace {

using test::sample;

TEST(HourBucket, FloorsNegativeEpochs) {
  EXPECT_EQ(hour_bucket_of(0), 0);
  EXPECT_EQ(hour_bucket_of(3599), 0);
  EXPECT_EQ(hour_bucket_of(-1), -1);
  EXPECT_EQ(hour_of_day(-1), 23);
}

TEST(AggregateHourly, SplitsByHour) {
  std::vector<MeasurementSample> s{sample("c-0", 0, 100), sample("c-0", 3600, 200)};
  const auto h = aggregate_hourly(s);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].num_samples, 1u);
  EXPECT_EQ(h[1].num_samples, 1u);
  EXPECT_EQ(*h[1].median_kbps, 200.0);
}

TEST(AggregateHourly, MediansUsePresentValuesOnly) {
  std::vector<MeasurementSample> s{sample("c-0", 10, 4), sample("c-0", 20, 8), sample("c-0", 30, 100),
                                   sample("c-0", 40, std::nullopt, -90)};
  s[0].bytes = 10;
  s[2].bytes = 5;
  const auto h = aggregate_hourly(s);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].num_samples, 4u);
  EXPECT_EQ(*h[0].median_kbps, 8.0);
  EXPECT_EQ(*h[0].median_rsrp_dbm, -90.0);
  EXPECT_FALSE(h[0].median_rtt_ms);
  EXPECT_EQ(h[0].total_bytes, 15.0);

  std::vector<MeasurementSample> even{sample("c-0", 10, 4), sample("c-0", 20, 8)};
  EXPECT_EQ(*aggregate_hourly(even)[0].median_kbps, 6.0);
}

TEST(AggregateHourly, SortedByCellThenBucket) {
  std::vector<MeasurementSample> s{sample("b-0", 7200, 1), sample("a-0", 7200, 1), sample("b-0", 0, 1),
                                   sample("a-0", 3600, 1)};
  const auto h = aggregate_hourly(s);
  ASSERT_EQ(h.size(), 4u);
  EXPECT_TRUE(std::is_sorted(h.begin(), h.end(), [](const auto& x, const auto& y) {
    return std::tie(x.cell_id, x.hour_bucket) < std::tie(y.cell_id, y.hour_bucket);
  }));
}

std::vector<CellHourlyAggregate> daily_pattern(int days, const std::array<std::size_t, 24>& counts) {
  std::vector<CellHourlyAggregate> h;
  for (int d = 0; d < days; ++d) {
    for (int hod = 0; hod < 24; ++hod) {
      if (counts[hod] > 0) h.push_back(test::hour("c-0", d * 24 + hod, counts[hod], 0.0, 1000.0));
    }
  }
  return h;
}

TEST(BusyHours, ConstantCountsGiveDisjointEmptyClasses) {
  std::array<std::size_t, 24> flat;
  flat.fill(10);
  const auto l = label_busy_hours(daily_pattern(14, flat), "c-0");
  EXPECT_TRUE(l.busy_hours.empty());
  EXPECT_TRUE(l.nonbusy_hours.empty());
}

TEST(BusyHours, SinglePeakIsBusy) {
  std::array<std::size_t, 24> counts;
  for (int h = 0; h < 24; ++h) counts[h] = 10 + h % 3;
  counts[20] = 100;
  const auto l = label_busy_hours(daily_pattern(14, counts), "c-0");
  EXPECT_TRUE(l.busy_hours.contains(20));
  EXPECT_FALSE(l.nonbusy_hours.contains(20));
  EXPECT_FALSE(l.insufficient_data);
  EXPECT_EQ(l.days_observed, 14u);
}

TEST(BusyHours, ShortHistoryFlagsInsufficientData) {
  std::array<std::size_t, 24> counts;
  counts.fill(5);
  counts[20] = 50;
  const auto l = label_busy_hours(daily_pattern(3, counts), "c-0");
  EXPECT_TRUE(l.insufficient_data);
}

// Classes never overlap and follow the quartile definition.
TEST(BusyHours, ClassesMatchQuartileOracle) {
  PortableRng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::array<std::size_t, 24> counts;
    for (auto& c : counts) c = 1 + rng.below(30);
    const auto l = label_busy_hours(daily_pattern(7, counts), "c-0");
    std::vector<double> means(counts.begin(), counts.end());
    std::sort(means.begin(), means.end());
    auto q = [&](double p) {
      const double h = 23.0 * p;
      const auto lo = static_cast<std::size_t>(h);
      return means[lo] + (h - static_cast<double>(lo)) * (means[std::min<std::size_t>(lo + 1, 23)] - means[lo]);
    };
    const double p25 = q(0.25), p75 = q(0.75), med = q(0.5);
    for (int h = 0; h < 24; ++h) {
      const double m = static_cast<double>(counts[h]);
      const bool hi = m >= p75, lo = m <= p25;
      const bool busy = hi && (!lo || m > med);
      const bool nonbusy = lo && (!hi || m < med);
      EXPECT_EQ(l.busy_hours.contains(h), busy) << h;
      EXPECT_EQ(l.nonbusy_hours.contains(h), nonbusy) << h;
    }
  }
}

TEST(CongestionIndicator, Examples) {
  EXPECT_DOUBLE_EQ(*congestion_indicator(8000, 6000), 25.0);
  EXPECT_EQ(*congestion_indicator(5000, 5000), 0.0);
  EXPECT_EQ(*congestion_indicator(5000, 6000), 0.0);
  EXPECT_FALSE(congestion_indicator(std::nullopt, 6000));
  EXPECT_FALSE(congestion_indicator(5000, std::nullopt));
  EXPECT_FALSE(congestion_indicator(0, 10));
}

TEST(CongestionIndicator, RangeWhenBusySpeedPositive) {
  PortableRng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double c = *congestion_indicator(rng.uniform(1, 1e5), rng.uniform(1e-3, 1e5));
    EXPECT_GE(c, 0.0);
    EXPECT_LT(c, 100.0);
  }
}

std::vector<MeasurementSample> two_class_samples(double nonbusy_kbps, double busy_kbps, int days) {
  std::vector<MeasurementSample> s;
  for (int d = 0; d < days; ++d) {
    for (int h = 0; h < 24; ++h) {
      const bool busy = h >= 17 && h <= 22;
      const bool quiet = h >= 1 && h <= 6;
      const int n = busy ? 20 : quiet ? 4 : 10;
      for (int i = 0; i < n; ++i) {
        const double kbps = busy ? busy_kbps : nonbusy_kbps;
        s.push_back(sample("c-0", (d * 24 + h) * 3600 + i, kbps + i % 3));
      }
    }
  }
  return s;
}

TEST(Profile, PlantedTwoClassIndicator) {
  const auto s = two_class_samples(10000, 7500, 14);
  const auto h = aggregate_hourly(s);
  const auto l = label_busy_hours(h, "c-0");
  const auto p = build_cell_profile(h, s, l, {0, 14 * 86400});
  ASSERT_TRUE(p.congestion_indicator_pct);
  EXPECT_NEAR(*p.congestion_indicator_pct, 25.0, 0.1);
  EXPECT_EQ(p.num_samples, s.size());
}

TEST(Profile, BusyOnlyDataHasNoIndicator) {
  auto h = aggregate_hourly(two_class_samples(10000, 7500, 14));
  const auto l = label_busy_hours(h, "c-0");
  std::erase_if(h, [&](const auto& x) { return !l.busy_hours.contains(hour_of_day(x.hour_bucket)); });
  const auto p = build_cell_profile(h, {}, l, {0, 14 * 86400});
  EXPECT_FALSE(p.nonbusy_speed_kbps);
  EXPECT_FALSE(p.congestion_indicator_pct);
}

TEST(Profile, SingleHourIsInsufficient) {
  std::vector<MeasurementSample> s{sample("c-0", 0, 100), sample("c-0", 10, 200)};
  const auto h = aggregate_hourly(s);
  const auto l = label_busy_hours(h, "c-0");
  const auto p = build_cell_profile(h, s, l, {0, 3600});
  EXPECT_FALSE(p.congestion_indicator_pct);
  EXPECT_EQ(*p.median_kbps, 150.0);
}

TEST(AreaCongestion, WeightedMean) {
  std::vector<WeightedIndicator> cells{{"a", 20.0, 100}, {"b", 40.0, 300}, {"c", std::nullopt, 1000}};
  const auto a = area_congestion("area", cells);
  ASSERT_TRUE(a);
  EXPECT_DOUBLE_EQ(a->congestion_indicator_pct, 35.0);
  EXPECT_EQ(a->contributors.size(), 2u);
}

TEST(AreaCongestion, SingleCellIdentity) {
  std::vector<WeightedIndicator> cells{{"a", 12.5, 7}};
  EXPECT_EQ(area_congestion("x", cells)->congestion_indicator_pct, 12.5);
  std::vector<WeightedIndicator> none{{"a", std::nullopt, 7}};
  EXPECT_FALSE(area_congestion("x", none));
}

TEST(AreaCongestion, EqualWeightsGiveArithmeticMean) {
  PortableRng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<WeightedIndicator> cells;
    double sum = 0;
    const std::size_t n = 1 + rng.below(20);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = rng.uniform(0, 99);
      sum += c;
      cells.push_back({"c" + std::to_string(i), c, 3.0});
    }
    EXPECT_NEAR(area_congestion("x", cells)->congestion_indicator_pct, sum / static_cast<double>(n), 1e-9);
  }
}

}  // namespace
}  // namespace ranopt
