// SPDX-License-Identifier: Apache-2.0

#include "ranopt/aggregation.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "ranopt/stats.hpp"

namespace ranopt {

std::int64_t hour_bucket_of(EpochSeconds t) {
  std::int64_t q = t / kSecondsPerHour;
  if (t % kSecondsPerHour < 0) --q;
  return q;
}

int hour_of_day(std::int64_t bucket) {
  std::int64_t h = bucket % 24;
  if (h < 0) h += 24;
  return static_cast<int>(h);
}

namespace {

struct Accumulator {
  std::size_t n = 0;
  std::vector<double> bytes, kbps, rtt, rsrp, rsrq;
};

std::optional<double> median_of(const std::vector<double>& v) { return stats::median(v); }

}  // namespace

std::vector<CellHourlyAggregate> aggregate_hourly(std::span<const MeasurementSample> samples) {
  std::map<std::pair<std::string, std::int64_t>, Accumulator> acc;
  for (const auto& s : samples) {
    auto& a = acc[{s.cell_id, hour_bucket_of(s.timestamp)}];
    ++a.n;
    if (s.bytes) a.bytes.push_back(*s.bytes);
    if (s.app_kbps) a.kbps.push_back(*s.app_kbps);
    if (s.rtt_ms) a.rtt.push_back(*s.rtt_ms);
    if (s.rsrp_dbm) a.rsrp.push_back(*s.rsrp_dbm);
    if (s.rsrq_db) a.rsrq.push_back(*s.rsrq_db);
  }
  std::vector<CellHourlyAggregate> out;
  out.reserve(acc.size());
  for (auto& [key, a] : acc) {
    // Summed in sorted order so the total does not depend on sample order.
    std::sort(a.bytes.begin(), a.bytes.end());
    double total = 0.0;
    for (double b : a.bytes) total += b;
    out.push_back({key.first, key.second, a.n, total, median_of(a.kbps), median_of(a.rtt),
                   median_of(a.rsrp), median_of(a.rsrq)});
  }
  return out;
}

BusyHourLabeling label_busy_hours(std::span<const CellHourlyAggregate> hourly, std::string_view cell_id,
                                  const BusyHourParams& params) {
  BusyHourLabeling labeling;
  labeling.cell_id = std::string(cell_id);
  std::array<double, 24> sum{};
  std::array<std::size_t, 24> buckets{};
  std::unordered_set<std::int64_t> days;
  for (const auto& h : hourly) {
    if (h.cell_id != cell_id) continue;
    const int hod = hour_of_day(h.hour_bucket);
    sum[hod] += static_cast<double>(h.num_samples);
    ++buckets[hod];
    std::int64_t day = h.hour_bucket / 24;
    if (h.hour_bucket % 24 < 0) --day;
    days.insert(day);
  }
  labeling.days_observed = days.size();
  for (int h = 0; h < 24; ++h) {
    labeling.mean_count[h] = buckets[h] > 0 ? sum[h] / static_cast<double>(buckets[h]) : 0.0;
  }
  if (static_cast<int>(days.size()) < params.min_days) {
    labeling.insufficient_data = true;
    return labeling;
  }

  const std::span<const double> means(labeling.mean_count);
  const double p75 = *stats::quantile(means, 0.75);
  const double p25 = *stats::quantile(means, 0.25);
  const double p50 = *stats::median(means);
  for (int h = 0; h < 24; ++h) {
    const double m = labeling.mean_count[h];
    const bool busy = m >= p75;
    const bool nonbusy = m <= p25;
    if (busy && nonbusy) {
      if (m > p50) labeling.busy_hours.insert(h);
      else if (m < p50) labeling.nonbusy_hours.insert(h);
    } else if (busy) {
      labeling.busy_hours.insert(h);
    } else if (nonbusy) {
      labeling.nonbusy_hours.insert(h);
    }
  }
  return labeling;
}

std::optional<double> congestion_indicator(std::optional<double> nonbusy_kbps,
                                           std::optional<double> busy_kbps) {
  if (!nonbusy_kbps || !busy_kbps || !(*nonbusy_kbps > 0.0)) return std::nullopt;
  const double a = *nonbusy_kbps, b = *busy_kbps;
  if (b >= a) return 0.0;
  return (a - b) / a * 100.0;
}

std::optional<double> CellProfile::metric(Metric m) const {
  switch (m) {
    case Metric::app_kbps: return median_kbps;
    case Metric::rtt_ms: return median_rtt_ms;
    case Metric::rsrp_dbm: return median_rsrp_dbm;
    case Metric::rsrq_db: return median_rsrq_db;
    case Metric::congestion_pct: return congestion_indicator_pct;
    case Metric::num_samples: return static_cast<double>(num_samples);
    case Metric::total_bytes: return std::nullopt;
  }
  return std::nullopt;
}

CellProfile build_cell_profile(std::span<const CellHourlyAggregate> hourly,
                               std::span<const MeasurementSample> samples,
                               const BusyHourLabeling& labeling, TimeWindow window,
                               const ProfileParams& params) {
  CellProfile profile;
  profile.cell_id = labeling.cell_id;
  profile.window = window;

  std::vector<double> busy_speeds, nonbusy_speeds;
  std::size_t busy_n = 0, nonbusy_n = 0, hourly_n = 0;
  std::vector<double> h_kbps, h_rtt, h_rsrp, h_rsrq;
  for (const auto& h : hourly) {
    if (h.cell_id != labeling.cell_id || !window.contains(h.hour_bucket * kSecondsPerHour)) continue;
    hourly_n += h.num_samples;
    if (h.median_kbps) h_kbps.push_back(*h.median_kbps);
    if (h.median_rtt_ms) h_rtt.push_back(*h.median_rtt_ms);
    if (h.median_rsrp_dbm) h_rsrp.push_back(*h.median_rsrp_dbm);
    if (h.median_rsrq_db) h_rsrq.push_back(*h.median_rsrq_db);
    if (labeling.insufficient_data) continue;
    const int hod = hour_of_day(h.hour_bucket);
    if (labeling.busy_hours.contains(hod)) {
      busy_n += h.num_samples;
      if (h.median_kbps) busy_speeds.push_back(*h.median_kbps);
    } else if (labeling.nonbusy_hours.contains(hod)) {
      nonbusy_n += h.num_samples;
      if (h.median_kbps) nonbusy_speeds.push_back(*h.median_kbps);
    }
  }

  std::vector<double> s_kbps, s_rtt, s_rsrp, s_rsrq;
  std::size_t sample_n = 0;
  for (const auto& s : samples) {
    if (s.cell_id != labeling.cell_id || !window.contains(s.timestamp)) continue;
    ++sample_n;
    if (s.app_kbps) s_kbps.push_back(*s.app_kbps);
    if (s.rtt_ms) s_rtt.push_back(*s.rtt_ms);
    if (s.rsrp_dbm) s_rsrp.push_back(*s.rsrp_dbm);
    if (s.rsrq_db) s_rsrq.push_back(*s.rsrq_db);
  }
  if (sample_n > 0) {
    profile.num_samples = sample_n;
    profile.median_kbps = stats::median(s_kbps);
    profile.median_rtt_ms = stats::median(s_rtt);
    profile.median_rsrp_dbm = stats::median(s_rsrp);
    profile.median_rsrq_db = stats::median(s_rsrq);
  } else {
    profile.num_samples = hourly_n;
    profile.median_kbps = stats::median(h_kbps);
    profile.median_rtt_ms = stats::median(h_rtt);
    profile.median_rsrp_dbm = stats::median(h_rsrp);
    profile.median_rsrq_db = stats::median(h_rsrq);
  }

  if (nonbusy_n >= params.min_class_samples) profile.nonbusy_speed_kbps = stats::median(nonbusy_speeds);
  if (busy_n >= params.min_class_samples) profile.busy_speed_kbps = stats::median(busy_speeds);
  profile.congestion_indicator_pct =
      congestion_indicator(profile.nonbusy_speed_kbps, profile.busy_speed_kbps);
  return profile;
}

std::optional<AreaCongestion> area_congestion(std::string area_id,
                                              std::span<const WeightedIndicator> cells) {
  AreaCongestion area;
  area.area_id = std::move(area_id);
  double sw = 0.0, swc = 0.0;
  for (const auto& c : cells) {
    if (!c.indicator_pct || c.weight < 0.0) continue;
    sw += c.weight;
    swc += c.weight * *c.indicator_pct;
    area.contributors.push_back(c);
  }
  if (area.contributors.empty() || !(sw > 0.0)) return std::nullopt;
  area.congestion_indicator_pct = swc / sw;
  // Guard the [min, max] envelope against rounding in the weighted sum.
  const auto [lo, hi] = std::minmax_element(
      area.contributors.begin(), area.contributors.end(),
      [](const auto& a, const auto& b) { return *a.indicator_pct < *b.indicator_pct; });
  area.congestion_indicator_pct =
      std::clamp(area.congestion_indicator_pct, *lo->indicator_pct, *hi->indicator_pct);
  return area;
}

}  // namespace ranopt
