// SPDX-License-Identifier: Apache-2.0

#include "ranopt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "ranopt/digest.hpp"
#include "ranopt/error.hpp"
#include "ranopt/geo.hpp"
#include "ranopt/ingest.hpp"
#include "ranopt/random.hpp"

namespace ranopt {

std::string_view to_string(KbpsCurve curve) {
  return curve == KbpsCurve::linear ? "linear" : "saturating";
}

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::validation, path + ": " + what);
}

void require_fraction(double v, const std::string& path) {
  if (!(v >= 0.0 && v <= 1.0)) invalid(path, "must be in [0, 1]");
}

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0) || !std::isfinite(v)) invalid(path, "must be positive");
}

void require_non_negative(double v, const std::string& path) {
  if (!(v >= 0.0) || !std::isfinite(v)) invalid(path, "must be non-negative");
}

void require_finite(double v, const std::string& path) {
  if (!std::isfinite(v)) invalid(path, "must be finite");
}

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

// Type-7 quantile, kept separate from the engine's implementation.
double generator_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double generator_median(std::vector<double> v) { return generator_quantile(std::move(v), 0.5); }

double knee_bytes(double x, double rate, double x0, double fraction) {
  return x <= x0 ? rate * x : rate * (x0 + fraction * (x - x0));
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  if (spec.scenario_id.empty()) invalid("scenario_id", "must not be empty");
  if (spec.days < 1 || spec.days > 3660) invalid("days", "must be in [1, 3660]");
  require_fraction(spec.located_fraction, "located_fraction");
  require_fraction(spec.rtt_missing_fraction, "rtt_missing_fraction");
  require_non_negative(spec.bytes_noise, "bytes_noise");
  require_non_negative(spec.shadowing_sd_db, "shadowing_sd_db");
  require_positive(spec.path_loss_exponent, "path_loss_exponent");
  require_finite(spec.rsrp_at_100m_dbm, "rsrp_at_100m_dbm");
  require_positive(spec.pattern.beamwidth_3db_deg, "pattern.beamwidth_3db_deg");
  require_non_negative(spec.pattern.max_attenuation_db, "pattern.max_attenuation_db");
  if (spec.sites.empty()) invalid("sites", "must not be empty");

  std::set<std::string> site_ids;
  std::map<std::string, std::string> cell_site;
  for (std::size_t i = 0; i < spec.sites.size(); ++i) {
    const auto& site = spec.sites[i];
    const std::string sp = "sites[" + std::to_string(i) + "]";
    if (site.site_id.empty()) invalid(sp + ".site_id", "must not be empty");
    if (!site_ids.insert(site.site_id).second) invalid(sp + ".site_id", "duplicate " + site.site_id);
    if (!(std::abs(site.location.lat) <= 85.0)) invalid(sp + ".location.lat", "must be in [-85, 85]");
    if (!(std::abs(site.location.lon) <= 180.0)) invalid(sp + ".location.lon", "must be in [-180, 180]");
    require_non_negative(site.antenna_height_m, sp + ".antenna_height_m");
    require_non_negative(site.coordinate_error_m, sp + ".coordinate_error_m");
    require_finite(site.coordinate_error_bearing_deg, sp + ".coordinate_error_bearing_deg");
    if (site.cells.empty()) invalid(sp + ".cells", "must not be empty");
    std::set<int> sectors;
    for (std::size_t j = 0; j < site.cells.size(); ++j) {
      const auto& c = site.cells[j];
      const std::string cp = sp + ".cells[" + std::to_string(j) + "]";
      if (c.cell_id.empty()) invalid(cp + ".cell_id", "must not be empty");
      if (!cell_site.emplace(c.cell_id, site.site_id).second) invalid(cp + ".cell_id", "duplicate " + c.cell_id);
      if (c.sector_id < 0 || c.sector_id > SampleBounds::sector_max) invalid(cp + ".sector_id", "must be in [0, 5]");
      if (!sectors.insert(c.sector_id).second) invalid(cp + ".sector_id", "duplicate within site");
      require_finite(c.true_boresight_deg, cp + ".true_boresight_deg");
      require_finite(c.recorded_azimuth_deg, cp + ".recorded_azimuth_deg");
      require_finite(c.cloud_bearing_deg, cp + ".cloud_bearing_deg");
      require_positive(c.cloud_distance_m, cp + ".cloud_distance_m");
      require_non_negative(c.cloud_bearing_spread_deg, cp + ".cloud_bearing_spread_deg");
      require_non_negative(c.cloud_distance_spread, cp + ".cloud_distance_spread");
      double total = 0.0;
      for (std::size_t h = 0; h < 24; ++h) {
        require_non_negative(c.diurnal[h], cp + ".diurnal[" + std::to_string(h) + "]");
        total += c.diurnal[h];
      }
      if (!(total > 0.0)) invalid(cp + ".diurnal", "must have a positive hour");
      require_positive(c.base_kbps, cp + ".base_kbps");
      require_fraction(c.busy_depression, cp + ".busy_depression");
      require_finite(c.kbps_per_db, cp + ".kbps_per_db");
      require_positive(c.saturation_scale_db, cp + ".saturation_scale_db");
      require_non_negative(c.kbps_noise_sd, cp + ".kbps_noise_sd");
      require_finite(c.tx_offset_db, cp + ".tx_offset_db");
      require_finite(c.rsrq_base_db, cp + ".rsrq_base_db");
      require_positive(c.rtt_base_ms, cp + ".rtt_base_ms");
      if (c.knee_x0) require_non_negative(*c.knee_x0, cp + ".knee_x0");
      require_fraction(c.knee_fraction, cp + ".knee_fraction");
      require_non_negative(c.bytes_per_sample, cp + ".bytes_per_sample");
      require_fraction(c.weekly_growth, cp + ".weekly_growth");
    }
  }
  for (std::size_t i = 0; i < spec.swaps.size(); ++i) {
    const auto& s = spec.swaps[i];
    const std::string p = "swaps[" + std::to_string(i) + "]";
    auto a = cell_site.find(s.cell_a);
    auto b = cell_site.find(s.cell_b);
    if (a == cell_site.end()) invalid(p + ".cell_a", "unknown cell " + s.cell_a);
    if (b == cell_site.end()) invalid(p + ".cell_b", "unknown cell " + s.cell_b);
    if (s.cell_a == s.cell_b) invalid(p, "cells must differ");
    if (a->second != b->second) invalid(p, "cells must share a site");
  }
}

ScenarioSpec reference_scenario(const ReferenceOptions& options) {
  ScenarioSpec spec;
  spec.scenario_id = "reference-" + std::to_string(options.seed);
  spec.seed = options.seed;
  spec.days = options.days;
  spec.bytes_noise = options.bytes_noise;

  std::array<double, 24> diurnal{};
  for (int h = 0; h < 24; ++h) {
    if (h >= 1 && h <= 6) diurnal[h] = 5.0;
    else if (h >= 17 && h <= 22) diurnal[h] = 25.0;
    else diurnal[h] = 10.0;
  }

  const GeoPoint origin{40.0, -100.0};
  const int cps = std::max(1, options.cells_per_site);
  for (int i = 0; i < options.n_sites; ++i) {
    SitePlan site;
    site.site_id = (i < 10 ? "S0" : "S") + std::to_string(i);
    site.location = geo::from_local(origin, {2000.0 * (i % 5), 2000.0 * (i / 5)});
    site.antenna_height_m = 25.0 + 5.0 * (i % 3);
    const double rotation = static_cast<double>((i * 37) % 120);
    for (int s = 0; s < cps; ++s) {
      const int ordinal = i * cps + s;
      CellPlan c;
      c.cell_id = site.site_id + "-" + std::to_string(s);
      c.sector_id = s;
      c.true_boresight_deg = geo::normalize_deg(rotation + 360.0 / cps * s);
      c.recorded_azimuth_deg = c.true_boresight_deg;
      c.cloud_bearing_deg = c.true_boresight_deg;
      c.cloud_distance_m = 500.0 + 60.0 * (ordinal % 7);
      const double scale = 0.9 + 0.05 * (ordinal % 5);
      for (int h = 0; h < 24; ++h) c.diurnal[h] = diurnal[h] * scale;
      c.base_kbps = 8000.0 + 500.0 * (ordinal % 13);
      c.rsrq_base_db = -11.0 + 0.5 * (ordinal % 9);
      c.rtt_base_ms = 30.0 + 3.0 * (ordinal % 10);
      c.knee_fraction = ordinal % 5 == 2 ? 0.4 : 1.0;
      c.weekly_growth = ordinal % 3 == 0 ? 0.02 : 0.0;
      site.cells.push_back(c);
    }
    spec.sites.push_back(std::move(site));
  }

  auto cell_at = [&](int site, int sector) -> CellPlan* {
    if (site >= static_cast<int>(spec.sites.size()) || sector >= cps) return nullptr;
    return &spec.sites[site].cells[sector];
  };

  // Swapped pair in the style of a recorded 75/170 exchange: deltas near +95 and -91.
  if (cps >= 3 && cell_at(0, 2)) {
    auto* a = cell_at(0, 0);
    auto* mid = cell_at(0, 1);
    auto* b = cell_at(0, 2);
    a->true_boresight_deg = a->cloud_bearing_deg = 170.0;
    a->recorded_azimuth_deg = 75.0;
    mid->true_boresight_deg = mid->cloud_bearing_deg = mid->recorded_azimuth_deg = 290.0;
    b->true_boresight_deg = b->cloud_bearing_deg = 79.0;
    b->recorded_azimuth_deg = 170.0;
    spec.swaps.push_back({a->cell_id, b->cell_id});
  }
  // Users concentrated 35 degrees clockwise of where the antenna points.
  if (auto* c = cell_at(1, std::min(1, cps - 1))) {
    c->cloud_bearing_deg = geo::normalize_deg(c->true_boresight_deg + 35.0);
  }
  if (spec.sites.size() > 7) {
    spec.sites[7].coordinate_error_m = 30000.0;
    spec.sites[7].coordinate_error_bearing_deg = 45.0;
  }

  std::set<std::string> faulty;
  if (auto* c = cell_at(3, 0)) {
    c->fault = CauseLabel::coverage;
    c->planted_worst_kbps = true;
    c->tx_offset_db = -18.0;
    c->cloud_distance_m = 600.0;
    c->base_kbps = 5000.0;
    c->kbps_per_db = 250.0;
    c->rsrq_base_db = -7.0;
    c->rtt_base_ms = 35.0;
    faulty.insert(c->cell_id);
  }
  if (auto* c = cell_at(9, std::min(2, cps - 1))) {
    c->fault = CauseLabel::capacity_congestion;
    c->planted_worst_kbps = true;
    c->cloud_distance_m = 450.0;
    c->base_kbps = 9000.0;
    c->busy_depression = 0.6;
    c->rsrq_base_db = -7.0;
    c->rtt_base_ms = 35.0;
    faulty.insert(c->cell_id);
  }
  if (auto* c = cell_at(14, std::min(1, cps - 1))) {
    c->fault = CauseLabel::interference_or_quality;
    c->planted_worst_kbps = true;
    c->cloud_distance_m = 450.0;
    c->base_kbps = 5500.0;
    c->rsrq_base_db = -18.0;
    c->rtt_base_ms = 35.0;
    faulty.insert(c->cell_id);
  }

  // Fifteen congested cells: ordinals 1 mod 4 first, then 3 mod 4.
  std::size_t congested = 0;
  for (int residue : {1, 3}) {
    for (std::size_t i = 0; i < spec.sites.size(); ++i) {
      for (std::size_t s = 0; s < spec.sites[i].cells.size(); ++s) {
        auto& c = spec.sites[i].cells[s];
        const auto ordinal = static_cast<int>(i) * cps + static_cast<int>(s);
        if (congested >= 15 || ordinal % 4 != residue || faulty.contains(c.cell_id)) continue;
        c.base_kbps = 10000.0;
        c.busy_depression = 0.25;
        ++congested;
      }
    }
  }
  return spec;
}

double CellTruth::expected_kbps(double rsrp_dbm) const {
  const double u = rsrp_dbm - rsrp_reference_dbm;
  if (curve == KbpsCurve::linear) return base_kbps + kbps_per_db * u;
  return base_kbps + kbps_per_db * saturation_scale_db * (1.0 - std::exp(-u / saturation_scale_db));
}

double CellTruth::expected_slope(double rsrp_dbm) const {
  if (curve == KbpsCurve::linear) return kbps_per_db;
  return kbps_per_db * std::exp(-(rsrp_dbm - rsrp_reference_dbm) / saturation_scale_db);
}

const CellTruth* GroundTruth::cell(std::string_view cell_id) const {
  for (const auto& c : cells) {
    if (c.cell_id == cell_id) return &c;
  }
  return nullptr;
}

namespace {

struct RawSample {
  EpochSeconds ts = 0;
  std::int64_t hour = 0;
  bool depressed = false;
  std::optional<GeoPoint> location;
  double rsrp = 0.0;
};

}  // namespace

GeneratedScenario generate_scenario(const ScenarioSpec& spec) {
  validate(spec);
  GeneratedScenario out;
  auto& truth = out.truth;
  truth.scenario_id = spec.scenario_id;
  truth.seed = spec.seed;
  truth.start = spec.start;
  truth.days = spec.days;
  truth.bytes_noise = spec.bytes_noise;

  std::map<std::string, double> recorded_azimuth;
  for (const auto& site : spec.sites) {
    for (const auto& c : site.cells) recorded_azimuth[c.cell_id] = c.recorded_azimuth_deg;
  }

  const std::int64_t hours = static_cast<std::int64_t>(spec.days) * 24;
  std::uint64_t ordinal = 0;
  for (const auto& site : spec.sites) {
    SiteConfig recorded;
    recorded.site_id = site.site_id;
    recorded.antenna_height_m = site.antenna_height_m;
    if (site.coordinate_error_m > 0.0) {
      const double b = site.coordinate_error_bearing_deg * std::numbers::pi / 180.0;
      const GeoPoint moved = geo::from_local(
          site.location, {site.coordinate_error_m * std::sin(b), site.coordinate_error_m * std::cos(b)});
      recorded.location = {round_to(moved.lat, 1e7), round_to(moved.lon, 1e7)};
    } else {
      recorded.location = {round_to(site.location.lat, 1e7), round_to(site.location.lon, 1e7)};
    }
    truth.sites.push_back({site.site_id, site.coordinate_error_m, site.coordinate_error_m > 10000.0});

    for (const auto& plan : site.cells) {
      PortableRng rng(mix_seed(spec.seed ^ mix_seed(++ordinal)));
      recorded.cells.push_back({plan.cell_id, plan.sector_id, round_to(geo::normalize_deg(plan.recorded_azimuth_deg), 1e6),
                                std::nullopt, std::nullopt});

      const double min_level = *std::min_element(plan.diurnal.begin(), plan.diurnal.end());
      std::vector<std::int64_t> counts(static_cast<std::size_t>(hours));
      for (std::int64_t h = 0; h < hours; ++h) {
        const double growth = std::pow(1.0 + plan.weekly_growth, static_cast<double>(h) / 168.0);
        counts[static_cast<std::size_t>(h)] = rng.poisson(plan.diurnal[h % 24] * growth);
      }

      std::vector<RawSample> raw;
      for (std::int64_t h = 0; h < hours; ++h) {
        const auto n = counts[static_cast<std::size_t>(h)];
        std::vector<EpochSeconds> offsets;
        for (std::int64_t k = 0; k < n; ++k) offsets.push_back(static_cast<EpochSeconds>(rng.below(3600)));
        std::sort(offsets.begin(), offsets.end());
        for (const auto off : offsets) {
          RawSample s;
          s.ts = spec.start + h * kSecondsPerHour + off;
          s.hour = h;
          s.depressed = plan.diurnal[h % 24] > min_level;
          const double bearing = plan.cloud_bearing_deg + plan.cloud_bearing_spread_deg * rng.normal();
          const double distance =
              std::clamp(plan.cloud_distance_m * std::exp(plan.cloud_distance_spread * rng.normal()), 30.0, 30000.0);
          const double br = bearing * std::numbers::pi / 180.0;
          const bool located = rng.bernoulli(spec.located_fraction);
          if (located) {
            const GeoPoint p = geo::from_local(site.location, {distance * std::sin(br), distance * std::cos(br)});
            s.location = GeoPoint{round_to(p.lat, 1e7), round_to(p.lon, 1e7)};
          }
          const double rsrp = spec.rsrp_at_100m_dbm + plan.tx_offset_db -
                              10.0 * spec.path_loss_exponent * std::log10(distance / 100.0) +
                              horizontal_antenna_gain(bearing - plan.true_boresight_deg, spec.pattern) +
                              spec.shadowing_sd_db * rng.normal();
          s.rsrp = round_to(std::clamp(rsrp, -140.0, -44.0), 10.0);
          raw.push_back(s);
        }
      }

      CellTruth ct;
      ct.cell_id = plan.cell_id;
      ct.site_id = site.site_id;
      ct.sector_id = plan.sector_id;
      ct.true_boresight_deg = geo::normalize_deg(plan.true_boresight_deg);
      ct.recorded_azimuth_deg = recorded.cells.back().azimuth_deg;
      ct.cloud_bearing_deg = geo::normalize_deg(plan.cloud_bearing_deg);
      ct.expected_azimuth_delta_deg = geo::azimuth_delta(ct.recorded_azimuth_deg, ct.cloud_bearing_deg);
      ct.azimuth_checkable = site.coordinate_error_m == 0.0;
      ct.n_samples = raw.size();
      ct.base_kbps = plan.base_kbps;
      ct.busy_depression = plan.busy_depression;
      ct.expected_congestion_pct = 100.0 * plan.busy_depression;
      ct.curve = plan.curve;
      ct.kbps_per_db = plan.kbps_per_db;
      ct.saturation_scale_db = plan.saturation_scale_db;
      ct.knee_fraction = plan.knee_fraction;
      ct.expected_suppressed = plan.knee_fraction < 0.8;
      ct.expected_slope_ratio = plan.knee_fraction;
      ct.weekly_growth = plan.weekly_growth;
      ct.fault = plan.fault;
      ct.planted_worst_kbps = plan.planted_worst_kbps;

      std::vector<double> rsrps;
      for (const auto& s : raw) rsrps.push_back(s.rsrp);
      ct.rsrp_reference_dbm = rsrps.empty() ? 0.0 : generator_median(rsrps);

      std::vector<double> count_values(counts.begin(), counts.end());
      ct.knee_x0 = plan.knee_x0 ? *plan.knee_x0 : generator_quantile(count_values, 0.70);

      std::vector<double> hour_bytes(static_cast<std::size_t>(hours), 0.0);
      for (const auto& s : raw) {
        MeasurementSample m;
        m.cell_id = plan.cell_id;
        m.site_id = site.site_id;
        m.sector_id = plan.sector_id;
        m.timestamp = s.ts;
        m.location = s.location;
        if (s.location) ++ct.n_located;
        m.rsrp_dbm = s.rsrp;

        double kbps = ct.expected_kbps(s.rsrp) + plan.kbps_noise_sd * rng.normal();
        if (s.depressed) kbps -= plan.busy_depression * plan.base_kbps;
        m.app_kbps = round_to(std::clamp(kbps, 1.0, 9.0e6), 10.0);

        const double rtt = plan.rtt_base_ms - 0.5 * (s.rsrp - ct.rsrp_reference_dbm) + 3.0 * rng.normal();
        if (!rng.bernoulli(spec.rtt_missing_fraction)) m.rtt_ms = round_to(std::clamp(rtt, 5.0, 5000.0), 10.0);
        m.rsrq_db = round_to(std::clamp(plan.rsrq_base_db + 1.0 * rng.normal(), -29.9, -3.0), 10.0);
        m.sinr_db = round_to(std::clamp(0.45 * (s.rsrp + 105.0) + 5.0 + 2.0 * rng.normal(), -19.9, 39.9), 10.0);

        const double x = static_cast<double>(counts[static_cast<std::size_t>(s.hour)]);
        double per_sample = knee_bytes(x, plan.bytes_per_sample, ct.knee_x0, plan.knee_fraction) / x;
        if (spec.bytes_noise > 0.0) per_sample *= 1.0 + spec.bytes_noise * rng.normal();
        m.bytes = std::round(std::max(0.0, per_sample));
        hour_bytes[static_cast<std::size_t>(s.hour)] += *m.bytes;
        out.samples.push_back(std::move(m));
      }

      // Expected upgrade gain under the true f1 and planted growth, over the
      // last 168 generated hours.
      for (int horizon : {4, 8}) {
        double predicted = 0.0, current = 0.0;
        for (std::int64_t h = std::max<std::int64_t>(0, hours - 168); h < hours; ++h) {
          const double x = static_cast<double>(counts[static_cast<std::size_t>(h)]);
          if (x == 0.0) continue;
          predicted += plan.bytes_per_sample * x * (1.0 + plan.weekly_growth * horizon);
          current += hour_bytes[static_cast<std::size_t>(h)];
        }
        ct.expected_gain_bytes[horizon] = predicted - current;
      }
      truth.cells.push_back(std::move(ct));
    }
    out.sites.push_back(std::move(recorded));
  }

  for (const auto& s : spec.swaps) {
    SwapTruth st;
    st.cell_a = s.cell_a;
    st.cell_b = s.cell_b;
    st.site_id = truth.cell(s.cell_a)->site_id;
    st.corrected_a_deg = truth.cell(s.cell_b)->recorded_azimuth_deg;
    st.corrected_b_deg = truth.cell(s.cell_a)->recorded_azimuth_deg;
    truth.swaps.push_back(st);
  }
  truth.dataset_digest = dataset_digest(out.samples, out.sites);
  return out;
}

void write_scenario_files(const GeneratedScenario& scenario, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir.string());
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("samples.csv");
    write_samples_csv(f, scenario.samples);
  }
  {
    auto f = open("sites.csv");
    write_sites_csv(f, scenario.sites);
  }
  auto f = open("truth.jsonl");
  write_ground_truth(f, scenario.truth);
}

namespace {

json optional_label(const std::optional<CauseLabel>& label) {
  return label ? json(std::string(to_string(*label))) : json(nullptr);
}

std::optional<CauseLabel> label_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  const auto s = j.get<std::string>();
  for (auto l : {CauseLabel::coverage, CauseLabel::interference_or_quality, CauseLabel::capacity_congestion,
                 CauseLabel::latency_path}) {
    if (to_string(l) == s) return l;
  }
  throw Error(ErrorCode::validation, "unknown cause label " + s);
}

}  // namespace

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
  json header{{"schema", "ranopt.ground_truth"},
              {"version", truth.version},
              {"scenario_id", truth.scenario_id},
              {"seed", truth.seed},
              {"dataset_digest", truth.dataset_digest},
              {"start", truth.start},
              {"days", truth.days},
              {"bytes_noise", truth.bytes_noise}};
  out << header.dump() << '\n';
  for (const auto& c : truth.cells) {
    json gains = json::object();
    for (const auto& [n, g] : c.expected_gain_bytes) gains[std::to_string(n)] = g;
    json j{{"record", "cell"},
           {"cell_id", c.cell_id},
           {"site_id", c.site_id},
           {"sector_id", c.sector_id},
           {"true_boresight_deg", c.true_boresight_deg},
           {"recorded_azimuth_deg", c.recorded_azimuth_deg},
           {"cloud_bearing_deg", c.cloud_bearing_deg},
           {"expected_azimuth_delta_deg", c.expected_azimuth_delta_deg},
           {"azimuth_checkable", c.azimuth_checkable},
           {"n_samples", c.n_samples},
           {"n_located", c.n_located},
           {"base_kbps", c.base_kbps},
           {"busy_depression", c.busy_depression},
           {"expected_congestion_pct", c.expected_congestion_pct},
           {"kbps_curve", std::string(to_string(c.curve))},
           {"kbps_per_db", c.kbps_per_db},
           {"saturation_scale_db", c.saturation_scale_db},
           {"rsrp_reference_dbm", c.rsrp_reference_dbm},
           {"knee_x0", c.knee_x0},
           {"knee_fraction", c.knee_fraction},
           {"expected_suppressed", c.expected_suppressed},
           {"expected_slope_ratio", c.expected_slope_ratio},
           {"weekly_growth", c.weekly_growth},
           {"expected_gain_bytes", gains},
           {"fault", optional_label(c.fault)},
           {"planted_worst_kbps", c.planted_worst_kbps}};
    out << j.dump() << '\n';
  }
  for (const auto& s : truth.sites) {
    json j{{"record", "site"},
           {"site_id", s.site_id},
           {"coordinate_error_m", s.coordinate_error_m},
           {"expected_strong_location_audit", s.expected_strong_location_audit}};
    out << j.dump() << '\n';
  }
  for (const auto& s : truth.swaps) {
    json j{{"record", "swap"},         {"site_id", s.site_id},
           {"cell_a", s.cell_a},       {"cell_b", s.cell_b},
           {"corrected_a_deg", s.corrected_a_deg}, {"corrected_b_deg", s.corrected_b_deg}};
    out << j.dump() << '\n';
  }
}

GroundTruth read_ground_truth(std::istream& in) {
  GroundTruth truth;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("schema", "") != "ranopt.ground_truth") {
          throw Error(ErrorCode::validation, "not a ground-truth file");
        }
        truth.version = j.at("version").get<int>();
        if (truth.version != kGroundTruthVersion) {
          throw Error(ErrorCode::validation, "unsupported ground-truth version " + std::to_string(truth.version));
        }
        truth.scenario_id = j.at("scenario_id").get<std::string>();
        truth.seed = j.at("seed").get<std::uint64_t>();
        truth.dataset_digest = j.at("dataset_digest").get<std::string>();
        truth.start = j.at("start").get<EpochSeconds>();
        truth.days = j.at("days").get<int>();
        truth.bytes_noise = j.at("bytes_noise").get<double>();
        have_header = true;
        continue;
      }
      const auto kind = j.at("record").get<std::string>();
      if (kind == "cell") {
        CellTruth c;
        c.cell_id = j.at("cell_id").get<std::string>();
        c.site_id = j.at("site_id").get<std::string>();
        c.sector_id = j.at("sector_id").get<int>();
        c.true_boresight_deg = j.at("true_boresight_deg").get<double>();
        c.recorded_azimuth_deg = j.at("recorded_azimuth_deg").get<double>();
        c.cloud_bearing_deg = j.at("cloud_bearing_deg").get<double>();
        c.expected_azimuth_delta_deg = j.at("expected_azimuth_delta_deg").get<double>();
        c.azimuth_checkable = j.at("azimuth_checkable").get<bool>();
        c.n_samples = j.at("n_samples").get<std::size_t>();
        c.n_located = j.at("n_located").get<std::size_t>();
        c.base_kbps = j.at("base_kbps").get<double>();
        c.busy_depression = j.at("busy_depression").get<double>();
        c.expected_congestion_pct = j.at("expected_congestion_pct").get<double>();
        c.curve = j.at("kbps_curve").get<std::string>() == "linear" ? KbpsCurve::linear : KbpsCurve::saturating;
        c.kbps_per_db = j.at("kbps_per_db").get<double>();
        c.saturation_scale_db = j.at("saturation_scale_db").get<double>();
        c.rsrp_reference_dbm = j.at("rsrp_reference_dbm").get<double>();
        c.knee_x0 = j.at("knee_x0").get<double>();
        c.knee_fraction = j.at("knee_fraction").get<double>();
        c.expected_suppressed = j.at("expected_suppressed").get<bool>();
        c.expected_slope_ratio = j.at("expected_slope_ratio").get<double>();
        c.weekly_growth = j.at("weekly_growth").get<double>();
        for (const auto& [k, v] : j.at("expected_gain_bytes").items()) {
          c.expected_gain_bytes[std::stoi(k)] = v.get<double>();
        }
        c.fault = label_from(j.at("fault"));
        c.planted_worst_kbps = j.at("planted_worst_kbps").get<bool>();
        truth.cells.push_back(std::move(c));
      } else if (kind == "site") {
        truth.sites.push_back({j.at("site_id").get<std::string>(), j.at("coordinate_error_m").get<double>(),
                               j.at("expected_strong_location_audit").get<bool>()});
      } else if (kind == "swap") {
        truth.swaps.push_back({j.at("site_id").get<std::string>(), j.at("cell_a").get<std::string>(),
                               j.at("cell_b").get<std::string>(), j.at("corrected_a_deg").get<double>(),
                               j.at("corrected_b_deg").get<double>()});
      } else {
        throw Error(ErrorCode::validation, "unknown record kind " + kind);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::validation, "ground truth line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header) throw Error(ErrorCode::validation, "ground-truth header missing");
  return truth;
}

GroundTruth read_ground_truth_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  return read_ground_truth(f);
}

bool Scorecard::all_passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const ScoreCheck& c) { return c.passed; });
}

namespace {

// Accumulates failing ids for a check's detail text.
struct Failures {
  std::vector<std::string> ids;
  void add(const std::string& id) { ids.push_back(id); }
  std::string text(std::size_t evaluated) const {
    if (ids.empty()) return std::to_string(evaluated) + " evaluated";
    std::string s = "failing:";
    for (const auto& id : ids) s += " " + id;
    return s;
  }
};

}  // namespace

Scorecard evaluate_engine(const GroundTruth& truth, const AnalysisSnapshot& snap) {
  if (!snap.dataset_digest.empty() && snap.dataset_digest != truth.dataset_digest) {
    throw Error(ErrorCode::scenario_mismatch,
                "engine output was produced from a different dataset than scenario " + truth.scenario_id);
  }
  Scorecard card;
  card.scenario_id = truth.scenario_id;
  const bool has_output = !snap.profiles.empty();

  // Congestion recovery.
  {
    ScoreCheck planted{"congestion_planted", true, 0.0, 2.0, {}};
    ScoreCheck zero{"congestion_unplanted", true, 0.0, 3.0, {}};
    Failures fp, fz;
    std::size_t np = 0, nz = 0;
    for (const auto& c : truth.cells) {
      const auto* p = snap.profile(c.cell_id);
      const auto ind = p ? p->congestion_indicator_pct : std::nullopt;
      if (c.busy_depression > 0.0) {
        ++np;
        const double err = ind ? std::abs(*ind - c.expected_congestion_pct) : INFINITY;
        planted.measured = std::max(planted.measured, err);
        if (!(err <= planted.tolerance)) fp.add(c.cell_id);
      } else {
        ++nz;
        const double v = ind ? *ind : INFINITY;
        zero.measured = std::max(zero.measured, v);
        if (!(v < zero.tolerance)) fz.add(c.cell_id);
      }
    }
    planted.passed = has_output && fp.ids.empty();
    zero.passed = has_output && fz.ids.empty();
    planted.detail = fp.text(np);
    zero.detail = fz.text(nz);
    card.checks.push_back(planted);
    card.checks.push_back(zero);
  }

  // Worst-speed detection.
  {
    std::set<std::string> expected, flagged;
    for (const auto& c : truth.cells) {
      if (c.planted_worst_kbps) expected.insert(c.cell_id);
    }
    for (const auto& a : snap.anomalies) {
      if (a.metric == Metric::app_kbps && a.rule.mode == RuleMode::worst_fraction) flagged.insert(a.cell_id);
    }
    std::vector<std::string> diff;
    std::set_symmetric_difference(expected.begin(), expected.end(), flagged.begin(), flagged.end(),
                                  std::back_inserter(diff));
    ScoreCheck check{"anomaly_worst_kbps", has_output && diff.empty() && !expected.empty(),
                     static_cast<double>(diff.size()), 0.0, {}};
    Failures f;
    for (const auto& d : diff) f.add(d);
    check.detail = f.text(expected.size());
    card.checks.push_back(check);
  }

  // Root-cause precision and recall on the planted fault set.
  {
    std::size_t tp = 0, fp = 0, faults = 0;
    Failures f;
    for (const auto& c : truth.cells) {
      if (!c.fault) continue;
      ++faults;
      const RootCauseReport* report = nullptr;
      for (const auto& r : snap.root_causes) {
        if (r.cell_id == c.cell_id && r.anomaly_metric == Metric::app_kbps) report = &r;
      }
      bool hit = false;
      if (report) {
        for (const auto& cause : report->causes) {
          if (cause.label == *c.fault) hit = true;
          else ++fp;
        }
      }
      if (hit) ++tp;
      if (!hit || (report && report->causes.size() > 1)) f.add(c.cell_id);
    }
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = faults > 0 ? static_cast<double>(tp) / static_cast<double>(faults) : 0.0;
    card.checks.push_back({"root_cause_precision", has_output && faults > 0 && precision == 1.0, precision, 1.0,
                           f.text(faults)});
    card.checks.push_back(
        {"root_cause_recall", has_output && faults > 0 && recall == 1.0, recall, 1.0, f.text(faults)});
  }

  // Azimuth recommendation accuracy.
  {
    ScoreCheck check{"azimuth_recommendation", true, 0.0, 5.0, {}};
    Failures f;
    std::size_t n = 0;
    for (const auto& c : truth.cells) {
      if (!c.azimuth_checkable || c.n_located < 500) continue;
      ++n;
      const auto* rec = snap.recommendation(c.cell_id);
      const double err = rec ? std::abs(geo::azimuth_delta(c.cloud_bearing_deg, rec->recommended_azimuth_deg))
                             : INFINITY;
      check.measured = std::max(check.measured, err);
      if (!(err <= check.tolerance)) f.add(c.cell_id);
    }
    check.passed = has_output && n > 0 && f.ids.empty();
    check.detail = f.text(n);
    card.checks.push_back(check);
  }

  // Sector swaps.
  {
    auto pair_key = [](std::string a, std::string b) {
      if (b < a) std::swap(a, b);
      return a + "|" + b;
    };
    std::set<std::string> planted;
    Failures missing;
    for (const auto& s : truth.swaps) {
      planted.insert(pair_key(s.cell_a, s.cell_b));
      bool found = false;
      for (const auto& audit : snap.audits) {
        if (audit.kind != AuditKind::sector_swap_suspect || audit.evidence.size() != 2) continue;
        std::map<std::string, std::optional<double>> corrected;
        for (const auto& e : audit.evidence) corrected[e.cell_id] = e.corrected_azimuth_deg;
        auto close = [](const std::optional<double>& v, double want) {
          return v && std::abs(geo::wrap_delta_deg(*v - want)) < 1e-6;
        };
        if (corrected.count(s.cell_a) && corrected.count(s.cell_b) && close(corrected[s.cell_a], s.corrected_a_deg) &&
            close(corrected[s.cell_b], s.corrected_b_deg)) {
          found = true;
        }
      }
      if (!found) missing.add(s.cell_a + "/" + s.cell_b);
    }
    card.checks.push_back({"swap_flagged", has_output && !truth.swaps.empty() && missing.ids.empty(),
                           static_cast<double>(missing.ids.size()), 0.0, missing.text(truth.swaps.size())});

    Failures extra;
    for (const auto& audit : snap.audits) {
      if (audit.kind != AuditKind::sector_swap_suspect || audit.evidence.size() != 2) continue;
      const auto key = pair_key(audit.evidence[0].cell_id, audit.evidence[1].cell_id);
      if (!planted.contains(key)) extra.add(key);
    }
    card.checks.push_back({"no_false_swaps", has_output && !snap.recommendations.empty() && extra.ids.empty(),
                           static_cast<double>(extra.ids.size()), 0.0, extra.text(snap.audits.size())});
  }

  // Site-location audits.
  {
    Failures f;
    for (const auto& s : truth.sites) {
      bool strong = false;
      for (const auto& audit : snap.audits) {
        if (audit.kind == AuditKind::site_location_suspect && audit.site_id == s.site_id &&
            audit.strength == AuditStrength::strong) {
          strong = true;
        }
      }
      if (strong != s.expected_strong_location_audit) f.add(s.site_id);
    }
    card.checks.push_back({"site_location_audit", has_output && !snap.geo.empty() && f.ids.empty(),
                           static_cast<double>(f.ids.size()), 0.0, f.text(truth.sites.size())});
  }

  // Suppressed demand.
  {
    ScoreCheck knee{"suppression_knee", true, 0.0, 0.1, {}};
    Failures fk, fl;
    std::size_t nk = 0, nl = 0, false_pos = 0;
    for (const auto& c : truth.cells) {
      const auto* plan = snap.planning_for(c.cell_id);
      const auto& s = plan ? plan->suppression : SuppressionModel{};
      if (c.expected_suppressed) {
        ++nk;
        const double err =
            plan && s.slope_ratio ? std::abs(*s.slope_ratio - c.expected_slope_ratio) : INFINITY;
        knee.measured = std::max(knee.measured, err);
        if (!(plan && s.suppressed.value_or(false) && err <= knee.tolerance)) fk.add(c.cell_id);
      } else if (c.knee_fraction == 1.0) {
        ++nl;
        if (!plan || s.suppressed.value_or(true)) {
          ++false_pos;
          fl.add(c.cell_id);
        }
      }
    }
    knee.passed = has_output && nk > 0 && fk.ids.empty();
    knee.detail = fk.text(nk);
    card.checks.push_back(knee);
    const double fpr = nl > 0 ? static_cast<double>(false_pos) / static_cast<double>(nl) : 1.0;
    const double bound = truth.bytes_noise > 0.0 ? 0.05 : 0.0;
    card.checks.push_back({"suppression_linear_fpr", has_output && nl > 0 && fpr <= bound, fpr, bound, fl.text(nl)});
  }

  // Local slopes of speed against rsrp.
  {
    ScoreCheck check{"sensitivity_slopes", true, 0.0, 0.15, {}};
    Failures f;
    std::size_t slopes = 0;
    for (const auto& c : truth.cells) {
      const auto* m = snap.model(c.cell_id, Metric::rsrp_dbm, Metric::app_kbps);
      if (!m) continue;
      const double tol = c.curve == KbpsCurve::linear ? 0.15 : 0.20;
      bool bad = false;
      for (const auto& bin : m->bins) {
        if (!bin.slope) continue;
        ++slopes;
        const double want = c.expected_slope(bin.x_median);
        const double rel = std::abs(*bin.slope - want) / std::abs(want);
        check.measured = std::max(check.measured, rel);
        if (!(rel <= tol)) bad = true;
      }
      if (bad) f.add(c.cell_id);
    }
    check.passed = has_output && slopes > 0 && f.ids.empty();
    check.detail = f.text(slopes);
    card.checks.push_back(check);
  }
  return card;
}

}  // namespace ranopt
