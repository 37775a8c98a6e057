// SPDX-License-Identifier: Apache-2.0

#include "ranopt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "ranopt/error.hpp"

namespace ranopt {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::validation, "config " + path + ": " + what);
}

// Reads typed members of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_, "expected an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) bad(path_ + "." + key, "unknown key");
    }
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (const auto* v = get(key)) {
      if (!v->is_number()) bad(path(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const auto* v = get(key)) {
      if (!v->is_number_integer()) bad(path(key), "expected an integer");
      const auto x = v->get<std::int64_t>();
      if constexpr (std::is_unsigned_v<Int>) {
        if (x < 0) bad(path(key), "must be non-negative");
      }
      out = static_cast<Int>(x);
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const auto* v = get(key)) {
      if (!v->is_boolean()) bad(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void metric(const std::string& key, Metric& out) {
    if (const auto* v = get(key)) {
      if (!v->is_string()) bad(path(key), "expected a metric name");
      auto m = metric_from_string(v->get<std::string>());
      if (!m) bad(path(key), "unknown metric " + v->get<std::string>());
      out = *m;
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_sensitivity(const json& j, const std::string& path, SensitivityParams& p) {
  Section s(j, path);
  s.number("bin_width", p.bin_width);
  s.integer("min_total", p.min_total);
  s.integer("min_bin_samples", p.min_bin_samples);
  s.integer("window_half_bins", p.window_half_bins);
  s.integer("min_window_bins", p.min_window_bins);
  s.integer("min_window_points", p.min_window_points);
  if (!(p.bin_width > 0.0)) bad(path + ".bin_width", "must be positive");
}

AnomalyRule read_rule(const json& j, const std::string& path) {
  Section s(j, path);
  AnomalyRule rule;
  s.metric("metric", rule.metric);
  rule.direction = bad_direction(rule.metric);
  if (const auto* v = s.get("direction")) {
    const auto d = v->is_string() ? v->get<std::string>() : "";
    if (d == "low_is_bad") rule.direction = Direction::low_is_bad;
    else if (d == "high_is_bad") rule.direction = Direction::high_is_bad;
    else bad(s.path("direction"), "expected low_is_bad or high_is_bad");
  }
  if (const auto* v = s.get("mode")) {
    const auto m = v->is_string() ? v->get<std::string>() : "";
    if (m == "worst_fraction") rule.mode = RuleMode::worst_fraction;
    else if (m == "absolute_threshold") rule.mode = RuleMode::absolute_threshold;
    else if (m == "relative_degradation") rule.mode = RuleMode::relative_degradation;
    else bad(s.path("mode"), "unknown rule mode");
  }
  s.number("m_pct", rule.m_pct);
  s.number("threshold", rule.threshold);
  if (rule.mode == RuleMode::worst_fraction && !(rule.m_pct > 0.0 && rule.m_pct <= 100.0)) {
    bad(s.path("m_pct"), "must be in (0, 100]");
  }
  return rule;
}

std::string_view mode_name(RuleMode m) {
  switch (m) {
    case RuleMode::worst_fraction: return "worst_fraction";
    case RuleMode::absolute_threshold: return "absolute_threshold";
    case RuleMode::relative_degradation: return "relative_degradation";
  }
  return "worst_fraction";
}

json sensitivity_json(const SensitivityParams& p) {
  return {{"bin_width", p.bin_width},
          {"min_total", p.min_total},
          {"min_bin_samples", p.min_bin_samples},
          {"window_half_bins", p.window_half_bins},
          {"min_window_bins", p.min_window_bins},
          {"min_window_points", p.min_window_points}};
}

}  // namespace

EngineConfig apply_config_json(std::string_view json_text, EngineConfig c) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::validation, std::string("config is not valid JSON: ") + e.what());
  }
  Section s(root, "$");
  if (const auto* j = s.get("busy_hours")) {
    Section b(*j, "$.busy_hours");
    b.integer("min_days", c.busy_hours.min_days);
  }
  if (const auto* j = s.get("profile")) {
    Section b(*j, "$.profile");
    b.integer("min_class_samples", c.profile.min_class_samples);
  }
  if (const auto* j = s.get("anomaly_rules")) {
    if (!j->is_array()) bad("$.anomaly_rules", "expected an array");
    c.anomaly_rules.clear();
    for (std::size_t i = 0; i < j->size(); ++i) {
      c.anomaly_rules.push_back(read_rule((*j)[i], "$.anomaly_rules[" + std::to_string(i) + "]"));
    }
  }
  if (const auto* j = s.get("root_cause")) {
    Section b(*j, "$.root_cause");
    b.number("n_pct", c.root_cause.n_pct);
    if (const auto* v = b.get("candidates")) {
      if (!v->is_array()) bad("$.root_cause.candidates", "expected an array");
      c.root_cause.candidates.clear();
      for (const auto& name : *v) {
        auto m = name.is_string() ? metric_from_string(name.get<std::string>()) : std::nullopt;
        if (!m) bad("$.root_cause.candidates", "unknown metric " + name.dump());
        c.root_cause.candidates.push_back(*m);
      }
    }
  }
  if (const auto* j = s.get("sensitivity")) {
    Section b(*j, "$.sensitivity");
    if (const auto* v = b.get("rsrp")) read_sensitivity(*v, "$.sensitivity.rsrp", c.rsrp_sensitivity);
    if (const auto* v = b.get("rsrq")) read_sensitivity(*v, "$.sensitivity.rsrq", c.rsrq_sensitivity);
  }
  if (const auto* j = s.get("geo")) {
    Section b(*j, "$.geo");
    b.integer("min_geo_samples", c.geo.min_geo_samples);
    b.boolean("weight_by_bytes", c.geo.weight_by_bytes);
  }
  s.number("site_distance_threshold_m", c.site_distance_threshold_m);
  if (const auto* j = s.get("swap")) {
    Section b(*j, "$.swap");
    b.number("min_abs_deg", c.swap.min_abs_deg);
    b.number("sym_tol_deg", c.swap.sym_tol_deg);
    b.boolean("skip_low_confidence", c.swap.skip_low_confidence);
  }
  if (const auto* j = s.get("antenna")) {
    Section b(*j, "$.antenna");
    b.number("beamwidth_3db_deg", c.antenna.beamwidth_3db_deg);
    b.number("max_attenuation_db", c.antenna.max_attenuation_db);
    if (!(c.antenna.beamwidth_3db_deg > 0.0)) bad("$.antenna.beamwidth_3db_deg", "must be positive");
  }
  if (const auto* j = s.get("optimization")) {
    Section b(*j, "$.optimization");
    b.integer("k", c.optimization.k);
    b.number("cooldown_days", c.optimization.cooldown_days);
    b.number("badness_weight", c.optimization.weights.badness);
    b.number("sensitivity_weight", c.optimization.weights.sensitivity);
    b.metric("y_metric", c.optimization.weights.y_metric);
    b.metric("x_metric", c.optimization.weights.x_metric);
  }
  if (const auto* j = s.get("demand")) {
    Section b(*j, "$.demand");
    b.number("split_quantile", c.demand.split_quantile);
    b.integer("min_points_per_regime", c.demand.min_points_per_regime);
    b.number("bend_ratio", c.demand.bend_ratio);
    if (!(c.demand.split_quantile > 0.0 && c.demand.split_quantile < 1.0)) {
      bad("$.demand.split_quantile", "must be in (0, 1)");
    }
  }
  if (const auto* j = s.get("densification")) {
    Section b(*j, "$.densification");
    b.integer("min_points", c.densification.min_points);
    b.integer("bins", c.densification.bins);
    b.integer("min_bin_points", c.densification.min_bin_points);
  }
  if (const auto* j = s.get("planning")) {
    Section b(*j, "$.planning");
    if (const auto* v = b.get("horizons_weeks")) {
      if (!v->is_array() || v->empty()) bad("$.planning.horizons_weeks", "expected a non-empty array");
      c.horizons_weeks.clear();
      for (const auto& n : *v) {
        if (!n.is_number_integer() || n.get<int>() < 0) bad("$.planning.horizons_weeks", "expected non-negative integers");
        c.horizons_weeks.push_back(n.get<int>());
      }
    }
    b.number("exhaustion_threshold_pct", c.exhaustion_threshold_pct);
    b.integer("exhaustion_max_weeks", c.exhaustion_max_weeks);
    if (const auto* v = b.get("budget_limit")) {
      if (v->is_null()) c.planning_budget.reset();
      else if (v->is_number_integer() && v->get<std::int64_t>() >= 0) c.planning_budget = v->get<std::size_t>();
      else bad("$.planning.budget_limit", "expected a non-negative integer or null");
    }
  }
  return c;
}

EngineConfig load_config_file(const std::filesystem::path& path, EngineConfig base) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io_error, "cannot read config " + path.string());
  std::ostringstream text;
  text << f.rdbuf();
  return apply_config_json(text.str(), std::move(base));
}

std::string config_to_json(const EngineConfig& c) {
  json rules = json::array();
  for (const auto& r : c.anomaly_rules) {
    rules.push_back({{"metric", std::string(to_string(r.metric))},
                     {"direction", r.direction == Direction::low_is_bad ? "low_is_bad" : "high_is_bad"},
                     {"mode", std::string(mode_name(r.mode))},
                     {"m_pct", r.m_pct},
                     {"threshold", r.threshold}});
  }
  json candidates = json::array();
  for (auto m : c.root_cause.candidates) candidates.push_back(std::string(to_string(m)));
  json j{
      {"busy_hours", {{"min_days", c.busy_hours.min_days}}},
      {"profile", {{"min_class_samples", c.profile.min_class_samples}}},
      {"anomaly_rules", rules},
      {"root_cause", {{"n_pct", c.root_cause.n_pct}, {"candidates", candidates}}},
      {"sensitivity", {{"rsrp", sensitivity_json(c.rsrp_sensitivity)}, {"rsrq", sensitivity_json(c.rsrq_sensitivity)}}},
      {"geo", {{"min_geo_samples", c.geo.min_geo_samples}, {"weight_by_bytes", c.geo.weight_by_bytes}}},
      {"site_distance_threshold_m", c.site_distance_threshold_m},
      {"swap",
       {{"min_abs_deg", c.swap.min_abs_deg},
        {"sym_tol_deg", c.swap.sym_tol_deg},
        {"skip_low_confidence", c.swap.skip_low_confidence}}},
      {"antenna",
       {{"beamwidth_3db_deg", c.antenna.beamwidth_3db_deg}, {"max_attenuation_db", c.antenna.max_attenuation_db}}},
      {"optimization",
       {{"k", c.optimization.k},
        {"cooldown_days", c.optimization.cooldown_days},
        {"badness_weight", c.optimization.weights.badness},
        {"sensitivity_weight", c.optimization.weights.sensitivity},
        {"y_metric", std::string(to_string(c.optimization.weights.y_metric))},
        {"x_metric", std::string(to_string(c.optimization.weights.x_metric))}}},
      {"demand",
       {{"split_quantile", c.demand.split_quantile},
        {"min_points_per_regime", c.demand.min_points_per_regime},
        {"bend_ratio", c.demand.bend_ratio}}},
      {"densification",
       {{"min_points", c.densification.min_points},
        {"bins", c.densification.bins},
        {"min_bin_points", c.densification.min_bin_points}}},
      {"planning",
       {{"horizons_weeks", c.horizons_weeks},
        {"exhaustion_threshold_pct", c.exhaustion_threshold_pct},
        {"exhaustion_max_weeks", c.exhaustion_max_weeks},
        {"budget_limit", c.planning_budget ? json(*c.planning_budget) : json(nullptr)}}},
  };
  return j.dump(2);
}

}  // namespace ranopt
