// SPDX-License-Identifier: Apache-2.0

#include "ranopt/detection.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ranopt/error.hpp"
#include "ranopt/sensitivity.hpp"
#include "text.hpp"

namespace ranopt {

namespace {

struct Ranked {
  double value;
  std::string cell_id;
};

bool in_scope(const CellScope& scope, const std::string& cell_id) {
  return scope.empty() || scope.contains(cell_id);
}

// Worst-first ordering of the in-scope cells that carry the metric.
std::vector<Ranked> worst_first(std::span<const CellProfile> profiles, Metric metric, Direction dir,
                                const CellScope& scope) {
  std::vector<Ranked> ranked;
  for (const auto& p : profiles) {
    if (!in_scope(scope, p.cell_id)) continue;
    if (auto v = p.metric(metric)) ranked.push_back({*v, p.cell_id});
  }
  std::sort(ranked.begin(), ranked.end(), [dir](const Ranked& a, const Ranked& b) {
    if (a.value != b.value) return dir == Direction::low_is_bad ? a.value < b.value : a.value > b.value;
    return a.cell_id < b.cell_id;
  });
  return ranked;
}

// ceil(pct/100 * n) with a small guard so 5% of 60 is 3, not 4.
std::size_t fraction_count(double pct, std::size_t n) {
  const double raw = pct / 100.0 * static_cast<double>(n);
  const double k = std::ceil(raw - 1e-9 * std::max(1.0, raw));
  return std::min(n, static_cast<std::size_t>(std::max(0.0, k)));
}

double percentile_of(std::size_t index, std::size_t n) {
  return n == 0 ? 0.0 : 100.0 * static_cast<double>(index) / static_cast<double>(n);
}

}  // namespace

Direction bad_direction(Metric metric) {
  switch (metric) {
    case Metric::rtt_ms:
    case Metric::congestion_pct: return Direction::high_is_bad;
    default: return Direction::low_is_bad;
  }
}

std::string AnomalyRule::describe() const {
  std::string out(to_string(metric));
  switch (mode) {
    case RuleMode::worst_fraction: out += ":worst_fraction:" + text::format_shortest(m_pct); break;
    case RuleMode::absolute_threshold: out += ":threshold:" + text::format_shortest(threshold); break;
    case RuleMode::relative_degradation: out += ":degradation:" + text::format_shortest(threshold); break;
  }
  out += direction == Direction::low_is_bad ? ":low_is_bad" : ":high_is_bad";
  return out;
}

std::vector<AnomalyReport> detect_anomalies(std::span<const CellProfile> profiles,
                                            std::span<const AnomalyRule> rules, const CellScope& scope) {
  std::vector<AnomalyReport> reports;
  for (const auto& rule : rules) {
    if (rule.mode == RuleMode::worst_fraction && !(rule.m_pct > 0.0 && rule.m_pct <= 100.0)) {
      throw Error(ErrorCode::invalid_argument, "worst_fraction rule needs 0 < M <= 100");
    }
    if (rule.mode == RuleMode::relative_degradation) {
      throw Error(ErrorCode::invalid_argument, "degradation rules need two profile sets");
    }
    const auto ranked = worst_first(profiles, rule.metric, rule.direction, scope);
    const std::size_t n = ranked.size();
    for (std::size_t i = 0; i < n; ++i) {
      bool flagged = false;
      if (rule.mode == RuleMode::worst_fraction) {
        flagged = i < fraction_count(rule.m_pct, n);
      } else {
        flagged = rule.direction == Direction::low_is_bad ? ranked[i].value < rule.threshold
                                                          : ranked[i].value > rule.threshold;
      }
      if (flagged) {
        reports.push_back({ranked[i].cell_id, rule.metric, ranked[i].value, rule, percentile_of(i, n)});
      }
    }
  }
  return reports;
}

std::vector<AnomalyReport> detect_degradations(std::span<const CellProfile> previous,
                                               std::span<const CellProfile> current,
                                               const AnomalyRule& rule, const CellScope& scope) {
  std::unordered_map<std::string, double> before;
  for (const auto& p : previous) {
    if (auto v = p.metric(rule.metric)) before.emplace(p.cell_id, *v);
  }
  std::vector<Ranked> drops;  // relative worsening, positive = worse
  std::unordered_map<std::string, double> observed;
  for (const auto& p : current) {
    if (!in_scope(scope, p.cell_id)) continue;
    auto v = p.metric(rule.metric);
    auto it = before.find(p.cell_id);
    if (!v || it == before.end() || it->second == 0.0) continue;
    const double change = (*v - it->second) / std::abs(it->second);
    drops.push_back({rule.direction == Direction::low_is_bad ? -change : change, p.cell_id});
    observed.emplace(p.cell_id, *v);
  }
  std::sort(drops.begin(), drops.end(), [](const Ranked& a, const Ranked& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.cell_id < b.cell_id;
  });
  std::vector<AnomalyReport> reports;
  AnomalyRule r = rule;
  r.mode = RuleMode::relative_degradation;
  for (std::size_t i = 0; i < drops.size(); ++i) {
    if (drops[i].value > rule.threshold) {
      reports.push_back({drops[i].cell_id, rule.metric, observed[drops[i].cell_id], r,
                         percentile_of(i, drops.size())});
    }
  }
  return reports;
}

std::string_view to_string(CauseLabel label) {
  switch (label) {
    case CauseLabel::coverage: return "coverage";
    case CauseLabel::interference_or_quality: return "interference_or_quality";
    case CauseLabel::capacity_congestion: return "capacity_congestion";
    case CauseLabel::latency_path: return "latency_path";
  }
  return "unknown";
}

std::optional<CauseLabel> cause_for(Metric evidence_metric) {
  switch (evidence_metric) {
    case Metric::rsrp_dbm: return CauseLabel::coverage;
    case Metric::rsrq_db: return CauseLabel::interference_or_quality;
    case Metric::congestion_pct: return CauseLabel::capacity_congestion;
    case Metric::rtt_ms: return CauseLabel::latency_path;
    default: return std::nullopt;
  }
}

RootCauseReport root_cause(const AnomalyReport& anomaly, std::span<const CellProfile> profiles,
                           const RootCauseParams& params, const CellModels& models,
                           const CellScope& scope) {
  if (anomaly.rule.mode == RuleMode::worst_fraction && params.n_pct < anomaly.rule.m_pct) {
    throw Error(ErrorCode::invalid_argument, "N must not be smaller than M");
  }
  RootCauseReport report;
  report.cell_id = anomaly.cell_id;
  report.anomaly_metric = anomaly.metric;
  report.n_pct = params.n_pct;

  const CellProfile* own = nullptr;
  for (const auto& p : profiles) {
    if (p.cell_id == anomaly.cell_id) own = &p;
  }

  for (Metric candidate : params.candidates) {
    if (candidate == anomaly.metric) continue;
    const auto label = cause_for(candidate);
    if (!label) continue;
    const auto ranked = worst_first(profiles, candidate, bad_direction(candidate), scope);
    const std::size_t k = fraction_count(params.n_pct, ranked.size());
    for (std::size_t i = 0; i < k; ++i) {
      if (ranked[i].cell_id != anomaly.cell_id) continue;
      Cause cause{*label, candidate, percentile_of(i, ranked.size()), std::nullopt};
      if (auto it = models.find(candidate); it != models.end() && it->second && own) {
        if (auto x = own->metric(candidate)) cause.slope = local_slope(*it->second, *x);
      }
      report.causes.push_back(cause);
      break;
    }
  }
  report.causes = rank_causes(std::move(report.causes));
  return report;
}

std::vector<Cause> rank_causes(std::vector<Cause> causes) {
  std::stable_sort(causes.begin(), causes.end(), [](const Cause& a, const Cause& b) {
    if (a.slope.has_value() != b.slope.has_value()) return a.slope.has_value();
    if (a.slope && b.slope && std::abs(*a.slope) != std::abs(*b.slope)) {
      return std::abs(*a.slope) > std::abs(*b.slope);
    }
    return a.percentile < b.percentile;
  });
  return causes;
}

}  // namespace ranopt
