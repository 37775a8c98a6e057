// SPDX-License-Identifier: Apache-2.0

#include "ranopt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ranopt::stats {

std::optional<double> median(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2.0;
}

std::optional<double> quantile(std::span<const double> values, double q) {
  if (values.empty()) return std::nullopt;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  q = std::clamp(q, 0.0, 1.0);
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return v[lo];
  return v[lo] + frac * (v[hi] - v[lo]);
}

std::optional<double> mean(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::optional<LineFit> weighted_least_squares(std::span<const double> x, std::span<const double> y,
                                              std::span<const double> w) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || w.size() != n) return std::nullopt;
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  if (!(sw > 0)) return std::nullopt;
  const double mx = sx / sw;
  const double my = sy / sw;
  // Centered sums keep the normal equations well conditioned for dBm-scale x.
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += w[i] * dx * dx;
    sxy += w[i] * dx * dy;
    syy += w[i] * dy * dy;
  }
  if (!(sxx > 0)) return std::nullopt;
  LineFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += w[i] * r * r;
  }
  fit.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
  if (n > 2) {
    // Normalized weights: the usual OLS formula when all weights are one.
    const double scale = static_cast<double>(n) / sw;
    fit.slope_std_error = std::sqrt(sse * scale / static_cast<double>(n - 2) / (sxx * scale));
  }
  return fit;
}

std::optional<LineFit> ols(std::span<const double> x, std::span<const double> y) {
  std::vector<double> w(x.size(), 1.0);
  return weighted_least_squares(x, y, w);
}

std::vector<double> pav_non_increasing(std::span<const double> y, std::span<const double> w) {
  struct Block {
    double value;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], w[i], 1});
    // Merge while the tail violates value[k-1] >= value[k].
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].value < blocks.back().value) {
      Block right = blocks.back();
      blocks.pop_back();
      Block& left = blocks.back();
      const double total = left.weight + right.weight;
      left.value = total > 0 ? (left.value * left.weight + right.value * right.weight) / total
                             : (left.value + right.value) / 2.0;
      left.weight = total;
      left.count += right.count;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.value);
  return out;
}

}  // namespace ranopt::stats
