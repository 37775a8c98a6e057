// SPDX-License-Identifier: Apache-2.0
//
// Small numerical kernels shared by the analytics modules.

#pragma once

#include <optional>
#include <span>
#include <vector>

namespace ranopt::stats {

/// Median; the mean of the two middle values for even counts. Empty input gives nullopt.
std::optional<double> median(std::span<const double> values);

/// Linear-interpolation quantile (the "type 7" definition), q in [0, 1].
std::optional<double> quantile(std::span<const double> values, double q);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  double slope_std_error = 0.0;  // 0 when fewer than three points
  std::size_t n = 0;
};

/// Ordinary least squares y = a + b x. Needs two distinct x values.
std::optional<LineFit> ols(std::span<const double> x, std::span<const double> y);

/// Weighted least squares; weights must be non-negative with positive sum.
std::optional<LineFit> weighted_least_squares(std::span<const double> x, std::span<const double> y,
                                              std::span<const double> w);

/// Weighted isotonic regression under a non-increasing constraint
/// (pool adjacent violators). Output has one fitted value per input.
std::vector<double> pav_non_increasing(std::span<const double> y, std::span<const double> w);

/// Arithmetic mean; nullopt for empty input.
std::optional<double> mean(std::span<const double> values);

}  // namespace ranopt::stats
