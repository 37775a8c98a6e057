// SPDX-License-Identifier: Apache-2.0
//
// WGS84 local tangent plane (east/north) conversions and angle arithmetic.

#pragma once

#include "ranopt/types.hpp"

namespace ranopt::geo {

struct Enu {
  double east = 0.0;   // meters
  double north = 0.0;  // meters
};

/// Horizontal position of `p` in the tangent plane at `origin` (heights zero).
Enu to_local(const GeoPoint& origin, const GeoPoint& p);

/// Inverse of to_local for a point lying in the tangent plane at `origin`.
GeoPoint from_local(const GeoPoint& origin, const Enu& enu);

/// Bearing of an east/north offset, degrees clockwise from north in [0, 360).
double bearing_deg(const Enu& enu);
double horizontal_distance_m(const Enu& enu);

/// Normalizes to [0, 360).
double normalize_deg(double deg);

/// Wraps an angle difference to (-180, 180].
double wrap_delta_deg(double deg);

/// Angles handled in integer micro-degrees so that
/// apply_azimuth_delta(a, azimuth_delta(a, b)) == normalize(b) bit-for-bit.
double quantize_azimuth(double deg);
double azimuth_delta(double from_deg, double to_deg);
double apply_azimuth_delta(double from_deg, double delta_deg);

}  // namespace ranopt::geo
