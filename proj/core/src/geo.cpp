// SPDX-License-Identifier: Apache-2.0

#include "ranopt/geo.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ranopt::geo {

namespace {

constexpr double kA = 6378137.0;                 // WGS84 semi-major axis
constexpr double kF = 1.0 / 298.257223563;       // flattening
constexpr double kE2 = kF * (2.0 - kF);          // first eccentricity squared
constexpr double kDeg = std::numbers::pi / 180.0;

struct Ecef {
  double x, y, z;
};

Ecef to_ecef(const GeoPoint& p) {
  const double lat = p.lat * kDeg, lon = p.lon * kDeg;
  const double sl = std::sin(lat), cl = std::cos(lat);
  const double n = kA / std::sqrt(1.0 - kE2 * sl * sl);
  return {n * cl * std::cos(lon), n * cl * std::sin(lon), n * (1.0 - kE2) * sl};
}

GeoPoint from_ecef(const Ecef& e) {
  const double lon = std::atan2(e.y, e.x);
  const double p = std::hypot(e.x, e.y);
  double lat = std::atan2(e.z, p * (1.0 - kE2));
  for (int i = 0; i < 8; ++i) {
    const double sl = std::sin(lat);
    const double n = kA / std::sqrt(1.0 - kE2 * sl * sl);
    const double h = p / std::cos(lat) - n;
    lat = std::atan2(e.z, p * (1.0 - kE2 * n / (n + h)));
  }
  return {lat / kDeg, lon / kDeg};
}

constexpr std::int64_t kMicro = 1'000'000;
constexpr std::int64_t kFullTurn = 360 * kMicro;
constexpr std::int64_t kHalfTurn = 180 * kMicro;

std::int64_t to_micro(double deg) {
  std::int64_t v = std::llround(deg * static_cast<double>(kMicro)) % kFullTurn;
  if (v < 0) v += kFullTurn;
  return v;
}

}  // namespace

Enu to_local(const GeoPoint& origin, const GeoPoint& p) {
  const Ecef o = to_ecef(origin), q = to_ecef(p);
  const double dx = q.x - o.x, dy = q.y - o.y, dz = q.z - o.z;
  const double lat = origin.lat * kDeg, lon = origin.lon * kDeg;
  const double sl = std::sin(lat), cl = std::cos(lat), so = std::sin(lon), co = std::cos(lon);
  return {-so * dx + co * dy, -sl * co * dx - sl * so * dy + cl * dz};
}

GeoPoint from_local(const GeoPoint& origin, const Enu& enu) {
  const Ecef o = to_ecef(origin);
  const double lat = origin.lat * kDeg, lon = origin.lon * kDeg;
  const double sl = std::sin(lat), cl = std::cos(lat), so = std::sin(lon), co = std::cos(lon);
  // Dropping to the surface shifts the horizontal components slightly; correct
  // the target until to_local reproduces the requested offset.
  double e = enu.east, n = enu.north;
  GeoPoint p;
  for (int i = 0; i < 6; ++i) {
    p = from_ecef({o.x - so * e - sl * co * n, o.y + co * e - sl * so * n, o.z + cl * n});
    const Enu got = to_local(origin, p);
    const double de = enu.east - got.east, dn = enu.north - got.north;
    if (std::abs(de) < 1e-9 && std::abs(dn) < 1e-9) break;
    e += de;
    n += dn;
  }
  return p;
}

double bearing_deg(const Enu& enu) {
  if (enu.east == 0.0 && enu.north == 0.0) return 0.0;
  return normalize_deg(std::atan2(enu.east, enu.north) / kDeg);
}

double horizontal_distance_m(const Enu& enu) { return std::hypot(enu.east, enu.north); }

double normalize_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

double wrap_delta_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r > 180.0) r -= 360.0;
  if (r <= -180.0) r += 360.0;
  return r;
}

double quantize_azimuth(double deg) {
  return static_cast<double>(to_micro(deg)) / static_cast<double>(kMicro);
}

double azimuth_delta(double from_deg, double to_deg) {
  std::int64_t d = (to_micro(to_deg) - to_micro(from_deg)) % kFullTurn;
  if (d > kHalfTurn) d -= kFullTurn;
  if (d <= -kHalfTurn) d += kFullTurn;
  return static_cast<double>(d) / static_cast<double>(kMicro);
}

double apply_azimuth_delta(double from_deg, double delta_deg) {
  std::int64_t v = (to_micro(from_deg) + std::llround(delta_deg * static_cast<double>(kMicro))) % kFullTurn;
  if (v < 0) v += kFullTurn;
  return static_cast<double>(v) / static_cast<double>(kMicro);
}

}  // namespace ranopt::geo
