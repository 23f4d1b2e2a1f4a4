#pragma once

#include <cmath>
#include <numbers>

namespace stinsim {

inline constexpr double kSpeedOfLightKmPerS = 299792.458;
inline constexpr double kDefaultEarthRadiusKm = 6371.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

// dBm <-> mW share the same mapping; the aliases keep call sites readable.
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace stinsim
