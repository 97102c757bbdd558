#pragma once

#include <cmath>

namespace sdbp {

// Physical constants (SI).
inline constexpr double kSpeedOfLight = 299792458.0;      // m/s
inline constexpr double kPlanck = 6.62607015e-34;         // J s

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

// Fiber attenuation: dB/km -> power attenuation coefficient in 1/m.
inline double attenuation_db_km_to_per_m(double db_per_km) {
  return db_per_km * std::log(10.0) / 10.0 / 1e3;
}

// Dispersion D [ps/(nm km)] at wavelength [nm] -> beta2 [s^2/m].
inline double beta2_from_dispersion(double d_ps_nm_km, double wavelength_nm) {
  const double d_si = d_ps_nm_km * 1e-6;  // s/m^2
  const double lambda_m = wavelength_nm * 1e-9;
  return -d_si * lambda_m * lambda_m / (2.0 * M_PI * kSpeedOfLight);
}

// Photon energy h*nu at the carrier wavelength [nm] -> J.
inline double photon_energy(double wavelength_nm) {
  return kPlanck * kSpeedOfLight / (wavelength_nm * 1e-9);
}

}  // namespace sdbp
