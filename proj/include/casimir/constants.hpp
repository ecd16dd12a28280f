#pragma once

namespace casimir {

// CODATA 2018 values, fixed for reproducible output.
inline constexpr double hbar       = 1.054571817e-34;   // J s
inline constexpr double c_light    = 2.99792458e8;      // m/s
inline constexpr double eps0       = 8.8541878128e-12;  // F/m
inline constexpr double e_charge   = 1.602176634e-19;   // C
inline constexpr double m_electron = 9.1093837015e-31;  // kg

inline constexpr double pi = 3.14159265358979323846;

// Optical-table frequency unit: 1 eV in rad/s.
inline constexpr double eV_to_rad_s = 1.519e15;

inline constexpr double nm = 1e-9;   // m
inline constexpr double pN = 1e-12;  // N

} // namespace casimir
