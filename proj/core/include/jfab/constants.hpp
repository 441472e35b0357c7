#pragma once

// CODATA 2018 exact values. All physical constants used anywhere in the
// library live here so unit conversions stay consistent.

namespace jfab::constants {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kElementaryChargeC = 1.602176634e-19;   // C
inline constexpr double kPlanckJs = 6.62607015e-34;             // J*s
inline constexpr double kHbarJs = 1.054571817e-34;              // J*s
inline constexpr double kAvogadroPerMol = 6.02214076e23;        // 1/mol
inline constexpr double kFluxQuantumWb = 2.067833848e-15;       // Wb, h/2e

inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace jfab::constants
