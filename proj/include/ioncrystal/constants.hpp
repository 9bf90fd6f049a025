#pragma once

// CODATA 2018 values. All tolerances in the test suites assume these.

#include <numbers>

namespace ioncrystal::constants {

inline constexpr double kElementaryCharge = 1.602176634e-19;     // C (exact)
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;     // kg
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kReducedPlanck = 1.054571817e-34;        // J s (exact)
inline constexpr double kCoulomb = 1.0 / (4.0 * std::numbers::pi * kVacuumPermittivity);

}  // namespace ioncrystal::constants
