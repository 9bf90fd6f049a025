#pragma once

// Ising couplings mediated by the axial modes under a spin-dependent force
// detuned by mu from the carrier, and their power-law range.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ioncrystal/crystal.hpp"
#include "ioncrystal/linalg.hpp"
#include "ioncrystal/modes.hpp"

namespace ioncrystal {

struct PairCoupling {
  std::size_t m = 0, n = 0;
  double distance = 0.0;  // planar, units of l_o
  double coupling = 0.0;  // units of J_0
};

struct CouplingResult {
  double detuning = 0.0;  // mu / omega_CM
  Matrix j;               // symmetric, zero diagonal
  std::vector<PairCoupling> pairs;  // m < n, row-major order
};

struct PowerLawFit {
  double exponent = 0.0;   // b in |J| ~ r^-b
  double prefactor = 0.0;  // |J| at r = 1
  double r_squared = 0.0;
  std::size_t pairs_used = 0;
  std::size_t pairs_dropped = 0;
};

/// Axial mode with the largest overlap with the uniform vector.
std::size_t com_mode_index(const ModeSpectrum& spectrum);

/// J_mn = sum_a b_ma b_na / ((mu/w_CM)^2 - (w_a/w_CM)^2) with detuning in
/// units of w_CM. Throws ResonanceError when mu is within 1e-9 of a mode.
CouplingResult compute_couplings(const CrystalState& state, const ModeSpectrum& spectrum,
                                 double detuning);

/// Least squares on (log r, log |J|); pairs with |J| <= 1e-14 are dropped.
PowerLawFit fit_power_law(const CouplingResult& result);

/// J_0 = Omega^2 hbar dk^2 / (2 m w_CM^2) in J (SI inputs: rad/s, 1/m, kg, rad/s).
double coupling_scale(double rabi_frequency, double delta_k, double mass, double omega_cm);

struct DetuningEntry {
  double detuning = 0.0;
  std::optional<CouplingResult> result;
  std::optional<PowerLawFit> fit;
  std::string error;  // resonance or fit failure; empty otherwise
};

std::vector<DetuningEntry> detuning_sweep(const CrystalState& state, const ModeSpectrum& spectrum,
                                          const std::vector<double>& detunings);

}  // namespace ioncrystal
