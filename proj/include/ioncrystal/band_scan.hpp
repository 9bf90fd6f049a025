#pragma once

// Mode spectra along a sweep of the ring DC voltage.

#include <optional>
#include <string>
#include <vector>

#include "ioncrystal/equilibrium.hpp"
#include "ioncrystal/modes.hpp"
#include "ioncrystal/trap_model.hpp"

namespace ioncrystal {

struct BandPoint {
  double ring_dc = 0.0;
  DimensionlessTrap trap;
  std::optional<CrystalState> state;
  std::optional<ModeSpectrum> spectrum;
  std::string error;  // empty on success
};

struct BandScan {
  std::vector<BandPoint> points;
  std::optional<double> first_soft_ring_dc;
};

/// Re-solves the equilibrium at each ring voltage, warm-starting from the
/// previous point (rescaled to the new trap length). Failures are recorded
/// per point and the sweep continues.
BandScan mode_band_scan(const IonSpecies& species, const TrapGeometry& geometry,
                        const DriveConfig& base, std::size_t n_ions,
                        const std::vector<double>& ring_values, const SolverOptions& options = {});

}  // namespace ioncrystal
