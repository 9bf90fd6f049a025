#pragma once

// Independent check on the Newton solver: energy-only Metropolis annealing
// followed by a gradient-descent polish that does not reuse the solver's
// gradient or Hessian code.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ioncrystal/crystal.hpp"
#include "ioncrystal/trap_model.hpp"

namespace ioncrystal {

struct AnnealSchedule {
  double initial_temperature = 0.0;  // <= 0 selects 0.1 x beta_1^(2/3)
  double cooling_factor = 0.995;     // per sweep
  int sweeps = 2000;
  double step_scale = 0.0;           // <= 0 selects 0.1 x beta_1^(-2/3); adapted online
  std::uint64_t rng_seed = 1;

  void validate() const;
};

/// Annealed and polished crystal. `converged` is false when the polish
/// misses the 1e-10 gradient tolerance (result flagged, not thrown).
CrystalState anneal(const DimensionlessTrap& trap, std::size_t n_ions,
                    const AnnealSchedule& schedule = {});

struct ComparisonReport {
  double energy_difference = 0.0;  // a.energy - b.energy
  bool structural_match = false;
  std::vector<std::size_t> ring_counts_a, ring_counts_b;
  double max_ring_radius_difference = 0.0;
  double alignment_rms = 0.0;  // after best rotation / reflection and matching
};

ComparisonReport energy_compare(const CrystalState& a, const CrystalState& b,
                                double radius_tolerance = 1e-6);

}  // namespace ioncrystal
