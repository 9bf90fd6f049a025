#include "ioncrystal/band_scan.hpp"

#include <cmath>
#include <exception>

namespace ioncrystal {

BandScan mode_band_scan(const IonSpecies& species, const TrapGeometry& geometry,
                        const DriveConfig& base, std::size_t n_ions,
                        const std::vector<double>& ring_values, const SolverOptions& options) {
  BandScan scan;
  std::optional<CrystalState> previous;
  double previous_beta1_sq = 0.0;

  for (double vr : ring_values) {
    BandPoint point;
    point.ring_dc = vr;
    try {
      DriveConfig drive = base;
      drive.ring_dc = vr;
      point.trap = build_dimensionless(species, geometry, drive);
      if (!point.trap.stable) {
        point.error = "unstable trap (beta_1^2 or beta_3^2 not positive)";
        scan.points.push_back(std::move(point));
        continue;
      }

      std::optional<CrystalState> state;
      if (previous) {
        PlanarCoords start = previous->positions;
        start.scale(std::cbrt(previous_beta1_sq / point.trap.beta1_sq));
        CrystalState warm = minimize_from(point.trap, start, options, previous->seed_id);
        if (warm.converged) state = std::move(warm);
      }
      if (!state) state = solve_equilibrium(point.trap, n_ions, options);

      point.spectrum = solve_modes(build_spring_matrices(point.trap, *state));
      point.state = state;
      previous = std::move(state);
      previous_beta1_sq = point.trap.beta1_sq;
      if (point.spectrum->soft_axial && !scan.first_soft_ring_dc) scan.first_soft_ring_dc = vr;
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    scan.points.push_back(std::move(point));
  }
  return scan;
}

}  // namespace ioncrystal
