#pragma once

#include <cstddef>
#include <vector>

#include "ioncrystal/potential.hpp"

namespace ioncrystal {

/// A planar equilibrium (or the best attempt at one) for N ions.
struct CrystalState {
  PlanarCoords positions;
  double plane_z = 0.0;
  double energy = 0.0;
  double gradient_norm = 0.0;  // max-norm of the planar gradient
  bool converged = false;
  int seed_id = -1;
  int iterations = 0;

  // Out-of-plane certification from the axial spring matrix.
  double min_axial_eigenvalue = 0.0;
  bool axially_stable = true;
  // Lowest planar Hessian eigenvalue with the rotational mode removed.
  double min_planar_eigenvalue = 0.0;

  std::size_t n_ions() const noexcept { return positions.size(); }
};

struct ShellDecomposition {
  std::vector<std::size_t> ring_counts;     // innermost first; a center ion is a ring of 1
  std::vector<double> ring_radii;           // mean radius per ring
  std::vector<std::size_t> ring_of_ion;     // ring index per ion
  bool ambiguous = false;                   // some radial gap sits close to the split threshold
};

}  // namespace ioncrystal
