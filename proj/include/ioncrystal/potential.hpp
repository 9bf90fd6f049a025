#pragma once

// Dimensionless total potential of N ions confined to the crystal plane
// x3 = plane_z: trap terms plus pairwise Coulomb repulsion (units k_e e^2 / l_o).

#include <cstddef>
#include <span>
#include <vector>

#include "ioncrystal/trap_model.hpp"

namespace ioncrystal {

/// Planar coordinates stored as separate x1 / x2 arrays.
struct PlanarCoords {
  std::vector<double> x1;
  std::vector<double> x2;

  PlanarCoords() = default;
  explicit PlanarCoords(std::size_t n) : x1(n, 0.0), x2(n, 0.0) {}
  PlanarCoords(std::vector<double> a, std::vector<double> b);

  std::size_t size() const noexcept { return x1.size(); }

  /// Flat layout [x1_0 .. x1_{N-1}, x2_0 .. x2_{N-1}], matching the planar
  /// spring-matrix block order.
  std::vector<double> flat() const;
  static PlanarCoords from_flat(std::span<const double> v);

  double radius(std::size_t i) const;
  void scale(double factor);
  void rotate(double angle);
};

double potential(const DimensionlessTrap& trap, const PlanarCoords& positions);

/// Coulomb part only: sum over unordered pairs of 1/r.
double coulomb_energy(const PlanarCoords& positions);

/// dV/dx_{i,m} for i = 1, 2. The axial components vanish at plane_z and are
/// not returned.
PlanarCoords gradient(const DimensionlessTrap& trap, const PlanarCoords& positions);

double min_pair_distance(const PlanarCoords& positions);

/// Unit-norm infinitesimal rotation generator (-x2, x1) in flat layout; all
/// zeros when every ion sits at the origin.
std::vector<double> rotation_generator(const PlanarCoords& positions);

}  // namespace ioncrystal
