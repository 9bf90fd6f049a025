#pragma once

// Harmonic expansion about a planar equilibrium: spring-constant matrices
// and the decoupled axial / planar normal-mode problems.

#include <cstddef>
#include <optional>
#include <vector>

#include "ioncrystal/crystal.hpp"
#include "ioncrystal/linalg.hpp"
#include "ioncrystal/trap_model.hpp"

namespace ioncrystal {

struct SpringMatrices {
  Matrix k11, k22, k12, k33;
  double beta3_sq = 0.0;

  std::size_t n_ions() const noexcept { return k33.rows(); }
  /// 2N x 2N block matrix [[K11, K12], [K12, K22]].
  Matrix planar() const;
};

/// Second derivatives of the dimensionless potential at `positions`
/// (in-plane block and axial block). Valid at any planar configuration.
SpringMatrices spring_matrices(const DimensionlessTrap& trap, const PlanarCoords& positions);

/// Same, but only for a converged crystal.
SpringMatrices build_spring_matrices(const DimensionlessTrap& trap, const CrystalState& state);

struct ModeSpectrum {
  // Frequencies in units of omega_psi3, signed: sign(lambda) sqrt|lambda|.
  std::vector<double> axial_eigenvalues;
  std::vector<double> axial_freqs;
  Matrix axial_vectors;  // columns are modes
  std::vector<double> planar_eigenvalues;
  std::vector<double> planar_freqs;
  Matrix planar_vectors;  // columns are modes, flat [x1..., x2...] layout

  bool soft_axial = false;
  bool soft_planar = false;  // excludes the rotational mode
  std::optional<std::size_t> zero_rotation_index;
  std::size_t planar_zero_count = 0;

  std::size_t n_ions() const noexcept { return axial_eigenvalues.size(); }
};

inline constexpr double kSoftEigenvalue = -1e-8;
inline constexpr double kZeroEigenvalue = 1e-8;

/// Both eigenproblems. Degenerate subspaces get a canonical basis
/// (Gram-Schmidt of the projected unit vectors in index order) and every
/// eigenvector has its largest-magnitude component positive.
ModeSpectrum solve_modes(const SpringMatrices& k);

/// Groups of consecutive eigenvalue indices closer than `tol` (relative to
/// the largest |eigenvalue|).
std::vector<std::vector<std::size_t>> degenerate_groups(const std::vector<double>& values,
                                                        double tol = 1e-9);

}  // namespace ioncrystal
