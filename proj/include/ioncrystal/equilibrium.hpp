#pragma once

// Planar equilibrium search: seeded damped-Newton minimization of the
// dimensionless potential, plus ring (shell) analysis of the result.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ioncrystal/crystal.hpp"
#include "ioncrystal/trap_model.hpp"

namespace ioncrystal {

struct Seed {
  int id = 0;
  std::string kind;  // "rings", "lattice" or "random"
  PlanarCoords positions;
};

/// Initial configurations in units where beta_1^2 = 1: concentric-ring
/// heuristics, perturbed triangular-lattice patches and uniform random
/// placements in a disk of radius sqrt(n). Deterministic in `rng_seed`.
std::vector<Seed> generate_seeds(std::size_t n_ions, std::size_t count, std::uint64_t rng_seed);

/// Default seed count: 20 up to N = 10, 50 beyond.
std::size_t default_seed_count(std::size_t n_ions);

struct SolverOptions {
  double tolerance = 1e-10;  // max-norm of the planar gradient
  int max_iterations = 500;  // Newton iterations per seed
  std::size_t seed_count = 0;  // 0 selects default_seed_count
  std::uint64_t rng_seed = 1;
  int saddle_escapes = 4;
};

/// Thrown when no seed reaches the gradient tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, CrystalState best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const CrystalState& best() const noexcept { return best_; }

 private:
  CrystalState best_;
};

/// One damped-Newton run from `start` (already in trap units). The result
/// is gauge-fixed; `converged` reports whether the tolerance was met.
CrystalState minimize_from(const DimensionlessTrap& trap, const PlanarCoords& start,
                           const SolverOptions& options = {}, int seed_id = 0);

/// Runs every seed (rescaled to the trap's natural length beta_1^(-2/3)) and
/// returns all results in seed order.
std::vector<CrystalState> solve_all_seeds(const DimensionlessTrap& trap,
                                          const std::vector<Seed>& seeds,
                                          const SolverOptions& options = {});

/// Lowest-energy converged state over `seeds`; ties go to the lowest seed id.
CrystalState solve_equilibrium(const DimensionlessTrap& trap, std::size_t n_ions,
                               const std::vector<Seed>& seeds, const SolverOptions& options = {});

/// Same, with seeds from generate_seeds(n_ions, count, options.rng_seed).
CrystalState solve_equilibrium(const DimensionlessTrap& trap, std::size_t n_ions,
                               const SolverOptions& options = {});

/// Rotates so the outermost ion (lowest index among radius ties) lies on +x1.
void fix_rotation_gauge(PlanarCoords& positions);

struct ShellOptions {
  double gap_fraction = 0.25;     // split when a radial gap exceeds this x mean NN distance
  double center_fraction = 0.10;  // center ion: radius below this x outermost radius
};

ShellDecomposition shell_decomposition(const CrystalState& state, const ShellOptions& options = {});
ShellDecomposition shell_decomposition(const PlanarCoords& positions,
                                       const ShellOptions& options = {});

}  // namespace ioncrystal
