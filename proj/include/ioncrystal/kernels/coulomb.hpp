#pragma once

// Pairwise Coulomb kernels over structure-of-arrays ion coordinates.
//
// Each kernel takes one source ion (px, py) and a run of target ions; callers
// exclude the source from the run. A scalar reference implementation is
// always available; vector variants are selected at runtime.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ioncrystal::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct CoulombKernels {
  Isa isa;

  /// Returns sum_j 1 / |p - q_j|.
  double (*pair_energy)(double px, double py, std::span<const double> xs,
                        std::span<const double> ys);

  /// Adds sum_j (p - q_j) / |p - q_j|^3 to (*fx, *fy): the Coulomb force on p.
  void (*pair_force)(double px, double py, std::span<const double> xs,
                     std::span<const double> ys, double* fx, double* fy);

  /// Per-target second-derivative couplings written to out_*[j]:
  ///   xx = 1/r^3 - 3 dx^2/r^5,  yy = 1/r^3 - 3 dy^2/r^5,
  ///   xy = -3 dx dy / r^5,       zz = 1/r^3.
  void (*pair_hessian)(double px, double py, std::span<const double> xs,
                       std::span<const double> ys, double* out_xx, double* out_yy,
                       double* out_xy, double* out_zz);
};

const CoulombKernels& scalar_kernels();

/// Variants compiled into this binary and supported by the running CPU.
std::vector<const CoulombKernels*> available_kernels();

/// Widest supported variant. IONCRYSTAL_SIMD=scalar|avx2|neon overrides the
/// choice (falls back to scalar when the request is unsupported).
const CoulombKernels& active_kernels();

}  // namespace ioncrystal::kernels
