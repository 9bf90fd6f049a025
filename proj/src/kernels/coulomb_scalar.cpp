#include <cmath>

#include "ioncrystal/kernels/coulomb.hpp"

namespace ioncrystal::kernels {

namespace {

double energy(double px, double py, std::span<const double> xs, std::span<const double> ys) {
  double sum = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double dx = px - xs[j];
    const double dy = py - ys[j];
    sum += 1.0 / std::sqrt(dx * dx + dy * dy);
  }
  return sum;
}

void force(double px, double py, std::span<const double> xs, std::span<const double> ys,
           double* fx, double* fy) {
  double sx = 0.0, sy = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double dx = px - xs[j];
    const double dy = py - ys[j];
    const double r2 = dx * dx + dy * dy;
    const double inv_r = 1.0 / std::sqrt(r2);
    const double inv_r3 = inv_r / r2;
    sx += dx * inv_r3;
    sy += dy * inv_r3;
  }
  *fx += sx;
  *fy += sy;
}

void hessian(double px, double py, std::span<const double> xs, std::span<const double> ys,
             double* out_xx, double* out_yy, double* out_xy, double* out_zz) {
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double dx = px - xs[j];
    const double dy = py - ys[j];
    const double r2 = dx * dx + dy * dy;
    const double inv_r = 1.0 / std::sqrt(r2);
    const double inv_r3 = inv_r / r2;
    const double three_inv_r5 = 3.0 * inv_r3 / r2;
    out_xx[j] = inv_r3 - three_inv_r5 * dx * dx;
    out_yy[j] = inv_r3 - three_inv_r5 * dy * dy;
    out_xy[j] = -three_inv_r5 * dx * dy;
    out_zz[j] = inv_r3;
  }
}

constexpr CoulombKernels kScalar{Isa::kScalar, &energy, &force, &hessian};

}  // namespace

const CoulombKernels& scalar_kernels() { return kScalar; }

}  // namespace ioncrystal::kernels
