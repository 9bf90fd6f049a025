// aarch64 only; NEON is part of the base ISA there.

#include <arm_neon.h>

#include <cmath>

#include "variants.hpp"

namespace ioncrystal::kernels {

namespace {

double energy(double px, double py, std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  const float64x2_t vpx = vdupq_n_f64(px);
  const float64x2_t vpy = vdupq_n_f64(py);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t dx = vsubq_f64(vpx, vld1q_f64(xs.data() + j));
    const float64x2_t dy = vsubq_f64(vpy, vld1q_f64(ys.data() + j));
    const float64x2_t r2 = vfmaq_f64(vmulq_f64(dy, dy), dx, dx);
    acc = vaddq_f64(acc, vdivq_f64(vdupq_n_f64(1.0), vsqrtq_f64(r2)));
  }
  double sum = vaddvq_f64(acc);
  for (; j < n; ++j) {
    const double dx = px - xs[j];
    const double dy = py - ys[j];
    sum += 1.0 / std::sqrt(dx * dx + dy * dy);
  }
  return sum;
}

void force(double px, double py, std::span<const double> xs, std::span<const double> ys,
           double* fx, double* fy) {
  const std::size_t n = xs.size();
  const float64x2_t vpx = vdupq_n_f64(px);
  const float64x2_t vpy = vdupq_n_f64(py);
  float64x2_t ax = vdupq_n_f64(0.0);
  float64x2_t ay = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t dx = vsubq_f64(vpx, vld1q_f64(xs.data() + j));
    const float64x2_t dy = vsubq_f64(vpy, vld1q_f64(ys.data() + j));
    const float64x2_t r2 = vfmaq_f64(vmulq_f64(dy, dy), dx, dx);
    const float64x2_t inv_r3 = vdivq_f64(vdivq_f64(vdupq_n_f64(1.0), vsqrtq_f64(r2)), r2);
    ax = vfmaq_f64(ax, dx, inv_r3);
    ay = vfmaq_f64(ay, dy, inv_r3);
  }
  double sx = vaddvq_f64(ax), sy = vaddvq_f64(ay);
  for (; j < n; ++j) {
    const double dx = px - xs[j];
    const double dy = py - ys[j];
    const double r2 = dx * dx + dy * dy;
    const double inv_r3 = 1.0 / std::sqrt(r2) / r2;
    sx += dx * inv_r3;
    sy += dy * inv_r3;
  }
  *fx += sx;
  *fy += sy;
}

void hessian(double px, double py, std::span<const double> xs, std::span<const double> ys,
             double* out_xx, double* out_yy, double* out_xy, double* out_zz) {
  const std::size_t n = xs.size();
  const float64x2_t vpx = vdupq_n_f64(px);
  const float64x2_t vpy = vdupq_n_f64(py);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t dx = vsubq_f64(vpx, vld1q_f64(xs.data() + j));
    const float64x2_t dy = vsubq_f64(vpy, vld1q_f64(ys.data() + j));
    const float64x2_t r2 = vfmaq_f64(vmulq_f64(dy, dy), dx, dx);
    const float64x2_t inv_r3 = vdivq_f64(vdivq_f64(vdupq_n_f64(1.0), vsqrtq_f64(r2)), r2);
    const float64x2_t k5 = vdivq_f64(vmulq_n_f64(inv_r3, 3.0), r2);
    vst1q_f64(out_xx + j, vfmsq_f64(inv_r3, vmulq_f64(k5, dx), dx));
    vst1q_f64(out_yy + j, vfmsq_f64(inv_r3, vmulq_f64(k5, dy), dy));
    vst1q_f64(out_xy + j, vnegq_f64(vmulq_f64(vmulq_f64(k5, dx), dy)));
    vst1q_f64(out_zz + j, inv_r3);
  }
  for (; j < n; ++j) {
    const double dx = px - xs[j];
    const double dy = py - ys[j];
    const double r2 = dx * dx + dy * dy;
    const double inv_r3 = 1.0 / std::sqrt(r2) / r2;
    const double k5 = 3.0 * inv_r3 / r2;
    out_xx[j] = inv_r3 - k5 * dx * dx;
    out_yy[j] = inv_r3 - k5 * dy * dy;
    out_xy[j] = -k5 * dx * dy;
    out_zz[j] = inv_r3;
  }
}

constexpr CoulombKernels kNeon{Isa::kNeon, &energy, &force, &hessian};

}  // namespace

const CoulombKernels* detail::neon_table() { return &kNeon; }

}  // namespace ioncrystal::kernels
