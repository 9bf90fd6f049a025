// Built with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "variants.hpp"

namespace ioncrystal::kernels {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double energy(double px, double py, std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vpx, _mm256_loadu_pd(xs.data() + j));
    const __m256d dy = _mm256_sub_pd(vpy, _mm256_loadu_pd(ys.data() + j));
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    acc = _mm256_add_pd(acc, _mm256_div_pd(one, _mm256_sqrt_pd(r2)));
  }
  double sum = hsum(acc);
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
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d ax = _mm256_setzero_pd();
  __m256d ay = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vpx, _mm256_loadu_pd(xs.data() + j));
    const __m256d dy = _mm256_sub_pd(vpy, _mm256_loadu_pd(ys.data() + j));
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    const __m256d inv_r3 = _mm256_div_pd(_mm256_div_pd(one, _mm256_sqrt_pd(r2)), r2);
    ax = _mm256_fmadd_pd(dx, inv_r3, ax);
    ay = _mm256_fmadd_pd(dy, inv_r3, ay);
  }
  double sx = hsum(ax), sy = hsum(ay);
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
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d three = _mm256_set1_pd(3.0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vpx, _mm256_loadu_pd(xs.data() + j));
    const __m256d dy = _mm256_sub_pd(vpy, _mm256_loadu_pd(ys.data() + j));
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    const __m256d inv_r3 = _mm256_div_pd(_mm256_div_pd(one, _mm256_sqrt_pd(r2)), r2);
    const __m256d k5 = _mm256_div_pd(_mm256_mul_pd(three, inv_r3), r2);
    _mm256_storeu_pd(out_xx + j, _mm256_fnmadd_pd(_mm256_mul_pd(k5, dx), dx, inv_r3));
    _mm256_storeu_pd(out_yy + j, _mm256_fnmadd_pd(_mm256_mul_pd(k5, dy), dy, inv_r3));
    _mm256_storeu_pd(out_xy + j,
                     _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(_mm256_mul_pd(k5, dx), dy)));
    _mm256_storeu_pd(out_zz + j, inv_r3);
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

constexpr CoulombKernels kAvx2{Isa::kAvx2, &energy, &force, &hessian};

}  // namespace

const CoulombKernels* detail::avx2_table() { return &kAvx2; }

}  // namespace ioncrystal::kernels
