#pragma once

// Test-side oracles. Nothing here calls the library's gradient or Hessian
// code; finite differences go through `potential` only.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ioncrystal/potential.hpp"
#include "ioncrystal/trap_model.hpp"

namespace testing {

inline ioncrystal::DimensionlessTrap trap_at(double ring_dc, double top_dc, double bottom_dc) {
  ioncrystal::DriveConfig drive = ioncrystal::DriveConfig::fitted_default();
  drive.ring_dc = ring_dc;
  drive.top_dc = top_dc;
  drive.bottom_dc = bottom_dc;
  return ioncrystal::build_dimensionless(ioncrystal::IonSpecies::ytterbium171(),
                                         ioncrystal::TrapGeometry::fitted_default(), drive);
}

inline ioncrystal::DimensionlessTrap paper_trap() { return trap_at(46.3, 50.0, 50.0); }

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Random stable trap: voltages drawn until beta_1^2 and beta_3^2 are positive.
inline ioncrystal::DimensionlessTrap random_stable_trap(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> v(0.0, 100.0);
  for (;;) {
    const auto t = trap_at(v(rng), v(rng), v(rng));
    if (t.stable && t.beta1_sq > 0.02) return t;
  }
}

/// Random configuration with all pair distances above `min_dist`, spread over
/// roughly the crystal size for the given trap.
inline ioncrystal::PlanarCoords random_config(std::size_t n, double radius, double min_dist,
                                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ioncrystal::PlanarCoords p;
  while (p.size() < n) {
    const double x = radius * u(rng), y = radius * u(rng);
    if (x * x + y * y > radius * radius) continue;
    bool ok = true;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (std::hypot(p.x1[i] - x, p.x2[i] - y) < min_dist) ok = false;
    if (!ok) continue;
    p.x1.push_back(x);
    p.x2.push_back(y);
  }
  return p;
}

/// Fourth-order central difference of `potential` in flat coordinate a.
/// The potential carries a large constant axial term, so steps much below
/// 1e-3 lose digits to rounding.
inline double fd_first(const ioncrystal::DimensionlessTrap& trap, const std::vector<double>& x,
                       std::size_t a, double h) {
  auto at = [&](double s) {
    auto y = x;
    y[a] += s;
    return ioncrystal::potential(trap, ioncrystal::PlanarCoords::from_flat(y));
  };
  return (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
}

/// Fourth-order central second difference d^2 V / dx_a dx_b.
inline double fd_second(const ioncrystal::DimensionlessTrap& trap, const std::vector<double>& x,
                        std::size_t a, std::size_t b, double h) {
  auto at = [&](double sa, double sb) {
    auto y = x;
    y[a] += sa;
    y[b] += sb;
    return ioncrystal::potential(trap, ioncrystal::PlanarCoords::from_flat(y));
  };
  if (a == b) {
    return (-at(2 * h, 0) + 16.0 * at(h, 0) - 30.0 * at(0, 0) + 16.0 * at(-h, 0) -
            at(-2 * h, 0)) /
           (12.0 * h * h);
  }
  auto mixed = [&](double s) {
    return (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4.0 * s * s);
  };
  return (4.0 * mixed(h) - mixed(2 * h)) / 3.0;
}

/// Planar potential written out directly in long double, including the
/// constant axial term. Second differences of the double-precision potential
/// lose too many digits to that constant.
inline long double potential_ld(const ioncrystal::DimensionlessTrap& t,
                                const std::vector<long double>& flat) {
  const std::size_t n = flat.size() / 2;
  const long double z = t.plane_z;
  const long double zt = z + static_cast<long double>(t.x_offset_top);
  const long double zb = z + static_cast<long double>(t.x_offset_bottom);
  const long double axial =
      0.5L * ((1.0L - static_cast<long double>(t.beta_r3_sq)) * z * z +
              static_cast<long double>(t.beta_t3_sq) * zt * zt +
              static_cast<long double>(t.beta_b3_sq) * zb * zb);
  long double e = static_cast<long double>(n) * axial;
  for (std::size_t m = 0; m < n; ++m) {
    const long double x = flat[m], y = flat[n + m];
    e += 0.5L * (static_cast<long double>(t.beta1_sq) * x * x +
                 static_cast<long double>(t.beta2_sq) * y * y);
    for (std::size_t k = m + 1; k < n; ++k) {
      const long double dx = x - flat[k], dy = y - flat[n + k];
      e += 1.0L / std::sqrt(dx * dx + dy * dy);
    }
  }
  return e;
}

/// Fourth-order central second difference of `potential_ld`.
inline double fd_second_ld(const ioncrystal::DimensionlessTrap& trap, const std::vector<double>& x,
                           std::size_t a, std::size_t b, double h) {
  const std::vector<long double> base(x.begin(), x.end());
  const long double s = h;
  auto at = [&](long double sa, long double sb) {
    auto y = base;
    y[a] += sa;
    y[b] += sb;
    return potential_ld(trap, y);
  };
  if (a == b) {
    return static_cast<double>(
        (-at(2 * s, 0) + 16 * at(s, 0) - 30 * at(0, 0) + 16 * at(-s, 0) - at(-2 * s, 0)) /
        (12 * s * s));
  }
  auto mixed = [&](long double u) {
    return (at(u, u) - at(u, -u) - at(-u, u) + at(-u, -u)) / (4 * u * u);
  };
  return static_cast<double>((4 * mixed(s) - mixed(2 * s)) / 3);
}

/// Finite-difference gradient of `potential`, flat [x1..., x2...] layout.
inline std::vector<double> fd_gradient(const ioncrystal::DimensionlessTrap& trap,
                                       const ioncrystal::PlanarCoords& p, double h = 1e-3) {
  const std::vector<double> flat = p.flat();
  std::vector<double> g(flat.size());
  for (std::size_t k = 0; k < flat.size(); ++k) g[k] = fd_first(trap, flat, k, h);
  return g;
}

/// Coulomb-only energy in three dimensions, used for derivatives involving the
/// axial coordinate. The trap part is quadratic and handled analytically by
/// callers.
inline double coulomb3(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& z) {
  double e = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m)
    for (std::size_t n = m + 1; n < x.size(); ++n)
      e += 1.0 / std::sqrt((x[m] - x[n]) * (x[m] - x[n]) + (y[m] - y[n]) * (y[m] - y[n]) +
                           (z[m] - z[n]) * (z[m] - z[n]));
  return e;
}

/// Planar Coulomb energy written out directly (no kernels).
inline double coulomb2(const ioncrystal::PlanarCoords& p) {
  return coulomb3(p.x1, p.x2, std::vector<double>(p.size(), 0.0));
}

/// Central-difference gradient of the planar Coulomb energy plus the trap
/// terms beta^2 x, computed without the library. Used for the N-ion Hessian
/// oracle as a difference of gradients.
inline std::vector<double> oracle_gradient(double beta1_sq, const std::vector<double>& flat) {
  const std::size_t n = flat.size() / 2;
  std::vector<double> g(flat.size(), 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    g[m] += beta1_sq * flat[m];
    g[n + m] += beta1_sq * flat[n + m];
    for (std::size_t k = 0; k < n; ++k) {
      if (k == m) continue;
      const double dx = flat[m] - flat[k], dy = flat[n + m] - flat[n + k];
      const double r3 = std::pow(dx * dx + dy * dy, 1.5);
      g[m] -= dx / r3;
      g[n + m] -= dy / r3;
    }
  }
  return g;
}

}  // namespace testing
