#include "ioncrystal/potential.hpp"

#include <cmath>
#include <limits>

#include "ioncrystal/errors.hpp"
#include "ioncrystal/kernels/coulomb.hpp"
#include "ioncrystal/linalg.hpp"

namespace ioncrystal {

PlanarCoords::PlanarCoords(std::vector<double> a, std::vector<double> b)
    : x1(std::move(a)), x2(std::move(b)) {
  if (x1.size() != x2.size()) throw ValidationError("coordinate arrays differ in length");
}

std::vector<double> PlanarCoords::flat() const {
  std::vector<double> v;
  v.reserve(2 * size());
  v.insert(v.end(), x1.begin(), x1.end());
  v.insert(v.end(), x2.begin(), x2.end());
  return v;
}

PlanarCoords PlanarCoords::from_flat(std::span<const double> v) {
  const std::size_t n = v.size() / 2;
  return PlanarCoords({v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)},
                      {v.begin() + static_cast<std::ptrdiff_t>(n), v.end()});
}

double PlanarCoords::radius(std::size_t i) const { return std::hypot(x1[i], x2[i]); }

void PlanarCoords::scale(double factor) {
  for (auto& v : x1) v *= factor;
  for (auto& v : x2) v *= factor;
}

void PlanarCoords::rotate(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t i = 0; i < size(); ++i) {
    const double a = x1[i], b = x2[i];
    x1[i] = c * a - s * b;
    x2[i] = s * a + c * b;
  }
}

namespace {

void check_finite(double value) {
  if (!std::isfinite(value)) throw DomainError("coincident ions: Coulomb energy is undefined");
}

}  // namespace

double coulomb_energy(const PlanarCoords& p) {
  const auto& k = kernels::active_kernels();
  const std::size_t n = p.size();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sum += k.pair_energy(p.x1[i], p.x2[i], std::span(p.x1).subspan(i + 1),
                         std::span(p.x2).subspan(i + 1));
  }
  check_finite(sum);
  return sum;
}

double potential(const DimensionlessTrap& trap, const PlanarCoords& p) {
  if (p.x1.size() != p.x2.size()) throw ValidationError("coordinate arrays differ in length");
  double confinement = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    confinement += trap.beta1_sq * p.x1[i] * p.x1[i] + trap.beta2_sq * p.x2[i] * p.x2[i];
  }
  return 0.5 * confinement + static_cast<double>(p.size()) * trap.axial_energy_per_ion() +
         coulomb_energy(p);
}

PlanarCoords gradient(const DimensionlessTrap& trap, const PlanarCoords& p) {
  const auto& k = kernels::active_kernels();
  const std::size_t n = p.size();
  const std::span xs(p.x1), ys(p.x2);
  PlanarCoords g(n);
  for (std::size_t m = 0; m < n; ++m) {
    double fx = 0.0, fy = 0.0;
    k.pair_force(xs[m], ys[m], xs.first(m), ys.first(m), &fx, &fy);
    k.pair_force(xs[m], ys[m], xs.subspan(m + 1), ys.subspan(m + 1), &fx, &fy);
    check_finite(fx + fy);
    g.x1[m] = trap.beta1_sq * xs[m] - fx;
    g.x2[m] = trap.beta2_sq * ys[m] - fy;
  }
  return g;
}

double min_pair_distance(const PlanarCoords& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      best = std::min(best, std::hypot(p.x1[i] - p.x1[j], p.x2[i] - p.x2[j]));
  return best;
}

std::vector<double> rotation_generator(const PlanarCoords& p) {
  const std::size_t n = p.size();
  std::vector<double> u(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = -p.x2[i];
    u[n + i] = p.x1[i];
  }
  const double len = norm2(u);
  if (len > 0.0)
    for (auto& v : u) v /= len;
  return u;
}

}  // namespace ioncrystal
