#include "ioncrystal/trap_model.hpp"

#include <cmath>
#include <queue>
#include <string>

#include "ioncrystal/constants.hpp"
#include "ioncrystal/errors.hpp"

namespace ioncrystal {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string(name) + " must be positive and finite");
  }
}

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) throw ValidationError(std::string(name) + " must be finite");
}

}  // namespace

IonSpecies IonSpecies::from_atomic_units(double mass_u, double charge_e) {
  IonSpecies s{mass_u * constants::kAtomicMassUnit, charge_e * constants::kElementaryCharge};
  s.validate();
  return s;
}

IonSpecies IonSpecies::ytterbium171() { return from_atomic_units(171.0, 1.0); }

void IonSpecies::validate() const {
  require_positive(mass, "ion mass");
  require_positive(charge, "ion charge");
}

TrapGeometry::TrapGeometry(double ring_radius, double cap_axial_length, double cap_linear_length,
                           double cap_radial_length, double cap_offset)
    : r_o_(ring_radius), a_(cap_axial_length), b_t_(cap_linear_length), c_(cap_radial_length),
      d_(cap_offset) {
  require_positive(r_o_, "r_o");
  require_positive(a_, "a");
  require_positive(c_, "c");
  require_finite(b_t_, "b_t");
  require_finite(d_, "d");
  if (b_t_ == 0.0) throw ValidationError("b_t must be nonzero");
}

TrapGeometry TrapGeometry::with_bottom(double ring_radius, double cap_axial_length,
                                       double top_linear_length, double bottom_linear_length,
                                       double cap_radial_length, double cap_offset) {
  const double tol = 1e-12 * std::abs(top_linear_length);
  if (std::abs(bottom_linear_length + top_linear_length) > tol) {
    throw ValidationError("b_b must equal -b_t for a mirror-symmetric trap");
  }
  return TrapGeometry(ring_radius, cap_axial_length, top_linear_length, cap_radial_length,
                      cap_offset);
}

TrapGeometry TrapGeometry::fitted_default() {
  return TrapGeometry(512e-6, 524e-6, 761e-6, 704e-6, 0.812);
}

DriveConfig DriveConfig::fitted_default() {
  DriveConfig d;
  d.ring_dc = 46.3;
  d.top_dc = 50.0;
  d.bottom_dc = 50.0;
  return d;
}

void DriveConfig::validate() const {
  require_positive(rf_amplitude, "RF amplitude");
  require_positive(rf_angular_frequency, "RF angular frequency");
  require_finite(ring_dc, "ring DC voltage");
  require_finite(top_dc, "top DC voltage");
  require_finite(bottom_dc, "bottom DC voltage");
}

double DimensionlessTrap::beta1() const { return std::sqrt(beta1_sq); }
double DimensionlessTrap::beta3() const { return std::sqrt(beta3_sq); }

double DimensionlessTrap::axial_energy_per_ion() const {
  const double z = plane_z;
  const double zt = z + x_offset_top;
  const double zb = z + x_offset_bottom;
  return 0.5 * ((1.0 - beta_r3_sq) * z * z + beta_t3_sq * zt * zt + beta_b3_sq * zb * zb);
}

DimensionlessTrap DimensionlessTrap::from_betas(double beta1_sq, double beta_r3_sq,
                                                double beta_t3_sq, double beta_b3_sq,
                                                double x_offset_top, double x_offset_bottom) {
  DimensionlessTrap t;
  t.beta1_sq = beta1_sq;
  t.beta2_sq = beta1_sq;
  t.beta_r3_sq = beta_r3_sq;
  t.beta_t3_sq = beta_t3_sq;
  t.beta_b3_sq = beta_b3_sq;
  t.beta3_sq = 1.0 - beta_r3_sq + beta_t3_sq + beta_b3_sq;
  t.x_offset_top = x_offset_top;
  t.x_offset_bottom = x_offset_bottom;
  t.plane_z = t.beta3_sq != 0.0
                  ? (-beta_t3_sq * x_offset_top - beta_b3_sq * x_offset_bottom) / t.beta3_sq
                  : 0.0;
  t.stable = beta1_sq > 0.0 && t.beta3_sq > 0.0;
  return t;
}

SquaredFrequencies derive_frequencies(const IonSpecies& species, const TrapGeometry& geometry,
                                      const DriveConfig& drive) {
  species.validate();
  drive.validate();
  const double m = species.mass;
  const double q = species.charge;
  const double r2 = geometry.ring_radius() * geometry.ring_radius();
  const double a2 = geometry.cap_axial_length() * geometry.cap_axial_length();
  const double c2 = geometry.cap_radial_length() * geometry.cap_radial_length();

  SquaredFrequencies f;
  const double psi = std::sqrt(2.0) * q * drive.rf_amplitude / (m * drive.rf_angular_frequency * r2);
  f.psi = {psi * psi, psi * psi, 4.0 * psi * psi};

  const double ring = 2.0 * q * drive.ring_dc / (m * r2);
  f.ring = {ring, ring, 2.0 * ring};

  const double top = 2.0 * q * drive.top_dc / (m * c2);
  f.top = {top, top, 2.0 * q * drive.top_dc / (m * a2)};

  const double bottom = 2.0 * q * drive.bottom_dc / (m * c2);
  f.bottom = {bottom, bottom, 2.0 * q * drive.bottom_dc / (m * a2)};
  return f;
}

DimensionlessTrap build_dimensionless(const IonSpecies& species, const TrapGeometry& geometry,
                                      const DriveConfig& drive) {
  const SquaredFrequencies f = derive_frequencies(species, geometry, drive);
  const double w3 = f.psi[2];

  DimensionlessTrap t;
  t.omega_psi3 = std::sqrt(w3);
  t.beta1_sq = (f.psi[0] + f.ring[0] - f.top[0] - f.bottom[0]) / w3;
  t.beta2_sq = (f.psi[1] + f.ring[1] - f.top[1] - f.bottom[1]) / w3;
  t.beta_r3_sq = f.ring[2] / w3;
  t.beta_t3_sq = f.top[2] / w3;
  t.beta_b3_sq = f.bottom[2] / w3;
  t.beta3_sq = 1.0 - t.beta_r3_sq + t.beta_t3_sq + t.beta_b3_sq;

  const double ke2 = constants::kCoulomb * species.charge * species.charge;
  t.length_scale = std::cbrt(ke2 / (species.mass * w3));

  const double a2 = geometry.cap_axial_length() * geometry.cap_axial_length();
  t.x_offset_top = a2 / (2.0 * t.length_scale * geometry.top_linear_length());
  t.x_offset_bottom = a2 / (2.0 * t.length_scale * geometry.bottom_linear_length());
  t.plane_z = (-t.beta_t3_sq * t.x_offset_top - t.beta_b3_sq * t.x_offset_bottom) / t.beta3_sq;
  t.stable = t.beta1_sq > 0.0 && t.beta3_sq > 0.0;
  if (!t.stable && t.beta3_sq == 0.0) t.plane_z = 0.0;
  return t;
}

std::vector<double> VoltageAxis::values() const {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw ValidationError("voltage axis must be finite");
  }
  if (step <= 0.0 && stop != start) throw ValidationError("voltage axis step must be positive");
  if (stop < start) throw ValidationError("voltage axis stop must not be below start");
  const auto count =
      stop == start ? std::size_t{1}
                    : static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = start + static_cast<double>(i) * step;
  return v;
}

const StabilityPoint& StabilityMap::at(std::size_t ring_index, std::size_t cap_index) const {
  return points.at(ring_index * cap_values.size() + cap_index);
}

std::size_t StabilityMap::stable_count() const {
  std::size_t n = 0;
  for (const auto& p : points) n += p.stable ? 1 : 0;
  return n;
}

bool StabilityMap::stable_region_simply_connected() const {
  const std::size_t rows = ring_values.size();
  const std::size_t cols = cap_values.size();
  if (rows == 0 || cols == 0) return false;

  // Flood-fill cells with a given stability value starting from `seeds`.
  auto flood = [&](bool value, const std::vector<std::size_t>& seeds) {
    std::vector<char> seen(points.size(), 0);
    std::queue<std::size_t> todo;
    for (auto s : seeds) {
      if (points[s].stable == value && !seen[s]) {
        seen[s] = 1;
        todo.push(s);
      }
    }
    while (!todo.empty()) {
      const std::size_t idx = todo.front();
      todo.pop();
      const std::size_t r = idx / cols, c = idx % cols;
      const std::size_t nbrs[4] = {r > 0 ? idx - cols : idx, r + 1 < rows ? idx + cols : idx,
                                   c > 0 ? idx - 1 : idx, c + 1 < cols ? idx + 1 : idx};
      for (auto nb : nbrs) {
        if (!seen[nb] && points[nb].stable == value) {
          seen[nb] = 1;
          todo.push(nb);
        }
      }
    }
    return seen;
  };

  std::size_t first = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].stable) {
      first = i;
      break;
    }
  }
  if (first == points.size()) return false;
  const auto stable_component = flood(true, {first});
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].stable && !stable_component[i]) return false;
  }

  // A hole is an unstable cell not reachable from the grid boundary.
  std::vector<std::size_t> border;
  for (std::size_t r = 0; r < rows; ++r) {
    border.push_back(r * cols);
    border.push_back(r * cols + cols - 1);
  }
  for (std::size_t c = 0; c < cols; ++c) {
    border.push_back(c);
    border.push_back((rows - 1) * cols + c);
  }
  const auto outside = flood(false, border);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].stable && !outside[i]) return false;
  }
  return true;
}

StabilityMap stability_scan(const IonSpecies& species, const TrapGeometry& geometry,
                            const DriveConfig& base, const VoltageAxis& ring_axis,
                            const VoltageAxis& cap_axis) {
  StabilityMap map;
  map.ring_values = ring_axis.values();
  map.cap_values = cap_axis.values();
  map.points.reserve(map.ring_values.size() * map.cap_values.size());
  for (double vr : map.ring_values) {
    for (double vc : map.cap_values) {
      DriveConfig drive = base;
      drive.ring_dc = vr;
      drive.top_dc = vc;
      drive.bottom_dc = vc;
      const DimensionlessTrap t = build_dimensionless(species, geometry, drive);
      map.points.push_back({vr, vc, t.beta1_sq, t.beta3_sq, t.stable});
    }
  }
  return map;
}

}  // namespace ioncrystal
