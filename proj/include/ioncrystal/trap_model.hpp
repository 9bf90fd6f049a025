#pragma once

// Oblate Paul trap: RF pseudopotential plus DC ring and end-cap fields,
// reduced to the scale-free form used by the crystal solvers.

#include <array>
#include <cstddef>
#include <numbers>
#include <vector>

namespace ioncrystal {

struct IonSpecies {
  double mass = 0.0;    // kg
  double charge = 0.0;  // C

  static IonSpecies from_atomic_units(double mass_u, double charge_e);
  static IonSpecies ytterbium171();
  void validate() const;
};

/// Fitted electrode geometry. The bottom end-cap linear coefficient is tied
/// to the top one (b_b = -b_t) by the trap's mirror symmetry.
class TrapGeometry {
 public:
  TrapGeometry(double ring_radius, double cap_axial_length, double cap_linear_length,
               double cap_radial_length, double cap_offset = 0.0);

  /// Rejects a bottom coefficient that breaks the mirror symmetry.
  static TrapGeometry with_bottom(double ring_radius, double cap_axial_length,
                                  double top_linear_length, double bottom_linear_length,
                                  double cap_radial_length, double cap_offset = 0.0);
  static TrapGeometry fitted_default();

  double ring_radius() const noexcept { return r_o_; }        // r_o
  double cap_axial_length() const noexcept { return a_; }     // a
  double top_linear_length() const noexcept { return b_t_; }  // b_t
  double bottom_linear_length() const noexcept { return -b_t_; }
  double cap_radial_length() const noexcept { return c_; }    // c
  // Uniform offset d of the end-cap polynomial; never contributes a force.
  double cap_offset() const noexcept { return d_; }

 private:
  double r_o_, a_, b_t_, c_, d_;
};

struct DriveConfig {
  double rf_amplitude = 500.0;                                   // V
  double rf_angular_frequency = 2.0 * std::numbers::pi * 35.0e6;  // rad/s
  double ring_dc = 0.0;                                          // V
  double top_dc = 0.0;                                           // V
  double bottom_dc = 0.0;                                        // V

  /// 500 V / 35 MHz drive with V_ring = 46.3 V and V_top = V_bottom = 50 V.
  static DriveConfig fitted_default();
  void validate() const;
};

/// Squared angular frequencies (rad^2/s^2) per axis. Deconfining DC
/// contributions show up as negative values instead of imaginary ones.
struct SquaredFrequencies {
  std::array<double, 3> psi{};
  std::array<double, 3> ring{};
  std::array<double, 3> top{};
  std::array<double, 3> bottom{};
};

struct DimensionlessTrap {
  double beta1_sq = 0.25;
  double beta2_sq = 0.25;
  double beta3_sq = 1.0;
  double beta_r3_sq = 0.0;
  double beta_t3_sq = 0.0;
  double beta_b3_sq = 0.0;
  double x_offset_top = 0.0;
  double x_offset_bottom = 0.0;
  double plane_z = 0.0;
  double length_scale = 1.0;  // m
  double omega_psi3 = 1.0;    // rad/s
  bool stable = true;

  double beta1() const;
  double beta3() const;

  /// Energy per ion of the axial trap terms evaluated at plane_z.
  double axial_energy_per_ion() const;

  /// Trap defined directly by its normalized squared frequencies; used by
  /// tests and scans that do not start from electrode voltages.
  static DimensionlessTrap from_betas(double beta1_sq, double beta_r3_sq, double beta_t3_sq,
                                      double beta_b3_sq, double x_offset_top = 0.0,
                                      double x_offset_bottom = 0.0);
};

SquaredFrequencies derive_frequencies(const IonSpecies& species, const TrapGeometry& geometry,
                                      const DriveConfig& drive);

DimensionlessTrap build_dimensionless(const IonSpecies& species, const TrapGeometry& geometry,
                                      const DriveConfig& drive);

/// Axis of a voltage scan: count points from `start` with spacing `step`.
struct VoltageAxis {
  double start = 0.0;
  double stop = 100.0;
  double step = 1.0;

  std::vector<double> values() const;
};

struct StabilityPoint {
  double ring_dc;
  double cap_dc;
  double beta1_sq;
  double beta3_sq;
  bool stable;
};

/// Row-major grid: ring voltage is the slow index, cap voltage the fast one.
struct StabilityMap {
  std::vector<double> ring_values;
  std::vector<double> cap_values;
  std::vector<StabilityPoint> points;

  const StabilityPoint& at(std::size_t ring_index, std::size_t cap_index) const;
  std::size_t stable_count() const;
  /// True when the stable cells form one 4-connected region without holes.
  bool stable_region_simply_connected() const;
};

/// Scans (V_ring, V_top = V_bottom); all other drive settings come from `base`.
StabilityMap stability_scan(const IonSpecies& species, const TrapGeometry& geometry,
                            const DriveConfig& base, const VoltageAxis& ring_axis = {},
                            const VoltageAxis& cap_axis = {});

}  // namespace ioncrystal
