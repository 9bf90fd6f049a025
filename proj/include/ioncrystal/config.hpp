#pragma once

// Trap configuration files: one `key = value unit` entry per line, '#'
// comments. Dimensional values must carry a unit suffix.
//
//   species.mass        u | kg
//   species.charge      e | C
//   geometry.r_o        m | mm | um
//   geometry.a          m | mm | um
//   geometry.b_t        m | mm | um
//   geometry.b_b        m | mm | um   (optional; must equal -b_t)
//   geometry.c          m | mm | um
//   geometry.d          (dimensionless)
//   drive.v_rf          V | mV | kV
//   drive.omega_rf      rad/s | Hz | kHz | MHz | GHz   (Hz values are multiplied by 2 pi)
//   drive.v_ring        V | mV | kV
//   drive.v_top         V | mV | kV
//   drive.v_bottom      V | mV | kV
//
// Missing keys keep the built-in defaults (fitted trap, 171Yb+).

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ioncrystal/trap_model.hpp"

namespace ioncrystal {

struct TrapConfig {
  IonSpecies species = IonSpecies::ytterbium171();
  TrapGeometry geometry = TrapGeometry::fitted_default();
  DriveConfig drive = DriveConfig::fitted_default();
};

TrapConfig parse_config(std::istream& in);
TrapConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(render_config(c)) reproduces c.
std::string render_config(const TrapConfig& config);

}  // namespace ioncrystal
