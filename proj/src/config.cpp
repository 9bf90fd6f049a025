#include "ioncrystal/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "ioncrystal/constants.hpp"
#include "ioncrystal/errors.hpp"
#include "ioncrystal/io.hpp"

namespace ioncrystal {

namespace {

enum class Quantity { kMass, kCharge, kLength, kVoltage, kAngularFrequency, kNone };

const std::map<std::string, Quantity>& key_table() {
  static const std::map<std::string, Quantity> table{
      {"species.mass", Quantity::kMass},         {"species.charge", Quantity::kCharge},
      {"geometry.r_o", Quantity::kLength},       {"geometry.a", Quantity::kLength},
      {"geometry.b_t", Quantity::kLength},       {"geometry.b_b", Quantity::kLength},
      {"geometry.c", Quantity::kLength},         {"geometry.d", Quantity::kNone},
      {"drive.v_rf", Quantity::kVoltage},        {"drive.omega_rf", Quantity::kAngularFrequency},
      {"drive.v_ring", Quantity::kVoltage},      {"drive.v_top", Quantity::kVoltage},
      {"drive.v_bottom", Quantity::kVoltage},
  };
  return table;
}

std::optional<double> unit_factor(Quantity q, const std::string& unit) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  static const std::map<std::string, double> mass{{"kg", 1.0}, {"u", constants::kAtomicMassUnit}};
  static const std::map<std::string, double> charge{{"C", 1.0},
                                                    {"e", constants::kElementaryCharge}};
  static const std::map<std::string, double> length{{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}};
  static const std::map<std::string, double> voltage{{"V", 1.0}, {"mV", 1e-3}, {"kV", 1e3}};
  static const std::map<std::string, double> omega{{"rad/s", 1.0},       {"Hz", two_pi},
                                                   {"kHz", two_pi * 1e3}, {"MHz", two_pi * 1e6},
                                                   {"GHz", two_pi * 1e9}};
  const std::map<std::string, double>* table = nullptr;
  switch (q) {
    case Quantity::kMass: table = &mass; break;
    case Quantity::kCharge: table = &charge; break;
    case Quantity::kLength: table = &length; break;
    case Quantity::kVoltage: table = &voltage; break;
    case Quantity::kAngularFrequency: table = &omega; break;
    case Quantity::kNone: return unit.empty() ? std::optional<double>(1.0) : std::nullopt;
  }
  const auto it = table->find(unit);
  if (it == table->end()) return std::nullopt;
  return it->second;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, int line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ValidationError("line " + std::to_string(line) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

TrapConfig parse_config(std::istream& in) {
  std::map<std::string, double> values;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("line " + std::to_string(line) + ": expected 'key = value unit'");
    }
    const std::string key = trim(text.substr(0, eq));
    const auto kt = key_table().find(key);
    if (kt == key_table().end()) {
      throw ValidationError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
    std::istringstream rhs(text.substr(eq + 1));
    std::string number, unit, extra;
    rhs >> number >> unit >> extra;
    if (number.empty() || !extra.empty()) {
      throw ValidationError("line " + std::to_string(line) + ": expected 'value unit'");
    }
    const auto factor = unit_factor(kt->second, unit);
    if (!factor) {
      throw ValidationError("line " + std::to_string(line) + ": " +
                            (unit.empty() ? "missing unit" : "unsupported unit '" + unit + "'") +
                            " for " + key);
    }
    if (values.contains(key)) {
      throw ValidationError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    values[key] = parse_number(number, line) * *factor;
  }

  TrapConfig cfg;
  auto get = [&](const char* key, double fallback) {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  };
  cfg.species.mass = get("species.mass", cfg.species.mass);
  cfg.species.charge = get("species.charge", cfg.species.charge);
  cfg.species.validate();

  const TrapGeometry& g = cfg.geometry;
  const double b_t = get("geometry.b_t", g.top_linear_length());
  cfg.geometry = TrapGeometry::with_bottom(
      get("geometry.r_o", g.ring_radius()), get("geometry.a", g.cap_axial_length()), b_t,
      get("geometry.b_b", -b_t), get("geometry.c", g.cap_radial_length()),
      get("geometry.d", g.cap_offset()));

  cfg.drive.rf_amplitude = get("drive.v_rf", cfg.drive.rf_amplitude);
  cfg.drive.rf_angular_frequency = get("drive.omega_rf", cfg.drive.rf_angular_frequency);
  cfg.drive.ring_dc = get("drive.v_ring", cfg.drive.ring_dc);
  cfg.drive.top_dc = get("drive.v_top", cfg.drive.top_dc);
  cfg.drive.bottom_dc = get("drive.v_bottom", cfg.drive.bottom_dc);
  cfg.drive.validate();
  return cfg;
}

TrapConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  return parse_config(in);
}

std::string render_config(const TrapConfig& c) {
  std::ostringstream os;
  auto line = [&](const char* key, double v, const char* unit) {
    os << key << " = " << format_number(v);
    if (*unit) os << ' ' << unit;
    os << '\n';
  };
  line("species.mass", c.species.mass, "kg");
  line("species.charge", c.species.charge, "C");
  line("geometry.r_o", c.geometry.ring_radius(), "m");
  line("geometry.a", c.geometry.cap_axial_length(), "m");
  line("geometry.b_t", c.geometry.top_linear_length(), "m");
  line("geometry.b_b", c.geometry.bottom_linear_length(), "m");
  line("geometry.c", c.geometry.cap_radial_length(), "m");
  line("geometry.d", c.geometry.cap_offset(), "");
  line("drive.v_rf", c.drive.rf_amplitude, "V");
  line("drive.omega_rf", c.drive.rf_angular_frequency, "rad/s");
  line("drive.v_ring", c.drive.ring_dc, "V");
  line("drive.v_top", c.drive.top_dc, "V");
  line("drive.v_bottom", c.drive.bottom_dc, "V");
  return os.str();
}

}  // namespace ioncrystal
