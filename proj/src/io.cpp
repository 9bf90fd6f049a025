#include "ioncrystal/io.hpp"

#include <cstdio>
#include <ostream>

namespace ioncrystal {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json to_json(const DimensionlessTrap& t) {
  return {{"beta1_sq", t.beta1_sq},         {"beta2_sq", t.beta2_sq},
          {"beta3_sq", t.beta3_sq},         {"beta_r3_sq", t.beta_r3_sq},
          {"beta_t3_sq", t.beta_t3_sq},     {"beta_b3_sq", t.beta_b3_sq},
          {"x_offset_top", t.x_offset_top}, {"x_offset_bottom", t.x_offset_bottom},
          {"plane_z", t.plane_z},           {"length_scale_m", t.length_scale},
          {"omega_psi3_rad_s", t.omega_psi3}, {"stable", t.stable}};
}

nlohmann::json to_json(const CrystalState& s, const ShellDecomposition& shells) {
  nlohmann::json positions = nlohmann::json::array();
  for (std::size_t i = 0; i < s.n_ions(); ++i) {
    positions.push_back({s.positions.x1[i], s.positions.x2[i]});
  }
  return {{"n_ions", s.n_ions()},
          {"positions", positions},
          {"plane_z", s.plane_z},
          {"energy", s.energy},
          {"gradient_norm", s.gradient_norm},
          {"converged", s.converged},
          {"seed_id", s.seed_id},
          {"iterations", s.iterations},
          {"axially_stable", s.axially_stable},
          {"min_axial_eigenvalue", s.min_axial_eigenvalue},
          {"min_planar_eigenvalue", s.min_planar_eigenvalue},
          {"shells",
           {{"ring_counts", shells.ring_counts},
            {"ring_radii", shells.ring_radii},
            {"ambiguous", shells.ambiguous}}}};
}

namespace {

nlohmann::json columns(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t c = 0; c < m.cols(); ++c) out.push_back(m.column(c));
  return out;
}

}  // namespace

nlohmann::json to_json(const ModeSpectrum& s) {
  nlohmann::json j{{"axial_eigenvalues", s.axial_eigenvalues},
                   {"axial_freqs", s.axial_freqs},
                   {"axial_vectors", columns(s.axial_vectors)},
                   {"planar_eigenvalues", s.planar_eigenvalues},
                   {"planar_freqs", s.planar_freqs},
                   {"planar_vectors", columns(s.planar_vectors)},
                   {"soft_axial", s.soft_axial},
                   {"soft_planar", s.soft_planar},
                   {"planar_zero_count", s.planar_zero_count}};
  j["zero_rotation_index"] =
      s.zero_rotation_index ? nlohmann::json(*s.zero_rotation_index) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const PowerLawFit& f) {
  return {{"exponent_b", f.exponent},
          {"prefactor", f.prefactor},
          {"r_squared", f.r_squared},
          {"n_pairs_used", f.pairs_used},
          {"n_pairs_dropped", f.pairs_dropped}};
}

void write_positions_csv(std::ostream& os, const CrystalState& s,
                         const ShellDecomposition& shells) {
  os << "index,x1,x2,radius,ring\n";
  for (std::size_t i = 0; i < s.n_ions(); ++i) {
    os << i << ',' << format_number(s.positions.x1[i]) << ','
       << format_number(s.positions.x2[i]) << ',' << format_number(s.positions.radius(i)) << ','
       << shells.ring_of_ion[i] << '\n';
  }
}

void write_stability_csv(std::ostream& os, const StabilityMap& map) {
  os << "V_r,V_tb,beta1_sq,beta3_sq,stable\n";
  for (const auto& p : map.points) {
    os << format_number(p.ring_dc) << ',' << format_number(p.cap_dc) << ','
       << format_number(p.beta1_sq) << ',' << format_number(p.beta3_sq) << ','
       << (p.stable ? 1 : 0) << '\n';
  }
}

void write_spectrum_csv(std::ostream& os, double ring_dc, const ModeSpectrum& s) {
  const std::string vr = format_number(ring_dc);
  for (std::size_t i = 0; i < s.axial_freqs.size(); ++i)
    os << vr << ",axial," << i << ',' << format_number(s.axial_freqs[i]) << '\n';
  for (std::size_t i = 0; i < s.planar_freqs.size(); ++i)
    os << vr << ",planar," << i << ',' << format_number(s.planar_freqs[i]) << '\n';
}

void write_band_csv(std::ostream& os, const BandScan& scan) {
  os << "V_r,mode_kind,mode_index,frequency\n";
  for (const auto& p : scan.points) {
    if (p.spectrum) write_spectrum_csv(os, p.ring_dc, *p.spectrum);
  }
}

void write_pairs_csv(std::ostream& os, const std::vector<DetuningEntry>& entries) {
  os << "mu,m,n,r_mn,J_mn\n";
  for (const auto& e : entries) {
    if (!e.result) continue;
    const std::string mu = format_number(e.detuning);
    for (const auto& p : e.result->pairs) {
      os << mu << ',' << p.m << ',' << p.n << ',' << format_number(p.distance) << ','
         << format_number(p.coupling) << '\n';
    }
  }
}

nlohmann::json fit_summary(const std::vector<DetuningEntry>& entries) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json item{{"mu", e.detuning}};
    if (e.fit) {
      item["exponent_b"] = e.fit->exponent;
      item["r_squared"] = e.fit->r_squared;
      item["n_pairs_used"] = e.fit->pairs_used;
    }
    if (!e.error.empty()) item["error"] = e.error;
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace ioncrystal
