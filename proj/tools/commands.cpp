#include "commands.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ioncrystal/band_scan.hpp"
#include "ioncrystal/config.hpp"
#include "ioncrystal/equilibrium.hpp"
#include "ioncrystal/errors.hpp"
#include "ioncrystal/io.hpp"
#include "ioncrystal/kernels/coulomb.hpp"
#include "ioncrystal/modes.hpp"
#include "ioncrystal/spin_coupling.hpp"

namespace ioncrystal::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

/// Files produced by one command, written together with their manifest.
class OutputSet {
 public:
  OutputSet(const CommonOptions& common, std::string command, json parameters)
      : common_(common), command_(std::move(command)), parameters_(std::move(parameters)) {}

  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }

  /// Writes files and manifest, or in check mode compares against the
  /// existing manifest. Returns false on a check mismatch.
  bool commit(std::ostream& log) const {
    const fs::path manifest_path = common_.out_dir / (command_ + ".manifest.json");
    json outputs = json::array();
    for (const auto& [name, content] : files_) {
      outputs.push_back({{"path", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }
    json manifest{{"tool", "ioncrystal"},
                  {"version", kToolVersion},
                  {"command", command_},
                  {"config_path", common_.config_path},
                  {"parameters", parameters_},
                  {"outputs", outputs}};

    if (common_.check) {
      std::ifstream in(manifest_path);
      if (!in) {
        log << "check: no manifest at " << manifest_path.string() << '\n';
        return false;
      }
      const json recorded = json::parse(in, nullptr, false);
      bool ok = !recorded.is_discarded() && recorded.value("outputs", json()) == outputs;
      for (const auto& [name, content] : files_) {
        std::ifstream f(common_.out_dir / name, std::ios::binary);
        std::stringstream buf;
        buf << f.rdbuf();
        if (!f || sha256_hex(buf.str()) != sha256_hex(content)) {
          log << "check: " << name << " differs from a fresh run\n";
          ok = false;
        }
      }
      log << (ok ? "check: outputs match manifest\n" : "check: MISMATCH\n");
      return ok;
    }

    fs::create_directories(common_.out_dir);
    for (const auto& [name, content] : files_) {
      std::ofstream out(common_.out_dir / name, std::ios::binary);
      out << content;
    }
    std::ofstream out(manifest_path, std::ios::binary);
    out << manifest.dump(2) << '\n';
    return true;
  }

 private:
  CommonOptions common_;
  std::string command_;
  json parameters_;
  std::vector<std::pair<std::string, std::string>> files_;
};

TrapConfig resolve_config(const CommonOptions& c) {
  TrapConfig cfg = c.config_path.empty() ? TrapConfig{} : load_config(c.config_path);
  if (c.ring_dc) cfg.drive.ring_dc = *c.ring_dc;
  if (c.top_dc) cfg.drive.top_dc = *c.top_dc;
  if (c.bottom_dc) cfg.drive.bottom_dc = *c.bottom_dc;
  cfg.drive.validate();
  return cfg;
}

json drive_json(const DriveConfig& d) {
  return {{"V_rf", d.rf_amplitude},
          {"Omega_rf", d.rf_angular_frequency},
          {"V_r", d.ring_dc},
          {"V_t", d.top_dc},
          {"V_b", d.bottom_dc}};
}

json axis_json(const VoltageAxis& a) {
  return {{"start", a.start}, {"stop", a.stop}, {"step", a.step}};
}

SolverOptions solver_options(const SolveOptions& o) {
  SolverOptions s;
  s.seed_count = o.seeds;
  s.rng_seed = o.rng_seed;
  s.max_iterations = o.max_iterations;
  return s;
}

json solve_parameters(const SolveOptions& o, const TrapConfig& cfg) {
  return {{"n_ions", o.n_ions},
          {"seeds", o.seeds == 0 ? default_seed_count(o.n_ions) : o.seeds},
          {"rng_seed", o.rng_seed},
          {"max_iterations", o.max_iterations},
          {"drive", drive_json(cfg.drive)}};
}

DimensionlessTrap stable_trap(const TrapConfig& cfg, std::ostream& log) {
  const DimensionlessTrap trap = build_dimensionless(cfg.species, cfg.geometry, cfg.drive);
  if (!trap.stable) {
    log << "error: no stable crystal at V_r=" << cfg.drive.ring_dc << " V, V_t=" << cfg.drive.top_dc
        << " V, V_b=" << cfg.drive.bottom_dc << " V (beta1^2=" << trap.beta1_sq
        << ", beta3^2=" << trap.beta3_sq << "); both must be positive\n";
    throw ValidationError("unstable trap");
  }
  return trap;
}

/// Maps library exceptions onto exit codes.
template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    log << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    log << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kFailure;
  }
}

std::string crystal_json_text(const DimensionlessTrap& trap, const CrystalState& s) {
  json j = to_json(s, shell_decomposition(s));
  j["trap"] = to_json(trap);
  return j.dump(2) + "\n";
}

std::string positions_csv(const CrystalState& s) {
  std::ostringstream os;
  write_positions_csv(os, s, shell_decomposition(s));
  return os.str();
}

}  // namespace

VoltageAxis parse_axis(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size())
      throw ValidationError("bad voltage range '" + text + "'");
    parts.push_back(v);
  }
  if (parts.size() == 1) return {parts[0], parts[0], 1.0};
  if (parts.size() != 3) throw ValidationError("voltage range must be start:stop:step");
  return {parts[0], parts[1], parts[2]};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size())
      throw ValidationError("bad number '" + item + "' in list");
    out.push_back(v);
  }
  return out;
}

int run_stability(const StabilityOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const TrapConfig cfg = resolve_config(opts.common);
    const StabilityMap map = stability_scan(cfg.species, cfg.geometry, cfg.drive, opts.ring, opts.cap);
    std::ostringstream csv;
    write_stability_csv(csv, map);

    OutputSet out(opts.common, "stability",
                  {{"ring_axis", axis_json(opts.ring)},
                   {"cap_axis", axis_json(opts.cap)},
                   {"drive", drive_json(cfg.drive)}});
    out.add("stability.csv", csv.str());
    log << "stable points: " << map.stable_count() << " of " << map.points.size()
        << (map.stable_region_simply_connected() ? " (simply connected)\n"
                                                 : " (not simply connected)\n");
    return out.commit(log) ? kOk : kFailure;
  });
}

int run_equilibrium(const SolveOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const TrapConfig cfg = resolve_config(opts.common);
    const DimensionlessTrap trap = stable_trap(cfg, log);
    OutputSet out(opts.common, "equilibrium", solve_parameters(opts, cfg));
    int code = kOk;
    CrystalState state;
    try {
      state = solve_equilibrium(trap, opts.n_ions, solver_options(opts));
    } catch (const ConvergenceError& e) {
      log << "error: " << e.what() << "; writing best partial state\n";
      state = e.best();
      code = kNonConvergence;
    }
    const auto shells = shell_decomposition(state);
    out.add("equilibrium.csv", positions_csv(state));
    out.add("equilibrium.json", crystal_json_text(trap, state));
    log << "N=" << opts.n_ions << " energy=" << format_number(state.energy) << " rings=[";
    for (std::size_t i = 0; i < shells.ring_counts.size(); ++i)
      log << (i ? "," : "") << shells.ring_counts[i];
    log << "]" << (state.axially_stable ? "" : " (axially unstable: zig-zag)") << '\n';
    if (!out.commit(log)) return static_cast<int>(kFailure);
    return code;
  });
}

int run_modes(const ModesOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const TrapConfig cfg = resolve_config(opts.solve.common);
    json params = solve_parameters(opts.solve, cfg);
    if (opts.sweep) params["sweep"] = axis_json(*opts.sweep);
    OutputSet out(opts.solve.common, "modes", params);

    if (!opts.sweep) {
      const DimensionlessTrap trap = stable_trap(cfg, log);
      CrystalState state;
      try {
        state = solve_equilibrium(trap, opts.solve.n_ions, solver_options(opts.solve));
      } catch (const ConvergenceError& e) {
        log << "error: " << e.what() << '\n';
        out.add("equilibrium.json", crystal_json_text(trap, e.best()));
        out.commit(log);
        return static_cast<int>(kNonConvergence);
      }
      const ModeSpectrum spectrum = solve_modes(build_spring_matrices(trap, state));
      std::ostringstream csv;
      csv << "V_r,mode_kind,mode_index,frequency\n";
      write_spectrum_csv(csv, cfg.drive.ring_dc, spectrum);
      json j{{"V_r", cfg.drive.ring_dc}, {"trap", to_json(trap)}, {"spectrum", to_json(spectrum)}};
      out.add("modes.csv", csv.str());
      out.add("modes.json", j.dump(2) + "\n");
      log << "axial modes: " << spectrum.axial_freqs.size()
          << ", planar modes: " << spectrum.planar_freqs.size()
          << (spectrum.soft_axial ? " (soft axial mode)" : "") << '\n';
      return out.commit(log) ? static_cast<int>(kOk) : static_cast<int>(kFailure);
    }

    const BandScan scan = mode_band_scan(cfg.species, cfg.geometry, cfg.drive, opts.solve.n_ions,
                                         opts.sweep->values(), solver_options(opts.solve));
    std::ostringstream csv;
    write_band_csv(csv, scan);
    json points = json::array();
    bool partial = false;
    for (const auto& p : scan.points) {
      json item{{"V_r", p.ring_dc}, {"beta1_sq", p.trap.beta1_sq}, {"beta3_sq", p.trap.beta3_sq}};
      if (p.spectrum) item["soft_axial"] = p.spectrum->soft_axial;
      if (!p.error.empty()) {
        item["error"] = p.error;
        partial = true;
      }
      points.push_back(std::move(item));
    }
    json j{{"points", points},
           {"first_soft_V_r",
            scan.first_soft_ring_dc ? json(*scan.first_soft_ring_dc) : json(nullptr)}};
    out.add("modes.csv", csv.str());
    out.add("modes.json", j.dump(2) + "\n");
    if (scan.first_soft_ring_dc)
      log << "soft axial mode first at V_r=" << format_number(*scan.first_soft_ring_dc) << " V\n";
    if (!out.commit(log)) return static_cast<int>(kFailure);
    return partial ? static_cast<int>(kPartial) : static_cast<int>(kOk);
  });
}

int run_couplings(const CouplingsOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const TrapConfig cfg = resolve_config(opts.solve.common);
    if (opts.detunings.empty()) {
      log << "no detunings requested; nothing to do\n";
      return static_cast<int>(kOk);
    }
    const DimensionlessTrap trap = stable_trap(cfg, log);
    json params = solve_parameters(opts.solve, cfg);
    params["detunings"] = opts.detunings;
    OutputSet out(opts.solve.common, "couplings", params);

    CrystalState state;
    try {
      state = solve_equilibrium(trap, opts.solve.n_ions, solver_options(opts.solve));
    } catch (const ConvergenceError& e) {
      log << "error: " << e.what() << '\n';
      return static_cast<int>(kNonConvergence);
    }
    const ModeSpectrum spectrum = solve_modes(build_spring_matrices(trap, state));
    const auto entries = detuning_sweep(state, spectrum, opts.detunings);

    std::ostringstream csv;
    write_pairs_csv(csv, entries);
    out.add("couplings.csv", csv.str());
    out.add("couplings_fit.json", fit_summary(entries).dump(2) + "\n");

    bool partial = false;
    for (const auto& e : entries) {
      if (e.fit) {
        log << "mu=" << format_number(e.detuning) << " b=" << format_number(e.fit->exponent) << '\n';
      } else {
        log << "mu=" << format_number(e.detuning) << " error: " << e.error << '\n';
        partial = true;
      }
    }
    if (!out.commit(log)) return static_cast<int>(kFailure);
    return partial ? static_cast<int>(kPartial) : static_cast<int>(kOk);
  });
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Ion crystals, normal modes and Ising couplings in an oblate Paul trap"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto add_common = [](CLI::App* sub, CommonOptions& c) {
    sub->add_option("--config", c.config_path, "Trap configuration file (default: built-in)");
    sub->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
    sub->add_flag("--check", c.check, "Re-run and verify outputs against the existing manifest");
    sub->add_option("--vr", c.ring_dc, "Ring DC voltage [V]");
    sub->add_option("--vt", c.top_dc, "Top end-cap voltage [V]");
    sub->add_option("--vb", c.bottom_dc, "Bottom end-cap voltage [V]");
  };
  auto add_solve = [&](CLI::App* sub, SolveOptions& s) {
    add_common(sub, s.common);
    sub->add_option("-n,--ions", s.n_ions, "Number of ions")->capture_default_str();
    sub->add_option("--seeds", s.seeds, "Initial configurations (0: 20 for N<=10, else 50)");
    sub->add_option("--rng-seed", s.rng_seed, "Seed for initial configurations")
        ->capture_default_str();
    sub->add_option("--max-iterations", s.max_iterations, "Newton iterations per seed")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };

  StabilityOptions stab;
  std::string ring_range = "0:100:1", cap_range = "0:100:1";
  auto* s1 = app.add_subcommand("stability", "Scan the stable region over (V_r, V_t = V_b)");
  add_common(s1, stab.common);
  s1->add_option("--vr-range", ring_range, "Ring voltages start:stop:step")->capture_default_str();
  s1->add_option("--vtb-range", cap_range, "End-cap voltages start:stop:step")
      ->capture_default_str();

  SolveOptions eq;
  auto* s2 = app.add_subcommand("equilibrium", "Planar equilibrium positions and shells");
  add_solve(s2, eq);

  ModesOptions modes;
  std::string sweep;
  auto* s3 = app.add_subcommand("modes", "Axial and planar normal modes");
  add_solve(s3, modes.solve);
  s3->add_option("--sweep", sweep, "Sweep V_r as start:stop:step");

  CouplingsOptions coup;
  std::string mu_text;
  auto* s4 = app.add_subcommand("couplings", "Ising couplings and power-law fits");
  add_solve(s4, coup.solve);
  auto* mu_opt = s4->add_option("--mu", mu_text,
                                "Comma-separated detunings in units of w_CM "
                                "(default 1.001,1.01,1.1,2,11)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(kValidation);
  }

  try {
    if (*s1) {
      stab.ring = parse_axis(ring_range);
      stab.cap = parse_axis(cap_range);
      return run_stability(stab, std::cerr);
    }
    if (*s2) return run_equilibrium(eq, std::cerr);
    if (*s3) {
      if (!sweep.empty()) modes.sweep = parse_axis(sweep);
      return run_modes(modes, std::cerr);
    }
    if (*s4) {
      if (mu_opt->count() > 0) coup.detunings = parse_list(mu_text);
      return run_couplings(coup, std::cerr);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kFailure;
}

}  // namespace ioncrystal::cli
