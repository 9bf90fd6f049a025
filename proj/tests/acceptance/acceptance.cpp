// Acceptance suite. Prints one line per criterion:
//   criterion <k>: PASS|FAIL  <summary>  (<measured values>)
// Usage: acceptance [--criterion k]...

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

#include "ioncrystal/band_scan.hpp"
#include "ioncrystal/equilibrium.hpp"
#include "ioncrystal/linalg.hpp"
#include "ioncrystal/modes.hpp"
#include "ioncrystal/oracle.hpp"
#include "ioncrystal/spin_coupling.hpp"

using namespace ioncrystal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome criterion1() {
  Outcome o;
  std::mt19937_64 rng(2024);
  double worst_grad = 0.0, worst_hess = 0.0, worst_anchor = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = testing::random_stable_trap(rng);
    const std::size_t n = 2 + trial % 19;
    // Spread ions over about the crystal size with at least half the typical spacing.
    const double spacing = std::pow(t.beta1_sq, -1.0 / 3.0);
    const auto p = testing::random_config(n, spacing * std::sqrt(double(n)), 0.5 * spacing, rng);
    const auto x = p.flat();

    const auto g = gradient(t, p).flat();
    std::vector<double> fd(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) fd[a] = testing::fd_first(t, x, a, 1e-3 * spacing);
    double err = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) err = std::max(err, std::abs(g[a] - fd[a]));
    worst_grad = std::max(worst_grad, err / max_abs(fd));

    // Second differences use the long double potential, tied to the library one here.
    const double v = potential(t, p);
    const double v_ld = static_cast<double>(
        testing::potential_ld(t, std::vector<long double>(x.begin(), x.end())));
    worst_anchor = std::max(worst_anchor, std::abs(v - v_ld) / std::max(1.0, std::abs(v)));

    const Matrix k = spring_matrices(t, p).planar();
    double herr = 0.0, hscale = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      for (std::size_t b = a; b < x.size(); ++b) {
        const double d = testing::fd_second_ld(t, x, a, b, 1e-3 * spacing);
        herr = std::max(herr, std::abs(k(a, b) - d));
        hscale = std::max(hscale, std::abs(d));
      }
    }
    worst_hess = std::max(worst_hess, herr / hscale);
  }
  o.require(worst_grad < 1e-6, "gradient");
  o.require(worst_hess < 1e-6, "spring matrices");
  o.require(worst_anchor < 1e-13, "long double potential");
  o.detail << " (max rel err: gradient " << fmt(worst_grad) << ", spring " << fmt(worst_hess)
           << ", potential " << fmt(worst_anchor) << ")";
  return o;
}

struct Crystal {
  DimensionlessTrap trap;
  CrystalState state;
  ModeSpectrum spectrum;
};

std::vector<Crystal> crystal_set() {
  std::vector<Crystal> out;
  const double volts[][3] = {{46.3, 50, 50}, {10, 0, 0}, {60, 50, 70}, {94.9, 100, 100}};
  for (const auto& v : volts) {
    const auto t = testing::trap_at(v[0], v[1], v[2]);
    for (std::size_t n = 1; n <= 20; ++n) {
      auto s = solve_equilibrium(t, n);
      auto sp = solve_modes(build_spring_matrices(t, s));
      out.push_back({t, std::move(s), std::move(sp)});
    }
  }
  return out;
}

const std::vector<Crystal>& crystals() {
  static const std::vector<Crystal> set = crystal_set();
  return set;
}

Outcome criterion2() {
  Outcome o;
  double worst_val = 0.0, worst_vec = 0.0;
  for (const auto& c : crystals()) {
    const std::size_t n = c.state.n_ions();
    double best = 1e300;
    std::size_t idx = 0;
    for (std::size_t a = 0; a < n; ++a) {
      const double d = std::abs(c.spectrum.axial_eigenvalues[a] - c.trap.beta3_sq);
      if (d < best) best = d, idx = a;
    }
    worst_val = std::max(worst_val, best / c.trap.beta3_sq);
    for (std::size_t i = 0; i < n; ++i)
      worst_vec = std::max(worst_vec,
                           std::abs(std::abs(c.spectrum.axial_vectors(i, idx)) - 1.0 / std::sqrt(double(n))));
  }
  o.require(worst_val < 1e-10, "eigenvalue");
  o.require(worst_vec < 1e-10, "uniform eigenvector");
  o.detail << " (" << crystals().size() << " crystals; max rel err " << fmt(worst_val)
           << ", max vector deviation " << fmt(worst_vec) << ")";
  return o;
}

Outcome criterion3() {
  Outcome o;
  double worst_cos = 0.0;
  std::size_t checked = 0;
  for (const auto& c : crystals()) {
    const std::size_t n = c.state.n_ions();
    if (n < 2) continue;
    ++checked;
    const auto& eig = c.spectrum.planar_eigenvalues;
    std::size_t zeros = 0, idx = 0;
    for (std::size_t a = 0; a < eig.size(); ++a) {
      if (std::abs(eig[a]) < 1e-8) ++zeros;
      if (std::abs(eig[a]) < std::abs(eig[idx])) idx = a;
    }
    if (zeros != 1) {
      double second = 1e300;
      for (std::size_t a = 0; a < eig.size(); ++a)
        if (a != idx && std::abs(eig[a]) < std::abs(second)) second = eig[a];
      o.require(false, "N=" + std::to_string(n) + " beta1_sq=" + fmt(c.trap.beta1_sq) + " has " +
                           std::to_string(zeros) + " zero modes, next " + fmt(second) + " = " +
                           fmt(second / c.trap.beta1_sq) + " beta1_sq");
    }
    const double cosine =
        std::abs(dot(rotation_generator(c.state.positions), c.spectrum.planar_vectors.column(idx)));
    worst_cos = std::max(worst_cos, 1.0 - cosine);
  }
  o.require(worst_cos < 1e-8, "alignment with the rotation generator");
  o.detail << " (" << checked << " crystals; max 1-cos " << fmt(worst_cos) << ")";
  return o;
}

Outcome criterion4() {
  Outcome o;
  const double volts[][3] = {{0, 0, 0},    {46.3, 50, 50}, {94.9, 100, 100}, {10, 0, 0},
                             {20, 10, 10}, {30, 20, 20},   {55, 40, 40},     {60, 50, 70},
                             {85, 80, 80}, {70, 60, 60}};
  double worst = 0.0;
  for (const auto& v : volts) {
    const auto t = testing::trap_at(v[0], v[1], v[2]);
    o.require(t.stable, "voltage setting unstable");
    if (!t.stable) continue;
    const auto s = solve_equilibrium(t, 3);
    const double r = std::pow(std::sqrt(3.0) * t.beta1_sq, -1.0 / 3.0);
    for (std::size_t i = 0; i < 3; ++i) worst = std::max(worst, testing::rel_err(s.positions.radius(i), r));
  }
  o.require(worst < 1e-8, "circumradius");
  o.detail << " (max rel err " << fmt(worst) << ")";
  return o;
}

std::string counts(const std::vector<std::size_t>& c) {
  std::string s = "[";
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
  return s + "]";
}

Outcome criterion5() {
  Outcome o;
  const auto t = testing::paper_trap();
  double worst_gap = 0.0;
  o.detail << " (rings:";
  for (std::size_t n : {3, 4, 5, 10, 15, 16, 17, 18, 19, 20}) {
    const auto s = solve_equilibrium(t, n);
    const auto sh = shell_decomposition(s);
    o.detail << " N=" << n << counts(sh.ring_counts);
    if (n <= 5) o.require(sh.ring_counts.size() == 1, "N=" + std::to_string(n) + " single ring");
    if (n == 10) o.require(sh.ring_counts.front() == 3, "N=10 inner ring of 3");
    if (n == 15) o.require(sh.ring_counts.size() == 2, "N=15 two rings");
    if (n >= 16) o.require(sh.ring_counts.front() == 1, "N=" + std::to_string(n) + " center ion");
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      AnnealSchedule sch;
      sch.rng_seed = seed;
      const auto a = anneal(t, n, sch);
      worst_gap = std::max(worst_gap, s.energy - a.energy);
    }
  }
  o.require(worst_gap <= 1e-9, "annealing found a lower energy");
  o.detail << "; max Newton-anneal energy excess " << fmt(std::max(worst_gap, 0.0)) << ")";
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto sp = IonSpecies::ytterbium171();
  const auto g = TrapGeometry::fitted_default();
  DriveConfig d = DriveConfig::fitted_default();

  // V_r over the stable range at V_t = V_b = 50 V, 1 V steps.
  std::vector<double> ring;
  for (double v = 0.0; v <= 200.0; v += 1.0) {
    d.ring_dc = v;
    if (build_dimensionless(sp, g, d).stable) ring.push_back(v);
  }
  const auto scan = mode_band_scan(sp, g, d, 5, ring);
  double prev_axial = 1e300, prev_planar = -1e300;
  std::size_t points = 0;
  for (const auto& p : scan.points) {
    o.require(p.spectrum.has_value(), "sweep point failed at V_r=" + fmt(p.ring_dc));
    if (!p.spectrum) continue;
    ++points;
    const double top = p.spectrum->axial_freqs.back();
    double low = 1e300;
    for (std::size_t a = 0; a < p.spectrum->planar_freqs.size(); ++a)
      if (a != p.spectrum->zero_rotation_index) low = std::min(low, p.spectrum->planar_freqs[a]);
    o.require(top <= prev_axial * (1.0 + 1e-12), "max axial increased at V_r=" + fmt(p.ring_dc));
    o.require(low >= prev_planar * (1.0 - 1e-12), "min planar decreased at V_r=" + fmt(p.ring_dc));
    prev_axial = top;
    prev_planar = low;
  }
  o.detail << " (" << points << " points over V_r=" << fmt(ring.front()) << ".." << fmt(ring.back()) << " V";

  // Soft-mode onset at V_t = V_b = 100 V.
  d.top_dc = d.bottom_dc = 100.0;
  std::vector<double> high;
  for (double v = 0.0; v <= 200.0; v += 0.5) {
    d.ring_dc = v;
    if (build_dimensionless(sp, g, d).stable) high.push_back(v);
  }
  const auto soft = mode_band_scan(sp, g, d, 5, high);
  o.require(soft.first_soft_ring_dc.has_value(), "no soft axial mode before instability");
  if (soft.first_soft_ring_dc) {
    d.ring_dc = *soft.first_soft_ring_dc;
    const auto t = build_dimensionless(sp, g, d);
    o.require(t.stable, "soft mode only after beta-level instability");
    o.detail << "; soft at V_r=" << fmt(*soft.first_soft_ring_dc) << " V, beta-level limit "
             << fmt(high.back()) << " V";
  }
  o.detail << ")";
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto t = testing::trap_at(94.9, 100.0, 100.0);
  const std::vector<double> mus{1.001, 1.01, 1.1, 2.0, 11.0};
  o.detail << " (exponents";
  for (std::size_t n : {10, 20}) {
    const auto s = solve_equilibrium(t, n);
    const auto spec = solve_modes(build_spring_matrices(t, s));
    const auto entries = detuning_sweep(s, spec, mus);
    o.detail << " N=" << n << ":";
    double prev = -1e300;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      o.require(e.fit.has_value(), "fit failed at mu=" + fmt(mus[k]));
      if (!e.fit) continue;
      const double b = e.fit->exponent;
      o.detail << " " << fmt(b);
      o.require(b > -0.1 && b < 3.3, "N=" + std::to_string(n) + " exponent outside [-0.1, 3.3]");
      o.require(b >= prev, "N=" + std::to_string(n) + " exponent decreased at mu=" + fmt(mus[k]));
      prev = b;
      if (k == 0) o.require(b < 0.3, "N=" + std::to_string(n) + " exponent at mu=1.001 not < 0.3");
      if (k + 1 == entries.size())
        o.require(b > 2.0, "N=" + std::to_string(n) + " exponent at mu=11 not > 2");
    }
  }
  o.detail << ")";
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto t = testing::paper_trap();
  const auto s = solve_equilibrium(t, 2);
  const auto spec = solve_modes(build_spring_matrices(t, s));
  const double d = min_pair_distance(s.positions);
  const double stretch = (t.beta3_sq - 2.0 / (d * d * d)) / t.beta3_sq;
  const double mus[] = {0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 1.0001, 1.001, 1.01, 1.05,
                        1.1, 1.3, 1.5, 2.0, 3.0, 5.0, 11.0, 30.0, 100.0, 1000.0};
  double worst = 0.0;
  for (double mu : mus) {
    const auto c = compute_couplings(s, spec, mu);
    const double expect = 0.5 * (1.0 - stretch) / ((mu * mu - 1.0) * (mu * mu - stretch));
    worst = std::max(worst, testing::rel_err(c.j(0, 1), expect));
  }
  o.require(worst < 1e-12, "closed form");
  o.detail << " (20 detunings, max rel err " << fmt(worst) << ")";
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(IONCRYSTAL_ACCEPTANCE_CLI) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion9() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("ioncrystal_accept_" + std::to_string(::getpid()));
  const std::vector<std::string> commands{
      "stability", "equilibrium -n 12", "modes -n 5", "modes -n 5 --sweep 42:69:3",
      "couplings -n 10", "couplings -n 10 --mu 1,2"};
  std::size_t files = 0;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    const fs::path a = root / ("a" + std::to_string(k)), b = root / ("b" + std::to_string(k));
    const int ca = run_cli(commands[k] + " --out " + a.string());
    const int cb = run_cli(commands[k] + " --out " + b.string());
    o.require(ca == cb, commands[k] + " exit codes differ");
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) names.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b)) names.insert(e.path().filename().string());
    for (const auto& name : names) {
      ++files;
      o.require(fs::exists(a / name) && fs::exists(b / name) && slurp(a / name) == slurp(b / name),
                commands[k] + ": " + name + " differs");
    }
    o.require(run_cli(commands[k] + " --check --out " + a.string()) == ca || ca == 4,
              commands[k] + " --check");
  }
  fs::remove_all(root);
  o.detail << " (" << commands.size() << " commands, " << files << " files compared)";
  return o;
}

struct Criterion {
  int id;
  const char* summary;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "gradient and spring matrices match finite differences of the potential", criterion1},
      {2, "axial spectrum contains beta_3^2 with a uniform eigenvector", criterion2},
      {3, "exactly one planar zero mode, aligned with rotation", criterion3},
      {4, "three-ion circumradius equals (sqrt(3) beta_1^2)^(-1/3)", criterion4},
      {5, "shell structure at 46.3/50/50 V and annealing finds nothing lower", criterion5},
      {6, "mode-band trends in V_r and soft axial onset before beta instability", criterion6},
      {7, "coupling power-law exponents across the detuning list", criterion7},
      {8, "two-ion coupling matches the closed form", criterion8},
      {9, "CLI outputs are byte-identical across runs", criterion9},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion k]...\n";
      return 2;
    }
  }

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << c.id << ": " << (out.pass ? "PASS" : "FAIL") << "  " << c.summary
              << out.detail.str() << " [" << fmt(secs) << " s]" << std::endl;
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
