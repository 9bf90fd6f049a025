#include "ioncrystal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "ioncrystal/equilibrium.hpp"
#include "ioncrystal/errors.hpp"
#include "ioncrystal/kernels/coulomb.hpp"
#include "ioncrystal/random.hpp"

namespace ioncrystal {

namespace {

/// Plain double-loop gradient, kept separate from the solver's kernels.
std::vector<double> oracle_gradient(const DimensionlessTrap& trap, const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> g(2 * n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    double gx = trap.beta1_sq * x[m];
    double gy = trap.beta2_sq * y[m];
    for (std::size_t k = 0; k < n; ++k) {
      if (k == m) continue;
      const double dx = x[m] - x[k];
      const double dy = y[m] - y[k];
      const double r = std::sqrt(dx * dx + dy * dy);
      gx -= dx / (r * r * r);
      gy -= dy / (r * r * r);
    }
    g[m] = gx;
    g[n + m] = gy;
  }
  return g;
}

double energy_or_inf(const DimensionlessTrap& trap, const PlanarCoords& p) {
  try {
    return potential(trap, p);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

/// Nonmonotone Barzilai-Borwein descent with energy backtracking.
bool polish(const DimensionlessTrap& trap, PlanarCoords& p, double tolerance, int max_iter) {
  const std::size_t n = p.size();
  std::vector<double> g = oracle_gradient(trap, p.x1, p.x2);
  double e = energy_or_inf(trap, p);
  std::deque<double> recent{e};
  double alpha = 0.1 / std::max(trap.beta1_sq, 1e-12);
  alpha = std::min(alpha, 1.0);

  for (int it = 0; it < max_iter; ++it) {
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < tolerance) return true;

    double gg = 0.0;
    for (double v : g) gg += v * v;
    const double ref = *std::max_element(recent.begin(), recent.end());

    PlanarCoords trial = p;
    double t = alpha;
    double e_trial = 0.0;
    bool ok = false;
    for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) {
        trial.x1[i] = p.x1[i] - t * g[i];
        trial.x2[i] = p.x2[i] - t * g[n + i];
      }
      e_trial = energy_or_inf(trap, trial);
      if (e_trial <= ref - 1e-4 * t * gg ||
          (std::isfinite(e_trial) && std::abs(e_trial - e) <= 1e-13 * std::max(1.0, std::abs(e)))) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;

    const std::vector<double> g_new = oracle_gradient(trap, trial.x1, trial.x2);
    double sy = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sx = trial.x1[i] - p.x1[i], s2 = trial.x2[i] - p.x2[i];
      sy += sx * (g_new[i] - g[i]) + s2 * (g_new[n + i] - g[n + i]);
      ss += sx * sx + s2 * s2;
    }
    alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e6) : std::min(1.0, 2.0 * t);

    p = std::move(trial);
    g = g_new;
    e = e_trial;
    recent.push_back(e);
    if (recent.size() > 10) recent.pop_front();
  }
  double gmax = 0.0;
  for (double v : g) gmax = std::max(gmax, std::abs(v));
  return gmax < tolerance;
}

}  // namespace

void AnnealSchedule::validate() const {
  if (!(cooling_factor > 0.0 && cooling_factor < 1.0))
    throw ValidationError("cooling factor must lie in (0, 1)");
  if (sweeps < 1) throw ValidationError("need at least one sweep");
}

CrystalState anneal(const DimensionlessTrap& trap, std::size_t n_ions,
                    const AnnealSchedule& schedule) {
  schedule.validate();
  if (!trap.stable) throw ValidationError("trap is unstable: beta_1^2 or beta_3^2 not positive");
  if (n_ions == 0) throw ValidationError("need at least one ion");

  const auto& kern = kernels::active_kernels();
  const double length = std::cbrt(1.0 / trap.beta1_sq);
  Rng rng(schedule.rng_seed);

  PlanarCoords p(n_ions);
  const double disk = length * std::sqrt(static_cast<double>(n_ions));
  for (std::size_t i = 0; i < n_ions; ++i) {
    const double r = disk * std::sqrt(rng.uniform());
    const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    p.x1[i] = r * std::cos(a);
    p.x2[i] = r * std::sin(a);
  }

  // Energy of ion i against everyone else, plus its confinement.
  auto ion_energy = [&](std::size_t i, double x, double y) {
    const std::span xs(p.x1), ys(p.x2);
    const double pair = kern.pair_energy(x, y, xs.first(i), ys.first(i)) +
                        kern.pair_energy(x, y, xs.subspan(i + 1), ys.subspan(i + 1));
    return 0.5 * (trap.beta1_sq * x * x + trap.beta2_sq * y * y) + pair;
  };

  double temperature = schedule.initial_temperature > 0.0
                           ? schedule.initial_temperature
                           : 0.1 * std::pow(trap.beta1_sq, 1.0 / 3.0);
  double step = schedule.step_scale > 0.0 ? schedule.step_scale : 0.1 * length;

  for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
    std::size_t accepted = 0;
    for (std::size_t move = 0; move < n_ions; ++move) {
      const std::size_t i = static_cast<std::size_t>(rng.next() % n_ions);
      const double nx = p.x1[i] + rng.uniform(-step, step);
      const double ny = p.x2[i] + rng.uniform(-step, step);
      const double delta = ion_energy(i, nx, ny) - ion_energy(i, p.x1[i], p.x2[i]);
      if (!std::isfinite(delta)) continue;
      if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temperature)) {
        p.x1[i] = nx;
        p.x2[i] = ny;
        ++accepted;
      }
    }
    const double rate = static_cast<double>(accepted) / static_cast<double>(n_ions);
    if (rate < 0.3) step *= 0.9;
    if (rate > 0.5) step *= 1.1;
    temperature *= schedule.cooling_factor;
  }

  // max-norm is not rotation invariant; leave room for the gauge rotation below
  const bool polished = polish(trap, p, 2.5e-11, 200000);
  fix_rotation_gauge(p);

  CrystalState s;
  s.positions = std::move(p);
  s.plane_z = trap.plane_z;
  s.energy = potential(trap, s.positions);
  double gmax = 0.0;
  for (double v : oracle_gradient(trap, s.positions.x1, s.positions.x2))
    gmax = std::max(gmax, std::abs(v));
  s.gradient_norm = gmax;
  s.converged = polished && gmax < 1e-10;
  s.seed_id = static_cast<int>(schedule.rng_seed);
  return s;
}

namespace {

/// RMS distance after matching each ion of `b` to its nearest unused ion of
/// `a`, minimized over rotations that map some ion of b onto a's reference
/// ion, with and without reflection.
double aligned_rms(const PlanarCoords& a, const PlanarCoords& b) {
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  std::size_t ref = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (a.radius(i) > a.radius(ref)) ref = i;
  const double ref_angle = std::atan2(a.x2[ref], a.x1[ref]);

  double best = std::numeric_limits<double>::infinity();
  for (int reflect = 0; reflect < 2; ++reflect) {
    PlanarCoords base = b;
    if (reflect)
      for (auto& y : base.x2) y = -y;
    for (std::size_t k = 0; k < n; ++k) {
      PlanarCoords cand = base;
      cand.rotate(ref_angle - std::atan2(base.x2[k], base.x1[k]));
      std::vector<char> used(n, 0);
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double d_best = std::numeric_limits<double>::infinity();
        std::size_t pick = 0;
        for (std::size_t j = 0; j < n; ++j) {
          if (used[j]) continue;
          const double d = std::hypot(a.x1[i] - cand.x1[j], a.x2[i] - cand.x2[j]);
          if (d < d_best) {
            d_best = d;
            pick = j;
          }
        }
        used[pick] = 1;
        sum += d_best * d_best;
      }
      best = std::min(best, std::sqrt(sum / static_cast<double>(n)));
    }
  }
  return best;
}

}  // namespace

ComparisonReport energy_compare(const CrystalState& a, const CrystalState& b,
                                double radius_tolerance) {
  if (a.n_ions() != b.n_ions()) throw ValidationError("crystals have different ion counts");
  ComparisonReport r;
  r.energy_difference = a.energy - b.energy;
  const auto sa = shell_decomposition(a);
  const auto sb = shell_decomposition(b);
  r.ring_counts_a = sa.ring_counts;
  r.ring_counts_b = sb.ring_counts;
  r.alignment_rms = aligned_rms(a.positions, b.positions);
  if (sa.ring_counts == sb.ring_counts) {
    double scale = 1.0;
    for (std::size_t j = 0; j < sa.ring_radii.size(); ++j) {
      r.max_ring_radius_difference =
          std::max(r.max_ring_radius_difference, std::abs(sa.ring_radii[j] - sb.ring_radii[j]));
      scale = std::max(scale, sa.ring_radii[j]);
    }
    r.structural_match = r.max_ring_radius_difference <= radius_tolerance * scale;
  } else {
    r.max_ring_radius_difference = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace ioncrystal
