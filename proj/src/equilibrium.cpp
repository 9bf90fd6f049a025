#include "ioncrystal/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <utility>

#include "ioncrystal/errors.hpp"
#include "ioncrystal/linalg.hpp"
#include "ioncrystal/modes.hpp"
#include "ioncrystal/random.hpp"

namespace ioncrystal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSeedPerturbation = 1e-3;
constexpr double kSeedMinDistance = 0.1;

using Partition = std::vector<std::size_t>;

/// Ring radii for a partition with nominal nearest-neighbour spacing 1.
std::vector<double> ring_radii_for(const Partition& p) {
  std::vector<double> radii;
  for (std::size_t k : p) {
    double r = k >= 2 ? static_cast<double>(k) / kTwoPi : 0.0;
    if (!radii.empty()) r = std::max(r, radii.back() + 1.0);
    radii.push_back(r);
  }
  return radii;
}

/// Mismatch between arc spacing and radial spacing of a ring construction.
double partition_score(const Partition& p) {
  const auto radii = ring_radii_for(p);
  double score = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] < 2) continue;
    score += std::abs(kTwoPi * radii[j] / static_cast<double>(p[j]) - 1.0);
  }
  return score;
}

/// Non-decreasing ring occupancies, innermost ring 1..6, outer rings >= 5,
/// at most four rings.
std::vector<Partition> ring_partitions(std::size_t n) {
  std::vector<Partition> out;
  Partition cur;
  std::function<void(std::size_t)> rec = [&](std::size_t remaining) {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    if (cur.size() == 4) return;
    const std::size_t lo = cur.empty() ? 1 : std::max<std::size_t>(cur.back(), 5);
    const std::size_t hi = cur.empty() ? std::min<std::size_t>(remaining, 6) : remaining;
    for (std::size_t k = lo; k <= hi; ++k) {
      if (k == remaining || remaining - k >= std::max<std::size_t>(k, 5)) {
        cur.push_back(k);
        rec(remaining - k);
        cur.pop_back();
      }
    }
  };
  rec(n);
  const Partition single{n};
  std::stable_sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) {
    return partition_score(a) < partition_score(b);
  });
  // The single ring always leads.
  std::erase(out, single);
  out.insert(out.begin(), single);
  return out;
}

PlanarCoords ring_seed(const Partition& p, Rng& rng) {
  const auto radii = ring_radii_for(p);
  PlanarCoords pos;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double phase = rng.uniform(0.0, kTwoPi);
    for (std::size_t k = 0; k < p[j]; ++k) {
      const double ang = phase + kTwoPi * static_cast<double>(k) / static_cast<double>(p[j]);
      pos.x1.push_back(radii[j] * std::cos(ang));
      pos.x2.push_back(radii[j] * std::sin(ang));
    }
  }
  return pos;
}

PlanarCoords lattice_seed(std::size_t n, Rng& rng) {
  const double cx = rng.uniform(0.0, 1.0);
  const double cy = rng.uniform(0.0, std::sqrt(3.0) / 2.0);
  const double rot = rng.uniform(0.0, kTwoPi);
  const int span = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + 2;
  struct Site {
    double x, y, d2;
  };
  std::vector<Site> sites;
  for (int i = -span; i <= span; ++i) {
    for (int j = -span; j <= span; ++j) {
      const double x = i + 0.5 * j - cx;
      const double y = j * std::sqrt(3.0) / 2.0 - cy;
      sites.push_back({x, y, x * x + y * y});
    }
  }
  std::stable_sort(sites.begin(), sites.end(),
                   [](const Site& a, const Site& b) { return a.d2 < b.d2; });
  PlanarCoords pos;
  for (std::size_t k = 0; k < n; ++k) {
    pos.x1.push_back(sites[k].x);
    pos.x2.push_back(sites[k].y);
  }
  pos.rotate(rot);
  return pos;
}

PlanarCoords random_disk_seed(std::size_t n, Rng& rng) {
  const double radius = std::sqrt(static_cast<double>(n));
  PlanarCoords pos;
  while (pos.size() < n) {
    const double r = radius * std::sqrt(rng.uniform());
    const double ang = rng.uniform(0.0, kTwoPi);
    const double x = r * std::cos(ang), y = r * std::sin(ang);
    bool ok = true;
    for (std::size_t k = 0; k < pos.size() && ok; ++k) {
      ok = std::hypot(x - pos.x1[k], y - pos.x2[k]) > kSeedMinDistance;
    }
    if (ok) {
      pos.x1.push_back(x);
      pos.x2.push_back(y);
    }
  }
  return pos;
}

void perturb(PlanarCoords& p, Rng& rng) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    p.x1[i] += rng.uniform(-kSeedPerturbation, kSeedPerturbation);
    p.x2[i] += rng.uniform(-kSeedPerturbation, kSeedPerturbation);
  }
}

double safe_potential(const DimensionlessTrap& trap, const PlanarCoords& p) {
  try {
    return potential(trap, p);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

/// Rescales so confinement and Coulomb energies satisfy the virial balance
/// A s^2 = C / s, the exact optimum over uniform dilations.
void virial_rescale(const DimensionlessTrap& trap, PlanarCoords& p) {
  if (p.size() < 2) return;
  double confinement = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    confinement += trap.beta1_sq * p.x1[i] * p.x1[i] + trap.beta2_sq * p.x2[i] * p.x2[i];
  const double coulomb = coulomb_energy(p);
  if (confinement > 0.0 && std::isfinite(coulomb)) p.scale(std::cbrt(coulomb / confinement));
}

double angle_of(double x, double y) {
  double a = std::atan2(y, x);
  if (a < 0.0) a += kTwoPi;
  if (a > kTwoPi - 1e-12) a = 0.0;
  return a;
}

/// Sorts ions by ring (innermost first), then by polar angle.
void canonical_order(PlanarCoords& p) {
  const auto shells = shell_decomposition(p);
  std::vector<std::size_t> idx(p.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<double> ang(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) ang[i] = angle_of(p.x1[i], p.x2[i]);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (shells.ring_of_ion[a] != shells.ring_of_ion[b])
      return shells.ring_of_ion[a] < shells.ring_of_ion[b];
    return ang[a] < ang[b];
  });
  PlanarCoords out(p.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out.x1[k] = p.x1[idx[k]];
    out.x2[k] = p.x2[idx[k]];
  }
  p = std::move(out);
}

/// Lowest planar Hessian eigenpair once the rotational direction is removed.
std::pair<double, std::vector<double>> lowest_nonrotational_mode(const DimensionlessTrap& trap,
                                                                 const PlanarCoords& p) {
  const Matrix h = spring_matrices(trap, p).planar();
  const auto eig = jacobi_eigen(h);
  const auto u = rotation_generator(p);
  std::size_t rot = eig.values.size();
  if (p.size() >= 2) {
    double best = -1.0;
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
      const double overlap = std::abs(dot(eig.vectors.column(k), u));
      if (overlap > best) {
        best = overlap;
        rot = k;
      }
    }
  }
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    if (k != rot) return {eig.values[k], eig.vectors.column(k)};
  }
  return {std::numeric_limits<double>::infinity(), {}};
}

/// Newton step -H^-1 g with the free rotation pinned; the diagonal is shifted
/// until the system factors unless `strict`, in which case an indefinite
/// Hessian gives no step.
std::optional<std::vector<double>> newton_step(const DimensionlessTrap& trap,
                                               const PlanarCoords& x,
                                               const std::vector<double>& g,
                                               bool strict = false) {
  Matrix h = spring_matrices(trap, x).planar();
  const std::size_t n = x.size();
  const std::size_t dim = h.rows();
  double shift = 0.0;
  for (std::size_t i = 0; i < dim; ++i) shift += std::abs(h(i, i));
  shift = std::max(shift / static_cast<double>(dim), 1e-12);
  if (n >= 2) {
    // Pins the free rotation so the Newton system stays nonsingular.
    const auto u = rotation_generator(x);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) h(i, j) += shift * u[i] * u[j];
  }

  std::optional<Matrix> factor;
  double damping = 0.0;
  for (int attempt = 0; attempt < (strict ? 1 : 60) && !factor; ++attempt) {
    Matrix damped = h;
    for (std::size_t i = 0; i < dim; ++i) damped(i, i) += damping;
    factor = cholesky(damped);
    damping = damping == 0.0 ? 1e-8 * shift : damping * 4.0;
  }
  if (!factor) return std::nullopt;
  std::vector<double> step = cholesky_solve(*factor, g);
  for (auto& v : step) v = -v;
  return step;
}


}  // namespace

std::size_t default_seed_count(std::size_t n_ions) { return n_ions <= 10 ? 20 : 50; }

std::vector<Seed> generate_seeds(std::size_t n_ions, std::size_t count, std::uint64_t rng_seed) {
  if (count == 0) throw ValidationError("seed count must be at least 1");
  if (n_ions == 0) throw ValidationError("need at least one ion");
  Rng rng(rng_seed);
  std::vector<Seed> seeds;
  int id = 0;

  const auto partitions = ring_partitions(n_ions);
  const std::size_t n_rings =
      std::min(partitions.size(), std::max<std::size_t>(1, (2 * count + 4) / 5));
  for (std::size_t k = 0; k < n_rings && seeds.size() < count; ++k) {
    PlanarCoords p = ring_seed(partitions[k], rng);
    perturb(p, rng);
    seeds.push_back({id++, "rings", std::move(p)});
  }
  const std::size_t n_lattice = seeds.size() + (count - seeds.size() + 1) / 2;
  while (seeds.size() < std::min(count, n_lattice) && n_ions >= 3) {
    PlanarCoords p = lattice_seed(n_ions, rng);
    perturb(p, rng);
    seeds.push_back({id++, "lattice", std::move(p)});
  }
  while (seeds.size() < count) {
    seeds.push_back({id++, "random", random_disk_seed(n_ions, rng)});
  }
  return seeds;
}

void fix_rotation_gauge(PlanarCoords& p) {
  if (p.size() == 0) return;
  double rmax = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) rmax = std::max(rmax, p.radius(i));
  if (rmax == 0.0) return;
  std::size_t pick = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.radius(i) >= rmax * (1.0 - 1e-9)) {
      pick = i;
      break;
    }
  }
  p.rotate(-std::atan2(p.x2[pick], p.x1[pick]));
  p.x1[pick] = p.radius(pick);
  p.x2[pick] = 0.0;
}

CrystalState minimize_from(const DimensionlessTrap& trap, const PlanarCoords& start,
                           const SolverOptions& options, int seed_id) {
  if (!trap.stable) throw ValidationError("trap is unstable: beta_1^2 or beta_3^2 not positive");
  const std::size_t n = start.size();
  if (n == 0) throw ValidationError("need at least one ion");

  PlanarCoords x = start;
  double energy = safe_potential(trap, x);
  if (!std::isfinite(energy)) throw DomainError("initial configuration has coincident ions");

  // Typical displacement for saddle escapes.
  const double length = std::cbrt(1.0 / trap.beta1_sq);
  int escapes = 0;
  int it = 0;
  bool converged = false;

  while (it < options.max_iterations) {
    const std::vector<double> g = gradient(trap, x).flat();
    const double gn = max_abs(g);
    if (gn < options.tolerance) {
      if (n >= 2 && escapes < options.saddle_escapes) {
        auto [lowest, v] = lowest_nonrotational_mode(trap, x);
        if (lowest < kSoftEigenvalue) {
          const auto flat = x.flat();
          std::vector<double> kicked(flat.size());
          for (std::size_t i = 0; i < flat.size(); ++i) kicked[i] = flat[i] + 0.05 * length * v[i];
          x = PlanarCoords::from_flat(kicked);
          energy = safe_potential(trap, x);
          ++escapes;
          continue;
        }
      }
      converged = true;
      break;
    }
    ++it;

    const auto newton = newton_step(trap, x, g);
    if (!newton) break;
    const std::vector<double>& step = *newton;

    const double slope = dot(g, step);
    const auto flat = x.flat();
    bool accepted = false;
    double t = 1.0;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      std::vector<double> trial(flat.size());
      for (std::size_t i = 0; i < flat.size(); ++i) trial[i] = flat[i] + t * step[i];
      PlanarCoords candidate = PlanarCoords::from_flat(trial);
      const double e = safe_potential(trap, candidate);
      if (!std::isfinite(e)) continue;
      bool ok = e <= energy + 1e-4 * t * slope;
      if (!ok && std::abs(e - energy) <= 1e-12 * std::max(1.0, std::abs(energy))) {
        // Energy differences are at roundoff level; judge by the gradient.
        ok = max_abs(gradient(trap, candidate).flat()) < gn;
      }
      if (ok) {
        x = std::move(candidate);
        energy = e;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  if (converged) {
    // Full Newton steps down to roundoff, staying on local minima. Soft modes
    // can overshoot first, so keep the best state seen.
    PlanarCoords y = x;
    double best = max_abs(gradient(trap, x).flat());
    for (int k = 0; k < 8; ++k) {
      const auto g = gradient(trap, y).flat();
      const auto step = newton_step(trap, y, g, true);
      if (!step) break;
      if (max_abs(g) < best) {
        best = max_abs(g);
        x = y;
      }
      auto trial = y.flat();
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += (*step)[i];
      y = PlanarCoords::from_flat(trial);
      if (!std::isfinite(safe_potential(trap, y))) break;
    }
  }

  fix_rotation_gauge(x);
  canonical_order(x);

  CrystalState s;
  s.positions = std::move(x);
  s.plane_z = trap.plane_z;
  s.energy = potential(trap, s.positions);
  s.gradient_norm = max_abs(gradient(trap, s.positions).flat());
  s.converged = converged && s.gradient_norm < options.tolerance;
  s.seed_id = seed_id;
  s.iterations = it;

  const SpringMatrices k = spring_matrices(trap, s.positions);
  const auto axial = jacobi_eigen(k.k33);
  s.min_axial_eigenvalue = axial.values.front();
  s.axially_stable = s.min_axial_eigenvalue > 0.0;
  s.min_planar_eigenvalue = lowest_nonrotational_mode(trap, s.positions).first;
  return s;
}

std::vector<CrystalState> solve_all_seeds(const DimensionlessTrap& trap,
                                          const std::vector<Seed>& seeds,
                                          const SolverOptions& options) {
  if (!trap.stable) throw ValidationError("trap is unstable: beta_1^2 or beta_3^2 not positive");
  const double length = std::cbrt(1.0 / trap.beta1_sq);
  std::vector<CrystalState> out;
  out.reserve(seeds.size());
  for (const auto& seed : seeds) {
    PlanarCoords start = seed.positions;
    start.scale(length);
    virial_rescale(trap, start);
    try {
      out.push_back(minimize_from(trap, start, options, seed.id));
    } catch (const DomainError&) {
      CrystalState failed;
      failed.positions = start;
      failed.seed_id = seed.id;
      failed.energy = std::numeric_limits<double>::infinity();
      failed.gradient_norm = std::numeric_limits<double>::infinity();
      out.push_back(std::move(failed));
    }
  }
  return out;
}

CrystalState solve_equilibrium(const DimensionlessTrap& trap, std::size_t n_ions,
                               const std::vector<Seed>& seeds, const SolverOptions& options) {
  if (!trap.stable) throw ValidationError("trap is unstable: beta_1^2 or beta_3^2 not positive");
  if (n_ions == 0) throw ValidationError("need at least one ion");
  if (seeds.empty()) throw ValidationError("no seeds supplied");
  for (const auto& s : seeds) {
    if (s.positions.size() != n_ions) throw ValidationError("seed size does not match n_ions");
  }

  const auto results = solve_all_seeds(trap, seeds, options);
  const CrystalState* best = nullptr;
  const CrystalState* closest = nullptr;
  for (const auto& r : results) {
    if (closest == nullptr || r.gradient_norm < closest->gradient_norm) closest = &r;
    if (!r.converged) continue;
    if (best == nullptr || r.energy < best->energy) best = &r;
  }
  if (best == nullptr) {
    throw ConvergenceError("no seed reached the gradient tolerance", *closest);
  }
  return *best;
}

CrystalState solve_equilibrium(const DimensionlessTrap& trap, std::size_t n_ions,
                               const SolverOptions& options) {
  const std::size_t count =
      options.seed_count == 0 ? default_seed_count(n_ions) : options.seed_count;
  return solve_equilibrium(trap, n_ions, generate_seeds(n_ions, count, options.rng_seed), options);
}

ShellDecomposition shell_decomposition(const CrystalState& state, const ShellOptions& options) {
  return shell_decomposition(state.positions, options);
}

ShellDecomposition shell_decomposition(const PlanarCoords& p, const ShellOptions& options) {
  ShellDecomposition out;
  const std::size_t n = p.size();
  out.ring_of_ion.assign(n, 0);
  if (n == 0) return out;

  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = p.radius(i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
  const double r_out = r[order.back()];

  double mean_nn = 0.0;
  if (n >= 2) {
    for (std::size_t i = 0; i < n; ++i) {
      double nn = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) nn = std::min(nn, std::hypot(p.x1[i] - p.x1[j], p.x2[i] - p.x2[j]));
      mean_nn += nn;
    }
    mean_nn /= static_cast<double>(n);
  }
  const double threshold = options.gap_fraction * mean_nn;

  std::vector<std::vector<std::size_t>> rings;
  std::size_t k = 0;
  if (n >= 2 && r_out > 0.0) {
    std::vector<std::size_t> center;
    while (k < n && r[order[k]] < options.center_fraction * r_out) center.push_back(order[k++]);
    if (!center.empty()) rings.push_back(std::move(center));
  }
  std::vector<std::size_t> current;
  for (; k < n; ++k) {
    const std::size_t ion = order[k];
    if (!current.empty()) {
      const double gap = r[ion] - r[current.back()];
      if (gap > 0.75 * threshold && gap < 1.25 * threshold) out.ambiguous = true;
      if (gap > threshold) rings.push_back(std::exchange(current, {}));
    }
    current.push_back(ion);
  }
  if (!current.empty()) rings.push_back(std::move(current));

  for (std::size_t j = 0; j < rings.size(); ++j) {
    double sum = 0.0;
    for (std::size_t ion : rings[j]) {
      sum += r[ion];
      out.ring_of_ion[ion] = j;
    }
    out.ring_counts.push_back(rings[j].size());
    out.ring_radii.push_back(sum / static_cast<double>(rings[j].size()));
  }
  return out;
}

}  // namespace ioncrystal
