#include "ioncrystal/spin_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ioncrystal/constants.hpp"
#include "ioncrystal/errors.hpp"

namespace ioncrystal {

namespace {

constexpr double kResonanceGuard = 1e-9;
constexpr double kCouplingFloor = 1e-14;

}  // namespace

std::size_t com_mode_index(const ModeSpectrum& spectrum) {
  const std::size_t n = spectrum.n_ions();
  if (n == 0) throw ValidationError("empty spectrum");
  std::size_t best = 0;
  double best_overlap = -1.0;
  for (std::size_t a = 0; a < n; ++a) {
    double s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += spectrum.axial_vectors(m, a);
    const double overlap = std::abs(s);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = a;
    }
  }
  return best;
}

CouplingResult compute_couplings(const CrystalState& state, const ModeSpectrum& spectrum,
                                 double detuning) {
  const std::size_t n = spectrum.n_ions();
  if (state.n_ions() != n) throw ValidationError("crystal and spectrum sizes differ");
  if (!(detuning > 0.0) || !std::isfinite(detuning))
    throw ValidationError("detuning must be positive");

  const std::size_t com = com_mode_index(spectrum);
  const double com_eig = spectrum.axial_eigenvalues[com];
  if (!(com_eig > 0.0)) throw ValidationError("center-of-mass mode is not confining");

  std::vector<double> weight(n);
  const double mu2 = detuning * detuning;
  for (std::size_t a = 0; a < n; ++a) {
    const double ratio_sq = spectrum.axial_eigenvalues[a] / com_eig;
    const double ratio = ratio_sq < 0.0 ? -std::sqrt(-ratio_sq) : std::sqrt(ratio_sq);
    if (std::abs(detuning - ratio) <= kResonanceGuard) {
      throw ResonanceError("detuning " + std::to_string(detuning) + " is resonant with axial mode " +
                               std::to_string(a),
                           a);
    }
    // Above the band, subtract the common 1/mu^2 (it sums to zero off the
    // diagonal by orthonormality) to avoid cancellation at large detuning.
    weight[a] = mu2 > 1.0 ? ratio_sq / (mu2 * (mu2 - ratio_sq)) : 1.0 / (mu2 - ratio_sq);
  }

  CouplingResult out;
  out.detuning = detuning;
  out.j = Matrix(n, n);
  const Matrix& b = spectrum.axial_vectors;
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = m + 1; k < n; ++k) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += b(m, a) * b(k, a) * weight[a];
      out.j(m, k) = out.j(k, m) = s;
      const double r = std::hypot(state.positions.x1[m] - state.positions.x1[k],
                                  state.positions.x2[m] - state.positions.x2[k]);
      out.pairs.push_back({m, k, r, s});
    }
  }
  return out;
}

PowerLawFit fit_power_law(const CouplingResult& result) {
  std::vector<double> xs, ys;
  PowerLawFit fit;
  for (const auto& p : result.pairs) {
    if (std::abs(p.coupling) <= kCouplingFloor || !(p.distance > 0.0)) {
      ++fit.pairs_dropped;
      continue;
    }
    xs.push_back(std::log(p.distance));
    ys.push_back(std::log(std::abs(p.coupling)));
  }
  const std::size_t n = xs.size();
  if (n < 2) throw ValidationError("power-law fit needs at least two usable pairs");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 1e-24 * std::max(1.0, mx * mx))
    throw ValidationError("power-law fit needs at least two distinct distances");

  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (intercept + slope * xs[i]);
    ss_res += e * e;
  }
  fit.exponent = -slope;
  fit.prefactor = std::exp(intercept);
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.pairs_used = n;
  return fit;
}

double coupling_scale(double rabi_frequency, double delta_k, double mass, double omega_cm) {
  if (!(mass > 0.0) || !(omega_cm > 0.0))
    throw ValidationError("mass and center-of-mass frequency must be positive");
  return rabi_frequency * rabi_frequency * constants::kReducedPlanck * delta_k * delta_k /
         (2.0 * mass * omega_cm * omega_cm);
}

std::vector<DetuningEntry> detuning_sweep(const CrystalState& state, const ModeSpectrum& spectrum,
                                          const std::vector<double>& detunings) {
  std::vector<DetuningEntry> out;
  out.reserve(detunings.size());
  for (double mu : detunings) {
    DetuningEntry e;
    e.detuning = mu;
    try {
      e.result = compute_couplings(state, spectrum, mu);
      e.fit = fit_power_law(*e.result);
    } catch (const ResonanceError& err) {
      e.error = err.what();
    } catch (const ValidationError& err) {
      e.error = err.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace ioncrystal
