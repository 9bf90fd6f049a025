#include "ioncrystal/modes.hpp"

#include <algorithm>
#include <cmath>

#include "ioncrystal/errors.hpp"
#include "ioncrystal/kernels/coulomb.hpp"

namespace ioncrystal {

Matrix SpringMatrices::planar() const {
  const std::size_t n = n_ions();
  Matrix p(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      p(i, j) = k11(i, j);
      p(n + i, n + j) = k22(i, j);
      p(i, n + j) = k12(i, j);
      p(n + i, j) = k12(j, i);
    }
  }
  return p;
}

SpringMatrices spring_matrices(const DimensionlessTrap& trap, const PlanarCoords& positions) {
  const std::size_t n = positions.size();
  const auto& kern = kernels::active_kernels();
  const std::span xs(positions.x1), ys(positions.x2);

  SpringMatrices k{Matrix(n, n), Matrix(n, n), Matrix(n, n), Matrix(n, n), trap.beta3_sq};
  std::vector<double> hxx(n), hyy(n), hxy(n), hzz(n);
  for (std::size_t m = 0; m < n; ++m) {
    // Row m against ions [0, m) and (m, n); slot m stays zero.
    kern.pair_hessian(xs[m], ys[m], xs.first(m), ys.first(m), hxx.data(), hyy.data(),
                      hxy.data(), hzz.data());
    kern.pair_hessian(xs[m], ys[m], xs.subspan(m + 1), ys.subspan(m + 1), hxx.data() + m + 1,
                      hyy.data() + m + 1, hxy.data() + m + 1, hzz.data() + m + 1);
    hxx[m] = hyy[m] = hxy[m] = hzz[m] = 0.0;

    double sxx = 0.0, syy = 0.0, sxy = 0.0, szz = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == m) continue;
      if (!std::isfinite(hzz[j])) throw DomainError("coincident ions in spring matrices");
      k.k11(m, j) = hxx[j];
      k.k22(m, j) = hyy[j];
      k.k12(m, j) = hxy[j];
      k.k33(m, j) = hzz[j];
      sxx += hxx[j];
      syy += hyy[j];
      sxy += hxy[j];
      szz += hzz[j];
    }
    k.k11(m, m) = trap.beta1_sq - sxx;
    k.k22(m, m) = trap.beta2_sq - syy;
    k.k12(m, m) = -sxy;
    k.k33(m, m) = trap.beta3_sq - szz;
  }
  return k;
}

SpringMatrices build_spring_matrices(const DimensionlessTrap& trap, const CrystalState& state) {
  if (!state.converged) throw ValidationError("spring matrices need a converged crystal");
  return spring_matrices(trap, state.positions);
}

std::vector<std::vector<std::size_t>> degenerate_groups(const std::vector<double>& values,
                                                        double tol) {
  std::vector<std::vector<std::size_t>> groups;
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double abs_tol = tol * scale;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!groups.empty() && values[i] - values[groups.back().back()] <= abs_tol) {
      groups.back().push_back(i);
    } else {
      groups.push_back({i});
    }
  }
  return groups;
}

namespace {

void fix_sign(Matrix& v, std::size_t col) {
  const std::size_t n = v.rows();
  double best = 0.0;
  for (std::size_t r = 0; r < n; ++r) best = std::max(best, std::abs(v(r, col)));
  for (std::size_t r = 0; r < n; ++r) {
    if (std::abs(v(r, col)) >= best * (1.0 - 1e-12)) {
      if (v(r, col) < 0.0)
        for (std::size_t k = 0; k < n; ++k) v(k, col) = -v(k, col);
      return;
    }
  }
}

/// Replaces each degenerate block of eigenvectors by the Gram-Schmidt basis
/// of the projected unit vectors e_0, e_1, ... (first independent ones).
void canonicalize(const Matrix& a, SymmetricEigen& eig) {
  const std::size_t n = a.rows();
  for (const auto& group : degenerate_groups(eig.values, 1e-10)) {
    if (group.size() > 1) {
      std::vector<std::vector<double>> basis;
      for (std::size_t e = 0; e < n && basis.size() < group.size(); ++e) {
        std::vector<double> w(n, 0.0);
        for (std::size_t c : group) {
          const double coeff = eig.vectors(e, c);
          for (std::size_t r = 0; r < n; ++r) w[r] += coeff * eig.vectors(r, c);
        }
        for (const auto& b : basis) {
          const double d = dot(w, b);
          for (std::size_t r = 0; r < n; ++r) w[r] -= d * b[r];
        }
        const double len = norm2(w);
        if (len < 1e-6) continue;
        for (auto& x : w) x /= len;
        basis.push_back(std::move(w));
      }
      for (std::size_t k = 0; k < group.size(); ++k)
        for (std::size_t r = 0; r < n; ++r) eig.vectors(r, group[k]) = basis[k][r];
    }
    double mean = 0.0;
    for (std::size_t c : group) {
      fix_sign(eig.vectors, c);
      const auto v = eig.vectors.column(c);
      mean += dot(v, a * std::span<const double>(v));
    }
    mean /= static_cast<double>(group.size());
    for (std::size_t c : group) eig.values[c] = mean;
  }
}

double signed_sqrt(double x) { return x < 0.0 ? -std::sqrt(-x) : std::sqrt(x); }

}  // namespace

ModeSpectrum solve_modes(const SpringMatrices& k) {
  const Matrix planar = k.planar();
  if (k.k33.asymmetry() > 1e-12 || planar.asymmetry() > 1e-12) {
    throw ValidationError("spring matrices are not symmetric");
  }
  for (double x : planar.data())
    if (!std::isfinite(x)) throw ValidationError("spring matrices contain non-finite entries");

  ModeSpectrum s;
  auto axial = jacobi_eigen(k.k33);
  canonicalize(k.k33, axial);
  auto inplane = jacobi_eigen(planar);
  canonicalize(planar, inplane);

  s.axial_eigenvalues = axial.values;
  s.axial_vectors = std::move(axial.vectors);
  s.planar_eigenvalues = inplane.values;
  s.planar_vectors = std::move(inplane.vectors);
  for (double v : s.axial_eigenvalues) s.axial_freqs.push_back(signed_sqrt(v));
  for (double v : s.planar_eigenvalues) s.planar_freqs.push_back(signed_sqrt(v));

  s.soft_axial = !s.axial_eigenvalues.empty() && s.axial_eigenvalues.front() < kSoftEigenvalue;

  double closest = kZeroEigenvalue;
  for (std::size_t i = 0; i < s.planar_eigenvalues.size(); ++i) {
    const double v = std::abs(s.planar_eigenvalues[i]);
    if (v < kZeroEigenvalue) {
      ++s.planar_zero_count;
      if (v < closest) {
        closest = v;
        s.zero_rotation_index = i;
      }
    }
  }
  for (std::size_t i = 0; i < s.planar_eigenvalues.size(); ++i) {
    if (s.zero_rotation_index && *s.zero_rotation_index == i) continue;
    if (s.planar_eigenvalues[i] < kSoftEigenvalue) s.soft_planar = true;
  }
  return s;
}

}  // namespace ioncrystal
