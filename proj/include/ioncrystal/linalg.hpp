#pragma once

// Small dense linear algebra for the <= 40 x 40 symmetric matrices that show
// up in the crystal and mode calculations.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ioncrystal {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }

  std::vector<double> column(std::size_t c) const;
  Matrix transpose() const;

  /// Largest |A(i,j) - A(j,i)|.
  double asymmetry() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Eigen-decomposition of a symmetric matrix: values ascending, vectors[:, k]
/// the unit eigenvector of values[k].
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
};

/// Cyclic Jacobi rotations with the classical threshold strategy. Input must
/// be symmetric; only its upper triangle is read.
SymmetricEigen jacobi_eigen(const Matrix& a, int max_sweeps = 100);

/// Lower-triangular factor L with A = L L^T, or nullopt when A is not
/// numerically positive definite.
std::optional<Matrix> cholesky(const Matrix& a);
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);

}  // namespace ioncrystal
