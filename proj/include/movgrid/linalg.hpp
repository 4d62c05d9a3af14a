#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace movgrid {

/// Dense row-major square matrix for the small D x D mass and force-constant
/// matrices of a model.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}
  Matrix(std::size_t n, std::vector<double> row_major);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  bool is_symmetric(double tol) const;
  bool is_diagonal() const;
  std::vector<double> diagonal_entries() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Lower-triangular L with A = L L^T, or nullopt when A is not positive definite.
std::optional<Matrix> cholesky(const Matrix& a);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// Iterates until the off-diagonal Frobenius norm is below tol times the
/// matrix norm.
std::vector<double> symmetric_eigenvalues(Matrix a, double tol = 1e-14);

}  // namespace movgrid
