#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace krigesense::linalg {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double max_abs() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& a, std::span<const double> x);
Matrix transpose(const Matrix& a);

// Throws ErrorKind::not_symmetric unless |a_ij - a_ji| <= tol * max|a|.
void require_symmetric(const Matrix& a, double tol = 1e-12);

/// Cholesky factor L (A + jitter*I = L L^T) of a symmetric positive definite matrix.
///
/// Immutable after construction; concurrent solves against one factor are safe.
class SpdFactor {
 public:
  std::size_t dimension() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }
  double jitter_used() const noexcept { return jitter_; }

  // ln det(A + jitter*I)
  double log_determinant() const;

  std::vector<double> solve(std::span<const double> rhs) const;
  Matrix solve(const Matrix& rhs) const;

  // Solves L z = rhs only; ||z||^2 equals rhs^T (A + jitter*I)^{-1} rhs.
  std::vector<double> solve_lower(std::span<const double> rhs) const;

 private:
  friend SpdFactor spd_factor(const Matrix& matrix);
  SpdFactor(Matrix lower, double jitter) : lower_(std::move(lower)), jitter_(jitter) {}

  Matrix lower_;
  double jitter_ = 0.0;
};

// Factors a symmetric matrix, escalating diagonal jitter through
// {1e-12, 1e-10, 1e-8} x mean diagonal when the plain factorization fails.
// Throws ErrorKind::not_positive_definite once the ladder is exhausted.
SpdFactor spd_factor(const Matrix& matrix);

std::vector<double> spd_solve(const SpdFactor& factor, std::span<const double> rhs);
Matrix spd_solve(const SpdFactor& factor, const Matrix& rhs);

// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations, sorted
// nonincreasing.
std::vector<double> sym_eigenvalues(const Matrix& matrix);

}  // namespace krigesense::linalg
