#include "krigesense/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "krigesense/error.hpp"

namespace krigesense::linalg {
namespace {

constexpr std::array<double, 3> jitter_ladder = {1e-12, 1e-10, 1e-8};

// Pivots below this multiple of the jittered diagonal entry count as a failed
// factorization; accepting them yields factors dominated by rounding.
constexpr double pivot_floor = 16.0 * std::numeric_limits<double>::epsilon();

// Lower Cholesky of (a + jitter*I) into `out`. Returns false on a nonpositive
// or negligible pivot.
bool cholesky(const Matrix& a, double jitter, Matrix& out) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    const auto lj = out.row(j);
    const double diag = a(j, j) + jitter;
    double d = diag;
    for (std::size_t k = 0; k < j; ++k) {
      d -= lj[k] * lj[k];
    }
    if (!(d > pivot_floor * std::abs(diag)) || !std::isfinite(d)) {
      return false;
    }
    const double ljj = std::sqrt(d);
    lj[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto li = out.row(i);
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) {
        s -= li[k] * lj[k];
      }
      li[j] = s / ljj;
    }
  }
  return true;
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    raise(ErrorKind::shape_mismatch, std::string(what) + ": matrix is " + std::to_string(a.rows()) +
                                         "x" + std::to_string(a.cols()) + ", expected square");
  }
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      raise(ErrorKind::shape_mismatch, "Matrix: ragged initializer");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    raise(ErrorKind::shape_mismatch, "multiply: inner dimensions differ");
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    raise(ErrorKind::shape_mismatch, "multiply: vector length differs from column count");
  }
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      s += r[j] * x[j];
    }
    y[i] = s;
  }
  return y;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      t(j, i) = a(i, j);
    }
  }
  return t;
}

void require_symmetric(const Matrix& a, double tol) {
  require_square(a, "require_symmetric");
  const double scale = a.max_abs();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double diff = std::abs(a(i, j) - a(j, i));
      if (!(diff <= tol * scale)) {
        raise(ErrorKind::not_symmetric, "matrix is not symmetric at (" + std::to_string(i) + ", " +
                                            std::to_string(j) + ")");
      }
    }
  }
}

SpdFactor spd_factor(const Matrix& matrix) {
  require_symmetric(matrix);
  const std::size_t n = matrix.rows();
  Matrix lower(n, n);
  if (cholesky(matrix, 0.0, lower)) {
    return SpdFactor(std::move(lower), 0.0);
  }

  double mean_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_diag += matrix(i, i);
  }
  mean_diag /= static_cast<double>(n);
  if (mean_diag > 0.0) {
    for (double level : jitter_ladder) {
      const double jitter = level * mean_diag;
      std::fill(lower.data().begin(), lower.data().end(), 0.0);
      if (cholesky(matrix, jitter, lower)) {
        return SpdFactor(std::move(lower), jitter);
      }
    }
  }
  raise(ErrorKind::not_positive_definite,
        "spd_factor: matrix of order " + std::to_string(n) + " is not positive definite after jitter");
}

double SpdFactor::log_determinant() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dimension(); ++i) {
    s += std::log(lower_(i, i));
  }
  return 2.0 * s;
}

std::vector<double> SpdFactor::solve_lower(std::span<const double> rhs) const {
  const std::size_t n = dimension();
  if (rhs.size() != n) {
    raise(ErrorKind::shape_mismatch, "spd_solve: rhs length " + std::to_string(rhs.size()) +
                                         " does not match order " + std::to_string(n));
  }
  std::vector<double> z(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = lower_.row(i);
    double s = z[i];
    for (std::size_t k = 0; k < i; ++k) {
      s -= li[k] * z[k];
    }
    z[i] = s / li[i];
  }
  return z;
}

std::vector<double> SpdFactor::solve(std::span<const double> rhs) const {
  std::vector<double> x = solve_lower(rhs);
  const std::size_t n = dimension();
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) {
      s -= lower_(k, ii) * x[k];
    }
    x[ii] = s / lower_(ii, ii);
  }
  return x;
}

Matrix SpdFactor::solve(const Matrix& rhs) const {
  if (rhs.rows() != dimension()) {
    raise(ErrorKind::shape_mismatch, "spd_solve: rhs has " + std::to_string(rhs.rows()) +
                                         " rows, expected " + std::to_string(dimension()));
  }
  Matrix out(rhs.rows(), rhs.cols());
  std::vector<double> column(rhs.rows());
  for (std::size_t j = 0; j < rhs.cols(); ++j) {
    for (std::size_t i = 0; i < rhs.rows(); ++i) {
      column[i] = rhs(i, j);
    }
    const std::vector<double> x = solve(column);
    for (std::size_t i = 0; i < rhs.rows(); ++i) {
      out(i, j) = x[i];
    }
  }
  return out;
}

std::vector<double> spd_solve(const SpdFactor& factor, std::span<const double> rhs) {
  return factor.solve(rhs);
}

Matrix spd_solve(const SpdFactor& factor, const Matrix& rhs) { return factor.solve(rhs); }

std::vector<double> sym_eigenvalues(const Matrix& matrix) {
  require_symmetric(matrix);
  const std::size_t p = matrix.rows();
  Matrix a = matrix;

  double frobenius = 0.0;
  for (double v : a.data()) {
    frobenius += v * v;
  }
  frobenius = std::sqrt(frobenius);
  const double target = 1e-12 * frobenius;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        if (i != j) {
          s += a(i, j) * a(i, j);
        }
      }
    }
    return std::sqrt(s);
  };

  constexpr int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > target; ++sweep) {
    for (std::size_t r = 0; r + 1 < p; ++r) {
      for (std::size_t q = r + 1; q < p; ++q) {
        const double arq = a(r, q);
        if (arq == 0.0) {
          continue;
        }
        const double theta = (a(q, q) - a(r, r)) / (2.0 * arq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < p; ++k) {
          const double akr = a(k, r);
          const double akq = a(k, q);
          a(k, r) = c * akr - s * akq;
          a(k, q) = s * akr + c * akq;
        }
        for (std::size_t k = 0; k < p; ++k) {
          const double ark = a(r, k);
          const double aqk = a(q, k);
          a(r, k) = c * ark - s * aqk;
          a(q, k) = s * ark + c * aqk;
        }
        a(r, q) = 0.0;
        a(q, r) = 0.0;
      }
    }
  }

  std::vector<double> eig(p);
  for (std::size_t i = 0; i < p; ++i) {
    eig[i] = a(i, i);
  }
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

}  // namespace krigesense::linalg
