#include "dense_oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace oracle {

Dense inverse(const Dense& m) {
  const std::size_t n = m.n;
  Dense work = m;
  Dense inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    inv(i, i) = 1.0L;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(work(r, col)) > std::fabs(work(pivot, col))) {
        pivot = r;
      }
    }
    if (work(pivot, col) == 0.0L) {
      throw std::runtime_error("oracle inverse: singular matrix");
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const long double p = work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) /= p;
      inv(col, j) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) {
        continue;
      }
      const long double f = work(r, col);
      if (f == 0.0L) {
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= f * work(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

long double log_abs_determinant(const Dense& m) {
  const std::size_t n = m.n;
  Dense work = m;
  long double log_det = 0.0L;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(work(r, col)) > std::fabs(work(pivot, col))) {
        pivot = r;
      }
    }
    if (work(pivot, col) == 0.0L) {
      throw std::runtime_error("oracle determinant: singular matrix");
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
      }
    }
    log_det += std::log(std::fabs(work(col, col)));
    for (std::size_t r = col + 1; r < n; ++r) {
      const long double f = work(r, col) / work(col, col);
      for (std::size_t j = col; j < n; ++j) {
        work(r, j) -= f * work(col, j);
      }
    }
  }
  return log_det;
}

long double determinant(const Dense& m) {
  const std::size_t n = m.n;
  Dense work = m;
  long double det = 1.0L;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(work(r, col)) > std::fabs(work(pivot, col))) {
        pivot = r;
      }
    }
    if (work(pivot, col) == 0.0L) {
      return 0.0L;
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
      }
      det = -det;
    }
    det *= work(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const long double f = work(r, col) / work(col, col);
      for (std::size_t j = col; j < n; ++j) {
        work(r, j) -= f * work(col, j);
      }
    }
  }
  return det;
}

std::vector<long double> multiply(const Dense& m, const std::vector<long double>& v) {
  std::vector<long double> out(m.n, 0.0L);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      out[i] += m(i, j) * v[j];
    }
  }
  return out;
}

}  // namespace oracle
