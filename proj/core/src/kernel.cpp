#include "krigesense/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "krigesense/error.hpp"

namespace krigesense::kernel {
namespace {

// Below this Bessel argument the power-times-Bessel product is replaced by its
// small-argument expansion.
constexpr double tiny_argument = 1e-10;
constexpr double half_integer_tol = 1e-12;
constexpr double min_separation = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) {
    raise(ErrorKind::domain, what);
  }
}

void check_shape(double rho, double nu) {
  require(std::isfinite(rho) && rho > 0.0, "range rho must be positive and finite");
  require(std::isfinite(nu) && nu > 0.0 && nu <= specfun::max_order,
          "smoothness nu must lie in (0, 50]");
}

}  // namespace

MaternParams::MaternParams(double sigma2, double rho, double nu, double tau2)
    : sigma2_(sigma2), rho_(rho), nu_(nu), tau2_(tau2) {
  require(std::isfinite(sigma2) && sigma2 > 0.0, "sigma2 must be positive and finite");
  check_shape(rho, nu);
  require(std::isfinite(tau2) && tau2 >= 0.0, "tau2 must be nonnegative and finite");
}

ReducedParams MaternParams::reduced() const { return {rho_, nu_, tau2_ / sigma2_}; }

ReducedParams::ReducedParams(double rho, double nu, double omega2) : rho_(rho), nu_(nu), omega2_(omega2) {
  check_shape(rho, nu);
  require(std::isfinite(omega2) && omega2 >= 0.0, "omega2 must be nonnegative and finite");
}

MaternParams ReducedParams::with_variance(double sigma2) const {
  return {sigma2, rho_, nu_, omega2_ * sigma2};
}

LocationSet::LocationSet(std::size_t dimension, std::vector<double> coordinates)
    : dimension_(dimension), coordinates_(std::move(coordinates)) {
  require(dimension_ >= 1, "location dimension must be at least 1");
  if (coordinates_.size() % dimension_ != 0) {
    raise(ErrorKind::shape_mismatch, "coordinate count is not a multiple of the dimension");
  }
  require(!coordinates_.empty(), "a location set needs at least one point");
  for (double c : coordinates_) {
    require(std::isfinite(c), "location coordinates must be finite");
  }
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (!(distance(point(i), point(j)) > min_separation)) {
        raise(ErrorKind::domain, "locations " + std::to_string(j) + " and " + std::to_string(i) +
                                     " coincide");
      }
    }
  }
}

LocationSet LocationSet::from_points(const std::vector<std::vector<double>>& points) {
  require(!points.empty(), "a location set needs at least one point");
  const std::size_t dim = points.front().size();
  std::vector<double> coords;
  coords.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.size() != dim) {
      raise(ErrorKind::shape_mismatch, "points differ in dimension");
    }
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return {dim, std::move(coords)};
}

LocationSet LocationSet::empty(std::size_t dimension) {
  require(dimension >= 1, "location dimension must be at least 1");
  return {Unchecked{}, dimension, {}};
}

LocationSet LocationSet::subset(std::span<const std::size_t> indices) const {
  require(!indices.empty(), "a location set needs at least one point");
  std::vector<double> coords;
  coords.reserve(indices.size() * dimension_);
  for (std::size_t idx : indices) {
    if (idx >= size()) {
      raise(ErrorKind::domain, "subset index out of range");
    }
    const auto p = point(idx);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  // Distinct indices of a distinct set stay distinct; repeated indices do not.
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    raise(ErrorKind::domain, "subset indices repeat");
  }
  return {Unchecked{}, dimension_, std::move(coords)};
}

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    raise(ErrorKind::shape_mismatch, "distance: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return std::sqrt(s);
}

MaternCorrelation::MaternCorrelation(double rho, double nu)
    : rho_(rho), nu_(nu), scale_(0.0), log_norm_(0.0), small_coef_(0.0), form_(Form::general) {
  check_shape(rho, nu);
  scale_ = std::sqrt(2.0 * nu) / rho;
  if (std::abs(nu - 0.5) <= half_integer_tol) {
    form_ = Form::half;
  } else if (std::abs(nu - 1.5) <= half_integer_tol) {
    form_ = Form::three_halves;
  } else if (std::abs(nu - 2.5) <= half_integer_tol) {
    form_ = Form::five_halves;
  } else {
    log_norm_ = (1.0 - nu) * std::numbers::ln2 - std::lgamma(nu);
    if (nu < 1.0) {
      small_coef_ = std::tgamma(1.0 - nu) / std::tgamma(1.0 + nu);
    }
    bessel_.emplace(nu);
  }
}

double MaternCorrelation::operator()(double d) const {
  if (!(d >= 0.0) || !std::isfinite(d)) {
    raise(ErrorKind::domain, "distance must be nonnegative and finite");
  }
  if (d == 0.0) {
    return 1.0;
  }
  const double u = scale_ * d;
  switch (form_) {
    case Form::half:
      return std::exp(-u);
    case Form::three_halves:
      return (1.0 + u) * std::exp(-u);
    case Form::five_halves:
      return (1.0 + u + u * u / 3.0) * std::exp(-u);
    case Form::general:
      break;
  }
  if (u < tiny_argument) {
    // 1 - Gamma(1-nu)/Gamma(1+nu) (u/2)^(2 nu) + O(u^2); for nu >= 1 every
    // correction is below u^2 |ln u| and vanishes in double precision.
    if (nu_ >= 1.0) {
      return 1.0;
    }
    return std::clamp(1.0 - small_coef_ * std::pow(0.5 * u, 2.0 * nu_), 0.0, 1.0);
  }
  const double log_corr = log_norm_ + nu_ * std::log(u) + bessel_->log_value(u);
  return std::min(1.0, std::exp(log_corr));
}

double matern_correlation(double d, double rho, double nu) { return MaternCorrelation(rho, nu)(d); }

double matern_covariance(double d, const MaternParams& params) {
  const double c = params.sigma2() * matern_correlation(d, params.rho(), params.nu());
  return d == 0.0 ? c + params.tau2() : c;
}

linalg::Matrix kernel_matrix(const LocationSet& a, const LocationSet& b, const MaternParams& params) {
  if (a.dimension() != b.dimension()) {
    raise(ErrorKind::shape_mismatch, "kernel_matrix: location sets differ in dimension");
  }
  const MaternCorrelation corr(params.rho(), params.nu());
  linalg::Matrix k(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = distance(a.point(i), b.point(j));
      k(i, j) = params.sigma2() * corr(d) + (d == 0.0 ? params.tau2() : 0.0);
    }
  }
  return k;
}

linalg::Matrix correlation_matrix(const LocationSet& a, const LocationSet& b, const MaternCorrelation& corr) {
  if (a.dimension() != b.dimension()) {
    raise(ErrorKind::shape_mismatch, "correlation_matrix: location sets differ in dimension");
  }
  linalg::Matrix k(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      k(i, j) = corr(distance(a.point(i), b.point(j)));
    }
  }
  return k;
}

linalg::Matrix correlation_matrix(const LocationSet& a, const MaternCorrelation& corr, double diagonal_shift) {
  const std::size_t n = a.size();
  linalg::Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    k(i, i) = 1.0 + diagonal_shift;
    for (std::size_t j = 0; j < i; ++j) {
      const double c = corr(distance(a.point(i), a.point(j)));
      k(i, j) = c;
      k(j, i) = c;
    }
  }
  return k;
}

std::vector<double> correlation_vector(const LocationSet& a, std::span<const double> point,
                                       const MaternCorrelation& corr) {
  if (point.size() != a.dimension()) {
    raise(ErrorKind::shape_mismatch, "correlation_vector: point dimension differs from location set");
  }
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    c[i] = corr(distance(a.point(i), point));
  }
  return c;
}

LocationSet make_grid(std::size_t dimension, std::size_t count_per_axis, std::optional<std::vector<double>> exclude) {
  require(dimension == 1 || dimension == 2, "grid dimension must be 1 or 2");
  require(count_per_axis >= 1, "grid needs at least one point per axis");
  if (exclude && exclude->size() != dimension) {
    raise(ErrorKind::shape_mismatch, "excluded point has the wrong dimension");
  }
  auto axis = [&](std::size_t i) {
    return count_per_axis == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count_per_axis - 1);
  };
  std::vector<double> coords;
  auto keep = [&](std::span<const double> p) {
    return !exclude || distance(p, *exclude) > min_separation;
  };
  if (dimension == 1) {
    for (std::size_t i = 0; i < count_per_axis; ++i) {
      const double p[1] = {axis(i)};
      if (keep(p)) {
        coords.push_back(p[0]);
      }
    }
  } else {
    for (std::size_t i = 0; i < count_per_axis; ++i) {
      for (std::size_t j = 0; j < count_per_axis; ++j) {
        const double p[2] = {axis(i), axis(j)};
        if (keep(p)) {
          coords.insert(coords.end(), {p[0], p[1]});
        }
      }
    }
  }
  return {dimension, std::move(coords)};
}

}  // namespace krigesense::kernel
