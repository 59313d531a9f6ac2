#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "krigesense/linalg.hpp"
#include "krigesense/specfun.hpp"

namespace krigesense::kernel {

class ReducedParams;

/// Full Matern hyperparameter set: marginal variance, range, smoothness and
/// nugget. All strictly positive except the nugget; smoothness at most 50.
class MaternParams {
 public:
  MaternParams(double sigma2, double rho, double nu, double tau2);

  double sigma2() const noexcept { return sigma2_; }
  double rho() const noexcept { return rho_; }
  double nu() const noexcept { return nu_; }
  double tau2() const noexcept { return tau2_; }

  // (rho, nu, tau2 / sigma2)
  ReducedParams reduced() const;

 private:
  double sigma2_;
  double rho_;
  double nu_;
  double tau2_;
};

/// The prediction-identifiable subset {rho, nu, omega2 = tau2 / sigma2}.
class ReducedParams {
 public:
  ReducedParams(double rho, double nu, double omega2);

  double rho() const noexcept { return rho_; }
  double nu() const noexcept { return nu_; }
  double omega2() const noexcept { return omega2_; }

  // Full parameters with the given marginal variance and tau2 = omega2 * sigma2.
  MaternParams with_variance(double sigma2) const;

  friend bool operator==(const ReducedParams&, const ReducedParams&) = default;

 private:
  double rho_;
  double nu_;
  double omega2_;
};

// Points of a common dimension, pairwise distinct (distance > 1e-12).
class LocationSet {
 public:
  LocationSet(std::size_t dimension, std::vector<double> coordinates);
  static LocationSet from_points(const std::vector<std::vector<double>>& points);
  // The only way to obtain a set without points; used for prior-only queries.
  static LocationSet empty(std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return coordinates_.size() / dimension_; }
  std::span<const double> point(std::size_t i) const {
    return {coordinates_.data() + i * dimension_, dimension_};
  }
  std::span<const double> coordinates() const noexcept { return coordinates_; }

  // Subset in the given index order.
  LocationSet subset(std::span<const std::size_t> indices) const;

 private:
  struct Unchecked {};
  LocationSet(Unchecked, std::size_t dimension, std::vector<double> coordinates)
      : dimension_(dimension), coordinates_(std::move(coordinates)) {}

  std::size_t dimension_;
  std::vector<double> coordinates_;
};

double distance(std::span<const double> a, std::span<const double> b);

/// Matern correlation d -> rho(d) at fixed (rho, nu), with the Bessel order and
/// the normalising constant 2^(1-nu)/Gamma(nu) prepared once.
///
/// The argument convention is sqrt(2 nu) d / rho inside both the power and the
/// Bessel term. Smoothness 1/2, 3/2 and 5/2 (within 1e-12) use their closed
/// forms; other orders are evaluated in log space.
class MaternCorrelation {
 public:
  MaternCorrelation(double rho, double nu);

  double operator()(double d) const;

  double rho() const noexcept { return rho_; }
  double nu() const noexcept { return nu_; }

 private:
  enum class Form { half, three_halves, five_halves, general };

  double rho_;
  double nu_;
  double scale_;       // sqrt(2 nu) / rho
  double log_norm_;    // (1 - nu) ln 2 - ln Gamma(nu)
  double small_coef_;  // Gamma(1-nu)/Gamma(1+nu) for the nu < 1 small-argument expansion
  Form form_;
  std::optional<specfun::BesselK> bessel_;
};

double matern_correlation(double d, double rho, double nu);

// sigma2 * correlation(d) + tau2 * [d == 0]
double matern_covariance(double d, const MaternParams& params);

// Entry (i, j) = matern_covariance(|a_i - b_j|, params).
linalg::Matrix kernel_matrix(const LocationSet& a, const LocationSet& b, const MaternParams& params);

// Unit-variance, nugget-free correlation matrix.
linalg::Matrix correlation_matrix(const LocationSet& a, const LocationSet& b, const MaternCorrelation& corr);

// Symmetric correlation matrix of a set against itself, plus `diagonal_shift` on the diagonal.
linalg::Matrix correlation_matrix(const LocationSet& a, const MaternCorrelation& corr,
                                  double diagonal_shift = 0.0);

std::vector<double> correlation_vector(const LocationSet& a, std::span<const double> point,
                                       const MaternCorrelation& corr);

// Uniform grid on [0,1]^dimension (dimension 1 or 2) with count_per_axis points
// per axis; a grid point within 1e-12 of `exclude` is dropped.
LocationSet make_grid(std::size_t dimension, std::size_t count_per_axis,
                      std::optional<std::vector<double>> exclude = std::nullopt);

}  // namespace krigesense::kernel
