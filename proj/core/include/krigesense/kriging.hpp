#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "krigesense/kernel.hpp"
#include "krigesense/linalg.hpp"

namespace krigesense::kriging {

using kernel::LocationSet;
using kernel::MaternParams;
using kernel::ReducedParams;

struct KrigingWeights {
  std::vector<double> weights;
  LocationSet train_ref;
  std::vector<double> pred_ref;
};

/// Reduced kriging system for one prediction location: the factor of
/// Omega(x, x) + omega2 I and the cross-correlation Omega(x*, x).
///
/// Omega is the nugget-free Matern correlation, so everything here depends on
/// sigma2 and tau2 only through omega2; the marginal variance enters solely as
/// a multiplier of the kriging variance.
class KrigingSystem {
 public:
  KrigingSystem(LocationSet train, std::vector<double> pred, const ReducedParams& params);

  const LocationSet& train() const noexcept { return train_; }
  std::span<const double> pred() const noexcept { return pred_; }
  const ReducedParams& params() const noexcept { return params_; }
  const linalg::SpdFactor& factor() const noexcept { return factor_; }
  std::span<const double> cross() const noexcept { return cross_; }

  KrigingWeights weights() const;

  // sigma2 * (1 - Omega(x*, x) (Omega + omega2 I)^{-1} Omega(x, x*)), clamped
  // at zero when negative by at most 1e-10 * sigma2.
  double variance(double sigma2) const;

 private:
  LocationSet train_;
  std::vector<double> pred_;
  ReducedParams params_;
  linalg::SpdFactor factor_;
  std::vector<double> cross_;
};

KrigingWeights kriging_weights(const LocationSet& train, std::span<const double> pred, const ReducedParams& params);

// Z . y for de-trended (mean-zero) responses.
double predict_mean(const KrigingWeights& weights, std::span<const double> y);

double kriging_variance(const LocationSet& train, std::span<const double> pred, const MaternParams& params);

// -(p/2) ln 2pi - 1/2 ln|K| - 1/2 y^T K^{-1} y, where p is the location
// dimension (not the observation count).
double log_likelihood(const LocationSet& train, std::span<const double> y, const MaternParams& params);

// Indices of the k closest training points in increasing distance; equal
// distances resolve to the lower index.
std::vector<std::size_t> nearest_neighbors(const LocationSet& train, std::span<const double> pred, std::size_t k);

}  // namespace krigesense::kriging
