#include "krigesense/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "krigesense/error.hpp"

namespace krigesense::kriging {
namespace {

constexpr double variance_clamp_tol = 1e-10;

linalg::SpdFactor factor_reduced(const LocationSet& train, const ReducedParams& params) {
  const kernel::MaternCorrelation corr(params.rho(), params.nu());
  return linalg::spd_factor(kernel::correlation_matrix(train, corr, params.omega2()));
}

}  // namespace

KrigingSystem::KrigingSystem(LocationSet train, std::vector<double> pred, const ReducedParams& params)
    : train_(std::move(train)),
      pred_(std::move(pred)),
      params_(params),
      factor_(factor_reduced(train_, params_)),
      cross_(kernel::correlation_vector(train_, pred_, kernel::MaternCorrelation(params_.rho(), params_.nu()))) {}

KrigingWeights KrigingSystem::weights() const {
  // Z^T solves (Omega + omega2 I) Z^T = Omega(x, x*); the matrix is symmetric.
  return {factor_.solve(cross_), train_, pred_};
}

double KrigingSystem::variance(double sigma2) const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    raise(ErrorKind::domain, "kriging_variance: sigma2 must be positive and finite");
  }
  double explained = 0.0;
  for (double z : factor_.solve_lower(cross_)) {
    explained += z * z;
  }
  const double v = sigma2 * (1.0 - explained);
  if (v >= 0.0) {
    return v;
  }
  if (v >= -variance_clamp_tol * sigma2) {
    return 0.0;
  }
  raise(ErrorKind::negative_variance, "kriging_variance: negative variance " + std::to_string(v));
}

KrigingWeights kriging_weights(const LocationSet& train, std::span<const double> pred, const ReducedParams& params) {
  return KrigingSystem(train, {pred.begin(), pred.end()}, params).weights();
}

double predict_mean(const KrigingWeights& weights, std::span<const double> y) {
  if (y.size() != weights.weights.size()) {
    raise(ErrorKind::shape_mismatch, "predict_mean: response length " + std::to_string(y.size()) +
                                         " does not match " + std::to_string(weights.weights.size()) +
                                         " weights");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s += weights.weights[i] * y[i];
  }
  return s;
}

double kriging_variance(const LocationSet& train, std::span<const double> pred, const MaternParams& params) {
  return KrigingSystem(train, {pred.begin(), pred.end()}, params.reduced()).variance(params.sigma2());
}

double log_likelihood(const LocationSet& train, std::span<const double> y, const MaternParams& params) {
  if (y.size() != train.size()) {
    raise(ErrorKind::shape_mismatch, "log_likelihood: response length does not match training set");
  }
  const linalg::SpdFactor factor = linalg::spd_factor(kernel::kernel_matrix(train, train, params));
  double quad = 0.0;
  for (double z : factor.solve_lower(y)) {
    quad += z * z;
  }
  const double p = static_cast<double>(train.dimension());
  return -0.5 * p * std::log(2.0 * std::numbers::pi) - 0.5 * factor.log_determinant() - 0.5 * quad;
}

std::vector<std::size_t> nearest_neighbors(const LocationSet& train, std::span<const double> pred, std::size_t k) {
  const std::size_t n = train.size();
  if (k == 0 || k > n) {
    raise(ErrorKind::domain, "nearest_neighbors: k = " + std::to_string(k) + " outside [1, " +
                                 std::to_string(n) + "]");
  }
  std::vector<std::pair<double, std::size_t>> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = {kernel::distance(train.point(i), pred), i};
  }
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = order[i].second;
  }
  return out;
}

}  // namespace krigesense::kriging
