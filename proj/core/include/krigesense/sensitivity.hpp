#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "krigesense/kernel.hpp"
#include "krigesense/linalg.hpp"

namespace krigesense::sensitivity {

struct ParamRange {
  std::string name;
  double min = 0.0;
  double max = 0.0;
};

/// Box of active parameter ranges. Every range must satisfy min < max;
/// parameters held fixed are simply left out of the box.
class ParamBox {
 public:
  explicit ParamBox(std::vector<ParamRange> ranges);

  // sigma2 [0.1, 5], rho [0.01, 5], nu [0.01, 2.5], omega2 [0.001, 0.1].
  static ParamBox defaults();

  std::size_t size() const noexcept { return ranges_.size(); }
  const std::vector<ParamRange>& ranges() const noexcept { return ranges_; }
  const ParamRange& operator[](std::size_t i) const { return ranges_[i]; }
  const ParamRange& find(const std::string& name) const;

  // Box restricted to the named parameters, in the given order.
  ParamBox select(const std::vector<std::string>& names) const;

  double scale(std::size_t i, double unit) const { return ranges_[i].min + (ranges_[i].max - ranges_[i].min) * unit; }

 private:
  std::vector<ParamRange> ranges_;
};

// count x box.size() Latin hypercube: each column holds one point per stratum
// (uniform within the stratum) in random order, scaled to the range.
linalg::Matrix lhs_sample(std::size_t count, const ParamBox& box, std::uint64_t seed);

/// Training grid and prediction location of a sensitivity study: 20 points of
/// the 21-point 1-D grid around x* = 0.5, or the 4 x 4 lattice on [0,1]^2
/// around its centre.
struct StudyDesign {
  kernel::LocationSet train;
  std::vector<double> pred;

  static StudyDesign grid(std::size_t dimension);
};

double response_weights(const StudyDesign& design, const kernel::ReducedParams& theta, std::size_t location_index);
double response_variance(const StudyDesign& design, const kernel::MaternParams& theta);

// A discrete input sampled uniformly over {0, ..., levels - 1}; appended after
// the continuous inputs and passed to the response as a double.
struct DiscreteFactor {
  std::string name;
  std::size_t levels = 0;
};

struct SobolResult {
  std::vector<std::string> inputs;
  std::vector<double> total_index;
  std::vector<double> percent_share;
  std::vector<double> bootstrap_halfwidth;        // of total_index
  std::vector<double> share_bootstrap_halfwidth;  // of percent_share, in points
  double variance = 0.0;
  std::size_t evaluations = 0;
  bool below_noise_floor = false;  // some total_index < -0.05
};

using ScalarFunction = std::function<double(std::span<const double>)>;

struct SobolOptions {
  std::size_t base_count = 1024;
  std::uint64_t seed = 0;
  std::size_t bootstrap_resamples = 200;
};

/// Total-effect indices by the Jansen pick-freeze estimator
///
///   T_i = sum_j (f(A_j) - f(A_B^(i)_j))^2 / (2 N Var(f))
///
/// on independent uniform matrices A and B, with Var(f) from a separate Latin
/// hypercube sample of N points. Needs base_count >= 256. Throws
/// ErrorKind::undefined_shares when the response has no variance.
SobolResult sobol_total(const ScalarFunction& f, const ParamBox& box, const std::optional<DiscreteFactor>& factor,
                        const SobolOptions& options);

enum class Response { weights, prediction_variance };

struct StudyConfig {
  std::size_t grid_dimension = 1;
  Response response = Response::weights;
  std::optional<double> fixed_omega2;  // empty means omega2 varies over its range
  std::size_t base_count = 1024;
  std::uint64_t seed = 0;
  ParamBox box = ParamBox::defaults();

  // sigma2 enters only the prediction variance.
  bool include_sigma2() const noexcept { return response == Response::prediction_variance; }
};

// Active inputs of a study in table order (sigma2, rho, nu, omega2, x).
std::vector<std::string> study_inputs(const StudyConfig& config);

SobolResult run_study(const StudyConfig& config);

}  // namespace krigesense::sensitivity
