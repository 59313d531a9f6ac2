#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "krigesense/kernel.hpp"
#include "krigesense/linalg.hpp"

namespace krigesense::classifier {

using kernel::ReducedParams;

// m x q features with labels in {-1, +1}.
class LabeledSet {
 public:
  LabeledSet(linalg::Matrix features, std::vector<int> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dimension() const noexcept { return features_.cols(); }
  const linalg::Matrix& features() const noexcept { return features_; }
  std::span<const int> labels() const noexcept { return labels_; }
  std::span<const double> point(std::size_t i) const { return features_.row(i); }

  LabeledSet subset(std::span<const std::size_t> indices) const;
  kernel::LocationSet locations() const;

 private:
  linalg::Matrix features_;
  std::vector<int> labels_;
};

/// Synthetic stand-in for embedded image data: uniform features on [0,1]^q and
/// labels from the sign of one Matern draw (rho 0.7, nu 1.5, sigma2 1,
/// tau2 0.01) centred at its sample median, so each label takes exactly m/2
/// points. Requires even m and q >= 2.
LabeledSet synth_dataset(std::size_t m, std::size_t q, std::uint64_t seed, bool unit_norm_rows = false);

// Parameters of the generating field, in reduced form.
ReducedParams generating_params();

// Sign of the kriged latent mean from the k nearest training points; a mean of
// exactly zero maps to +1.
std::vector<int> classify(const LabeledSet& train, const linalg::Matrix& test_features, const ReducedParams& params,
                          std::size_t k);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Leave-one-out neighbourhoods of a training set, prepared once and scored
/// for any number of parameter sets.
///
/// Each point is predicted from its k nearest other points (ties to the lower
/// index). Distances within all neighbourhoods are deduplicated so a
/// parameter set evaluates each distinct pair's correlation once.
class LooPlan {
 public:
  LooPlan(const LabeledSet& train, std::size_t k);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t neighbors() const noexcept { return k_; }
  std::size_t distinct_pairs() const noexcept { return distances_.size(); }

  // Number of points whose label is recovered.
  std::size_t correct(const ReducedParams& params) const;
  double accuracy(const ReducedParams& params) const;

  // Counts for several nuggets sharing one (rho, nu); correlations are
  // evaluated once for the whole batch.
  std::vector<std::size_t> correct(double rho, double nu, std::span<const double> omega2) const;

 private:
  std::size_t k_;
  std::vector<int> labels_;
  std::vector<std::uint32_t> neighbor_index_;  // size() x k
  std::vector<double> distances_;              // distinct pair distances
  // Per point: k cross-distance slots, then the strict lower triangle of the
  // neighbour matrix, all indexing distances_.
  std::vector<std::uint32_t> slots_;
};

double loo_accuracy(const LabeledSet& train, const ReducedParams& params, std::size_t k);

enum class Subset { nu_only, nu_rho, all };

std::string_view to_string(Subset subset);

struct GridSpec {
  Subset subset = Subset::all;
  std::vector<double> nu_values;
  std::vector<double> rho_values;
  std::vector<double> omega2_values;

  // `values_per_axis` equispaced points over nu [0.01, 2.5], rho [0.01, 5] and
  // omega2 [0.001, 0.1] for the searched parameters; the others are held at
  // rho = 2.5 and omega2 = 0.01.
  static GridSpec make(Subset subset, std::size_t values_per_axis = 10);

  std::size_t size() const noexcept { return nu_values.size() * rho_values.size() * omega2_values.size(); }
  ReducedParams at(std::size_t index) const;  // nu slowest, omega2 fastest
};

inline constexpr double fixed_rho = 2.5;
inline constexpr double fixed_omega2 = 0.01;

struct TrialResult {
  Subset subset = Subset::all;
  std::size_t train_size = 0;
  std::size_t iteration = 0;
  double accuracy = 0.0;
  double wall_time_s = 0.0;
  std::size_t evaluations = 0;
  std::size_t threads = 1;
};

struct GridSearchResult {
  ReducedParams params;
  TrialResult trial;     // accuracy holds the best LOO accuracy
  std::size_t ties = 0;  // grid points sharing the best accuracy
};

// Scores every grid point by LOO accuracy and returns the coordinate-wise mean
// of the best-scoring parameter sets.
GridSearchResult grid_search(const LabeledSet& train, const GridSpec& grid, std::size_t k);

struct BenchmarkConfig {
  std::vector<std::size_t> train_sizes = {400, 800, 1200, 1600, 2000};
  std::size_t iterations = 50;
  std::uint64_t seed = 0;
  std::size_t k = 50;
  std::size_t dimension = 2;
  std::size_t test_size = 500;
  std::size_t values_per_axis = 10;
  std::vector<Subset> subsets = {Subset::nu_only, Subset::nu_rho, Subset::all};
};

/// Repeated train/test trials. Each iteration draws one dataset, holds out a
/// balanced test set and grows nested balanced training sets through the
/// requested sizes; every subset is searched on the same data. k is clamped to
/// train size - 1. Results are ordered by (iteration, size, subset).
std::vector<TrialResult> run_benchmark(const BenchmarkConfig& config);

struct TrialSummary {
  Subset subset = Subset::all;
  std::size_t train_size = 0;
  double mean_accuracy = 0.0;
  double mean_wall_time_s = 0.0;
  std::size_t evaluations = 0;
  std::size_t trials = 0;
};

std::vector<TrialSummary> summarize(std::span<const TrialResult> trials);

}  // namespace krigesense::classifier
