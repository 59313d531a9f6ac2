#include "krigesense/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>

#include "krigesense/error.hpp"
#include "krigesense/kriging.hpp"
#include "krigesense/parallel.hpp"
#include "krigesense/random.hpp"

namespace krigesense::classifier {
namespace {

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 1) {
    return {0.5 * (lo + hi)};
  }
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  v.back() = hi;
  return v;
}

int sign_label(double latent_mean) { return latent_mean < 0.0 ? -1 : 1; }

// k nearest points to `pred` among `points`, skipping index `skip`.
std::vector<std::size_t> nearest_excluding(const linalg::Matrix& points, std::span<const double> pred,
                                           std::size_t k, std::size_t skip) {
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (i != skip) {
      order.emplace_back(kernel::distance(points.row(i), pred), i);
    }
  }
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = order[i].second;
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

LabeledSet::LabeledSet(linalg::Matrix features, std::vector<int> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() != labels_.size()) {
    raise(ErrorKind::shape_mismatch, "labeled set: feature rows and labels differ in count");
  }
  for (int l : labels_) {
    if (l != 1 && l != -1) {
      raise(ErrorKind::domain, "labeled set: labels must be -1 or +1");
    }
  }
}

LabeledSet LabeledSet::subset(std::span<const std::size_t> indices) const {
  linalg::Matrix f(indices.size(), dimension());
  std::vector<int> l(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = features_.row(indices[r]);
    std::copy(src.begin(), src.end(), f.row(r).begin());
    l[r] = labels_[indices[r]];
  }
  return {std::move(f), std::move(l)};
}

kernel::LocationSet LabeledSet::locations() const {
  const auto d = features_.data();
  return {dimension(), std::vector<double>(d.begin(), d.end())};
}

ReducedParams generating_params() { return {0.7, 1.5, 0.01}; }

LabeledSet synth_dataset(std::size_t m, std::size_t q, std::uint64_t seed, bool unit_norm_rows) {
  if (m == 0 || m % 2 != 0) {
    raise(ErrorKind::domain, "synth_dataset: m must be positive and even");
  }
  if (q < 2) {
    raise(ErrorKind::domain, "synth_dataset: q must be at least 2");
  }
  random::Stream features_rng(seed, 0);
  random::Stream latent_rng(seed, 1);

  linalg::Matrix features(m, q);
  for (double& v : features.data()) {
    v = features_rng.uniform();
  }
  const kernel::LocationSet locations(q, std::vector<double>(features.data().begin(), features.data().end()));
  const kernel::MaternParams truth = generating_params().with_variance(1.0);
  const linalg::SpdFactor factor = linalg::spd_factor(kernel::kernel_matrix(locations, locations, truth));

  std::vector<double> z(m);
  for (double& v : z) {
    v = latent_rng.normal();
  }
  std::vector<double> latent(m, 0.0);
  const linalg::Matrix& lower = factor.lower();
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) {
      s += lower(i, j) * z[j];
    }
    latent[i] = s;
  }

  // Centre at the midpoint of the two middle order statistics.
  std::vector<double> sorted = latent;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  std::vector<int> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    labels[i] = latent[i] > median ? 1 : -1;
  }

  if (unit_norm_rows) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto row = features.row(i);
      double ss = 0.0;
      for (double v : row) {
        ss += v * v;
      }
      const double norm = std::sqrt(ss);
      for (double& v : row) {
        v /= norm;
      }
    }
  }
  return {std::move(features), std::move(labels)};
}

std::vector<int> classify(const LabeledSet& train, const linalg::Matrix& test_features, const ReducedParams& params,
                          std::size_t k) {
  if (k == 0 || k > train.size()) {
    raise(ErrorKind::domain, "classify: k must lie in [1, train size]");
  }
  if (test_features.cols() != train.dimension()) {
    raise(ErrorKind::shape_mismatch, "classify: test features differ in dimension from training data");
  }
  const kernel::LocationSet locations = train.locations();
  std::vector<int> out(test_features.rows());
  parallel_for(test_features.rows(), [&](std::size_t t) {
    const auto pred = test_features.row(t);
    const std::vector<std::size_t> nn = kriging::nearest_neighbors(locations, pred, k);
    const kriging::KrigingSystem system(locations.subset(nn), {pred.begin(), pred.end()}, params);
    const std::vector<double> w = system.weights().weights;
    double mean = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      mean += w[a] * train.labels()[nn[a]];
    }
    out[t] = sign_label(mean);
  });
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size() || truth.empty()) {
    raise(ErrorKind::shape_mismatch, "accuracy: label vectors differ in length or are empty");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    hits += predicted[i] == truth[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

LooPlan::LooPlan(const LabeledSet& train, std::size_t k) : k_(k), labels_(train.labels().begin(), train.labels().end()) {
  const std::size_t n = train.size();
  if (k == 0 || n < k + 1) {
    raise(ErrorKind::domain, "loo: training set needs at least k + 1 points");
  }
  const linalg::Matrix& x = train.features();
  neighbor_index_.resize(n * k);
  const std::size_t per_point = k + k * (k - 1) / 2;
  slots_.resize(n * per_point);

  std::unordered_map<std::uint64_t, std::uint32_t> pair_slot;
  pair_slot.reserve(n * per_point / 4);
  auto slot_of = [&](std::size_t a, std::size_t b) {
    const std::uint64_t lo = std::min(a, b);
    const std::uint64_t hi = std::max(a, b);
    const auto [it, inserted] = pair_slot.try_emplace((hi << 32) | lo, static_cast<std::uint32_t>(distances_.size()));
    if (inserted) {
      distances_.push_back(kernel::distance(x.row(a), x.row(b)));
    }
    return it->second;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::size_t> nn = nearest_excluding(x, x.row(i), k, i);
    std::copy(nn.begin(), nn.end(), neighbor_index_.begin() + static_cast<std::ptrdiff_t>(i * k));
    std::uint32_t* s = slots_.data() + i * per_point;
    for (std::size_t a = 0; a < k; ++a) {
      *s++ = slot_of(i, nn[a]);
    }
    for (std::size_t a = 1; a < k; ++a) {
      for (std::size_t b = 0; b < a; ++b) {
        *s++ = slot_of(nn[a], nn[b]);
      }
    }
  }
}

std::size_t LooPlan::correct(const ReducedParams& params) const {
  const double omega2 = params.omega2();
  return correct(params.rho(), params.nu(), std::span(&omega2, 1)).front();
}

std::vector<std::size_t> LooPlan::correct(double rho, double nu, std::span<const double> omega2) const {
  const kernel::MaternCorrelation corr(rho, nu);
  std::vector<double> c(distances_.size());
  for (std::size_t i = 0; i < distances_.size(); ++i) {
    c[i] = corr(distances_[i]);
  }

  const std::size_t k = k_;
  const std::size_t per_point = k + k * (k - 1) / 2;
  linalg::Matrix system(k, k);
  std::vector<double> cross(k);
  std::vector<std::size_t> hits(omega2.size(), 0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const std::uint32_t* s = slots_.data() + i * per_point;
    for (std::size_t a = 0; a < k; ++a) {
      cross[a] = c[*s++];
    }
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < a; ++b) {
        const double v = c[s[a * (a - 1) / 2 + b]];
        system(a, b) = v;
        system(b, a) = v;
      }
    }
    const std::uint32_t* nn = neighbor_index_.data() + i * k;
    for (std::size_t o = 0; o < omega2.size(); ++o) {
      for (std::size_t a = 0; a < k; ++a) {
        system(a, a) = 1.0 + omega2[o];
      }
      const std::vector<double> w = linalg::spd_factor(system).solve(cross);
      double mean = 0.0;
      for (std::size_t a = 0; a < k; ++a) {
        mean += w[a] * labels_[nn[a]];
      }
      hits[o] += sign_label(mean) == labels_[i] ? 1 : 0;
    }
  }
  return hits;
}

double LooPlan::accuracy(const ReducedParams& params) const {
  return static_cast<double>(correct(params)) / static_cast<double>(size());
}

double loo_accuracy(const LabeledSet& train, const ReducedParams& params, std::size_t k) {
  return LooPlan(train, k).accuracy(params);
}

std::string_view to_string(Subset subset) {
  switch (subset) {
    case Subset::nu_only: return "nu";
    case Subset::nu_rho: return "nu-rho";
    case Subset::all: return "all";
  }
  return "unknown";
}

GridSpec GridSpec::make(Subset subset, std::size_t values_per_axis) {
  if (values_per_axis == 0) {
    raise(ErrorKind::empty_grid, "grid needs at least one value per axis");
  }
  GridSpec g;
  g.subset = subset;
  g.nu_values = linspace(0.01, 2.5, values_per_axis);
  g.rho_values = subset == Subset::nu_only ? std::vector<double>{fixed_rho} : linspace(0.01, 5.0, values_per_axis);
  g.omega2_values = subset == Subset::all ? linspace(0.001, 0.1, values_per_axis) : std::vector<double>{fixed_omega2};
  return g;
}

ReducedParams GridSpec::at(std::size_t index) const {
  const std::size_t no = omega2_values.size();
  const std::size_t nr = rho_values.size();
  return {rho_values[(index / no) % nr], nu_values[index / (no * nr)], omega2_values[index % no]};
}

GridSearchResult grid_search(const LabeledSet& train, const GridSpec& grid, std::size_t k) {
  const std::size_t points = grid.size();
  if (points == 0) {
    raise(ErrorKind::empty_grid, "grid_search: empty grid");
  }
  const auto start = std::chrono::steady_clock::now();
  const LooPlan plan(train, k);
  // Points come in runs of omega2 values sharing one (rho, nu).
  const std::size_t run = grid.omega2_values.size();
  std::vector<std::size_t> hits(points);
  parallel_for(points / run, [&](std::size_t r) {
    const ReducedParams first = grid.at(r * run);
    const std::vector<std::size_t> h = plan.correct(first.rho(), first.nu(), grid.omega2_values);
    std::copy(h.begin(), h.end(), hits.begin() + static_cast<std::ptrdiff_t>(r * run));
  });

  const std::size_t best = *std::max_element(hits.begin(), hits.end());
  double nu = 0.0;
  double rho = 0.0;
  double omega2 = 0.0;
  std::size_t ties = 0;
  for (std::size_t g = 0; g < points; ++g) {
    if (hits[g] == best) {
      const ReducedParams p = grid.at(g);
      nu += p.nu();
      rho += p.rho();
      omega2 += p.omega2();
      ++ties;
    }
  }
  const double t = static_cast<double>(ties);
  GridSearchResult result{ReducedParams(rho / t, nu / t, omega2 / t), {}, ties};
  result.trial.subset = grid.subset;
  result.trial.train_size = train.size();
  result.trial.accuracy = static_cast<double>(best) / static_cast<double>(train.size());
  result.trial.evaluations = points;
  result.trial.threads = thread_count();
  result.trial.wall_time_s = seconds_since(start);
  return result;
}

std::vector<TrialResult> run_benchmark(const BenchmarkConfig& config) {
  if (config.train_sizes.empty() || config.subsets.empty()) {
    raise(ErrorKind::domain, "run_benchmark: need at least one train size and one subset");
  }
  if (config.test_size == 0 || config.test_size % 2 != 0) {
    raise(ErrorKind::domain, "run_benchmark: test size must be positive and even");
  }
  std::size_t max_size = 0;
  for (std::size_t s : config.train_sizes) {
    if (s < 2 || s % 2 != 0) {
      raise(ErrorKind::domain, "run_benchmark: train sizes must be even and at least 2");
    }
    max_size = std::max(max_size, s);
  }

  std::vector<TrialResult> trials;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    const std::uint64_t iteration_seed = random::derive_seed(config.seed, it);
    const LabeledSet data = synth_dataset(max_size + config.test_size, config.dimension, iteration_seed);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    random::Stream shuffle_rng(iteration_seed, 2);
    for (std::size_t i = order.size(); i-- > 1;) {
      std::swap(order[i], order[shuffle_rng.index(i + 1)]);
    }
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t idx : order) {
      (data.labels()[idx] > 0 ? pos : neg).push_back(idx);
    }

    const std::size_t half_test = config.test_size / 2;
    std::vector<std::size_t> test_idx(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(half_test));
    test_idx.insert(test_idx.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(half_test));
    const LabeledSet test = data.subset(test_idx);

    // Interleaved label pools: every prefix of even length is balanced, and
    // larger training sets extend smaller ones.
    std::vector<std::size_t> pool;
    for (std::size_t i = half_test; i < pos.size() && i < neg.size(); ++i) {
      pool.push_back(pos[i]);
      pool.push_back(neg[i]);
    }

    for (std::size_t size : config.train_sizes) {
      const LabeledSet train = data.subset(std::span(pool).first(size));
      const std::size_t k = std::min(config.k, size - 1);
      for (Subset subset : config.subsets) {
        const auto start = std::chrono::steady_clock::now();
        const GridSearchResult search = grid_search(train, GridSpec::make(subset, config.values_per_axis), k);
        const std::vector<int> predicted = classify(train, test.features(), search.params, k);
        TrialResult trial = search.trial;
        trial.iteration = it;
        trial.accuracy = accuracy(predicted, test.labels());
        trial.wall_time_s = seconds_since(start);
        trials.push_back(trial);
      }
    }
  }
  return trials;
}

std::vector<TrialSummary> summarize(std::span<const TrialResult> trials) {
  std::map<std::pair<std::size_t, int>, TrialSummary> groups;
  for (const TrialResult& t : trials) {
    TrialSummary& s = groups[{t.train_size, static_cast<int>(t.subset)}];
    s.subset = t.subset;
    s.train_size = t.train_size;
    s.evaluations = t.evaluations;
    s.mean_accuracy += t.accuracy;
    s.mean_wall_time_s += t.wall_time_s;
    ++s.trials;
  }
  std::vector<TrialSummary> out;
  for (auto& [key, s] : groups) {
    s.mean_accuracy /= static_cast<double>(s.trials);
    s.mean_wall_time_s /= static_cast<double>(s.trials);
    out.push_back(s);
  }
  return out;
}

}  // namespace krigesense::classifier
