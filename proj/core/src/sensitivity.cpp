#include "krigesense/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "krigesense/error.hpp"
#include "krigesense/kriging.hpp"
#include "krigesense/parallel.hpp"
#include "krigesense/random.hpp"

namespace krigesense::sensitivity {
namespace {

constexpr std::size_t min_base_count = 256;
constexpr double noise_floor = -0.05;

// Seed streams for the independent parts of one estimate.
enum Stream : std::uint64_t { lhs_stream = 0, a_stream = 1, b_stream = 2, bootstrap_stream = 3 };

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double halfwidth(const std::vector<double>& draws) {
  return 0.5 * (quantile(draws, 0.975) - quantile(draws, 0.025));
}

double sample_variance(std::span<const double> values, std::span<const std::size_t> rows) {
  double mean = 0.0;
  for (std::size_t r : rows) {
    mean += values[r];
  }
  mean /= static_cast<double>(rows.size());
  double ss = 0.0;
  for (std::size_t r : rows) {
    ss += (values[r] - mean) * (values[r] - mean);
  }
  return ss / static_cast<double>(rows.size() - 1);
}

}  // namespace

ParamBox::ParamBox(std::vector<ParamRange> ranges) : ranges_(std::move(ranges)) {
  if (ranges_.empty()) {
    raise(ErrorKind::domain, "parameter box has no active parameters");
  }
  for (const auto& r : ranges_) {
    if (!(r.min < r.max) || !std::isfinite(r.min) || !std::isfinite(r.max)) {
      raise(ErrorKind::domain, "parameter box: degenerate range for " + r.name);
    }
  }
}

ParamBox ParamBox::defaults() {
  return ParamBox({{"sigma2", 0.1, 5.0}, {"rho", 0.01, 5.0}, {"nu", 0.01, 2.5}, {"omega2", 0.001, 0.1}});
}

const ParamRange& ParamBox::find(const std::string& name) const {
  for (const auto& r : ranges_) {
    if (r.name == name) {
      return r;
    }
  }
  raise(ErrorKind::domain, "parameter box has no parameter named " + name);
}

ParamBox ParamBox::select(const std::vector<std::string>& names) const {
  std::vector<ParamRange> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    out.push_back(find(n));
  }
  return ParamBox(std::move(out));
}

linalg::Matrix lhs_sample(std::size_t count, const ParamBox& box, std::uint64_t seed) {
  const std::size_t p = box.size();
  if (count < p || count == 0) {
    raise(ErrorKind::domain, "lhs_sample: need at least as many points as parameters");
  }
  random::Stream rng(seed);
  linalg::Matrix design(count, p);
  std::vector<std::size_t> strata(count);
  for (std::size_t j = 0; j < p; ++j) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    for (std::size_t i = count; i-- > 1;) {
      std::swap(strata[i], strata[rng.index(i + 1)]);
    }
    for (std::size_t i = 0; i < count; ++i) {
      const double unit = (static_cast<double>(strata[i]) + rng.uniform()) / static_cast<double>(count);
      design(i, j) = box.scale(j, unit);
    }
  }
  return design;
}

StudyDesign StudyDesign::grid(std::size_t dimension) {
  if (dimension == 1) {
    return {kernel::make_grid(1, 21, std::vector<double>{0.5}), {0.5}};
  }
  if (dimension == 2) {
    return {kernel::make_grid(2, 4), {0.5, 0.5}};
  }
  raise(ErrorKind::domain, "study grid dimension must be 1 or 2");
}

double response_weights(const StudyDesign& design, const kernel::ReducedParams& theta, std::size_t location_index) {
  if (location_index >= design.train.size()) {
    raise(ErrorKind::domain, "response_weights: location index out of range");
  }
  const kriging::KrigingSystem system(design.train, design.pred, theta);
  return system.weights().weights[location_index];
}

double response_variance(const StudyDesign& design, const kernel::MaternParams& theta) {
  return kriging::kriging_variance(design.train, design.pred, theta);
}

SobolResult sobol_total(const ScalarFunction& f, const ParamBox& box, const std::optional<DiscreteFactor>& factor,
                        const SobolOptions& options) {
  const std::size_t n = options.base_count;
  if (n < min_base_count) {
    raise(ErrorKind::domain, "sobol_total: base_count must be at least 256");
  }
  if (factor && factor->levels == 0) {
    raise(ErrorKind::domain, "sobol_total: discrete factor needs at least one level");
  }
  const std::size_t continuous = box.size();
  const std::size_t k = continuous + (factor ? 1 : 0);

  auto to_input = [&](std::size_t col, double unit) {
    if (col < continuous) {
      return box.scale(col, unit);
    }
    const auto level = std::min(static_cast<std::size_t>(unit * static_cast<double>(factor->levels)),
                                factor->levels - 1);
    return static_cast<double>(level);
  };

  linalg::Matrix a(n, k);
  linalg::Matrix b(n, k);
  {
    random::Stream rng_a(options.seed, a_stream);
    random::Stream rng_b(options.seed, b_stream);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        a(i, c) = to_input(c, rng_a.uniform());
        b(i, c) = to_input(c, rng_b.uniform());
      }
    }
  }
  std::vector<ParamRange> unit_ranges(k, ParamRange{"u", 0.0, 1.0});
  const linalg::Matrix unit_lhs = lhs_sample(n, ParamBox(unit_ranges), random::derive_seed(options.seed, lhs_stream));

  // Row blocks: [0, n) A, [n (1 + i), n (2 + i)) A with column i from B, last n the LHS sample.
  const std::size_t total = n * (k + 2);
  std::vector<double> values(total);
  parallel_for(total, [&](std::size_t idx) {
    const std::size_t block = idx / n;
    const std::size_t row = idx % n;
    std::vector<double> x(k);
    if (block == 0) {
      std::copy(a.row(row).begin(), a.row(row).end(), x.begin());
    } else if (block <= k) {
      std::copy(a.row(row).begin(), a.row(row).end(), x.begin());
      x[block - 1] = b(row, block - 1);
    } else {
      for (std::size_t c = 0; c < k; ++c) {
        x[c] = to_input(c, unit_lhs(row, c));
      }
    }
    values[idx] = f(x);
  });

  const std::span<const double> fa(values.data(), n);
  const std::span<const double> flhs(values.data() + n * (k + 1), n);

  auto estimate = [&](std::span<const std::size_t> rows, std::vector<double>& totals) {
    const double var = sample_variance(flhs, rows);
    totals.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const std::span<const double> fab(values.data() + n * (i + 1), n);
      double s = 0.0;
      for (std::size_t r : rows) {
        const double d = fa[r] - fab[r];
        s += d * d;
      }
      totals[i] = var > 0.0 ? s / (2.0 * static_cast<double>(rows.size()) * var) : 0.0;
    }
    return var;
  };
  auto shares_of = [](const std::vector<double>& totals) {
    const double sum = std::accumulate(totals.begin(), totals.end(), 0.0);
    std::vector<double> shares(totals.size(), 0.0);
    if (sum > 0.0) {
      for (std::size_t i = 0; i < totals.size(); ++i) {
        shares[i] = 100.0 * totals[i] / sum;
      }
    }
    return shares;
  };

  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

  SobolResult result;
  result.variance = estimate(all_rows, result.total_index);
  if (!(result.variance > 0.0)) {
    raise(ErrorKind::undefined_shares, "sobol_total: response has zero variance");
  }
  const double total_sum = std::accumulate(result.total_index.begin(), result.total_index.end(), 0.0);
  if (!(total_sum > 0.0)) {
    raise(ErrorKind::undefined_shares, "sobol_total: total-effect indices sum to zero");
  }
  result.percent_share = shares_of(result.total_index);
  result.evaluations = total;
  result.below_noise_floor = std::any_of(result.total_index.begin(), result.total_index.end(),
                                         [](double t) { return t < noise_floor; });
  for (std::size_t c = 0; c < continuous; ++c) {
    result.inputs.push_back(box[c].name);
  }
  if (factor) {
    result.inputs.push_back(factor->name);
  }

  const std::size_t resamples = options.bootstrap_resamples;
  result.bootstrap_halfwidth.assign(k, 0.0);
  result.share_bootstrap_halfwidth.assign(k, 0.0);
  if (resamples >= 2) {
    std::vector<std::vector<double>> t_draws(k, std::vector<double>(resamples));
    std::vector<std::vector<double>> s_draws(k, std::vector<double>(resamples));
    random::Stream rng(options.seed, bootstrap_stream);
    std::vector<std::size_t> rows(n);
    std::vector<double> totals;
    for (std::size_t r = 0; r < resamples; ++r) {
      for (auto& row : rows) {
        row = rng.index(n);
      }
      estimate(rows, totals);
      const std::vector<double> shares = shares_of(totals);
      for (std::size_t i = 0; i < k; ++i) {
        t_draws[i][r] = totals[i];
        s_draws[i][r] = shares[i];
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      result.bootstrap_halfwidth[i] = halfwidth(t_draws[i]);
      result.share_bootstrap_halfwidth[i] = halfwidth(s_draws[i]);
    }
  }
  return result;
}

std::vector<std::string> study_inputs(const StudyConfig& config) {
  std::vector<std::string> names;
  if (config.include_sigma2()) {
    names.emplace_back("sigma2");
  }
  names.emplace_back("rho");
  names.emplace_back("nu");
  if (!config.fixed_omega2) {
    names.emplace_back("omega2");
  }
  if (config.response == Response::weights) {
    names.emplace_back("x");
  }
  return names;
}

SobolResult run_study(const StudyConfig& config) {
  const StudyDesign design = StudyDesign::grid(config.grid_dimension);
  if (config.fixed_omega2 && !(*config.fixed_omega2 >= 0.0)) {
    raise(ErrorKind::domain, "run_study: fixed omega2 must be nonnegative");
  }

  std::vector<std::string> continuous = study_inputs(config);
  if (config.response == Response::weights) {
    continuous.pop_back();
  }
  const ParamBox box = config.box.select(continuous);

  // Column positions of each named parameter inside the sampled input vector.
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(continuous.begin(), continuous.end(), name);
    if (it == continuous.end()) {
      return std::nullopt;
    }
    return static_cast<std::size_t>(it - continuous.begin());
  };
  const std::optional<std::size_t> sigma2_col = column("sigma2");
  const std::size_t rho_col = *column("rho");
  const std::size_t nu_col = *column("nu");
  const std::optional<std::size_t> omega2_col = column("omega2");
  const double fixed_omega2 = config.fixed_omega2.value_or(0.0);

  auto omega2_of = [&](std::span<const double> x) { return omega2_col ? x[*omega2_col] : fixed_omega2; };

  const SobolOptions options{config.base_count, config.seed, 200};
  if (config.response == Response::weights) {
    const ScalarFunction f = [&](std::span<const double> x) {
      const kernel::ReducedParams theta(x[rho_col], x[nu_col], omega2_of(x));
      return response_weights(design, theta, static_cast<std::size_t>(x.back()));
    };
    return sobol_total(f, box, DiscreteFactor{"x", design.train.size()}, options);
  }
  const ScalarFunction f = [&](std::span<const double> x) {
    const double sigma2 = x[*sigma2_col];
    const kernel::MaternParams theta(sigma2, x[rho_col], x[nu_col], omega2_of(x) * sigma2);
    return response_variance(design, theta);
  };
  return sobol_total(f, box, std::nullopt, options);
}

}  // namespace krigesense::sensitivity
