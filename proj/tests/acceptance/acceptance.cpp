// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/core.h>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bessel_oracle.hpp"
#include "dense_oracle.hpp"
#include "krigesense/classifier.hpp"
#include "krigesense/error.hpp"
#include "krigesense/identifiability.hpp"
#include "krigesense/kernel.hpp"
#include "krigesense/kriging.hpp"
#include "krigesense/sensitivity.hpp"
#include "krigesense/specfun.hpp"
#include "krigesense_cli/cli.hpp"

using namespace krigesense;
using kernel::LocationSet;
using kernel::MaternParams;
using kernel::ReducedParams;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
    }
    if (!detail.empty()) {
      detail += "; ";
    }
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string pct(double v) { return fmt::format("{:.1f}", v); }

// ---- 1 -------------------------------------------------------------------

Verdict special_functions() {
  Verdict v;
  std::vector<std::pair<double, double>> lattice;
  for (int i = 0; i < 20; ++i) {
    const double nu = 0.05 + (5.0 - 0.05) * i / 19.0;
    for (int j = 0; j < 10; ++j) {
      const double x = 0.05 * std::pow(1000.0, j / 9.0);
      lattice.emplace_back(nu, x);
    }
  }
  std::vector<double> got(lattice.size());
  const auto start = Clock::now();
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    got[i] = specfun::bessel_k(lattice[i].first, lattice[i].second);
  }
  std::vector<double> x_half(100);
  std::vector<std::array<double, 3>> half(100);
  for (std::size_t i = 0; i < 100; ++i) {
    x_half[i] = 0.05 + 0.5 * i;
    half[i] = {specfun::bessel_k(0.5, x_half[i]), specfun::bessel_k(1.5, x_half[i]), specfun::bessel_k(2.5, x_half[i])};
  }
  const double elapsed = seconds_since(start);

  double worst = 0.0;
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    worst = std::max(worst, rel_err(got[i], oracle::bessel_k(lattice[i].first, lattice[i].second)));
  }
  double worst_half = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const double x = x_half[i];
    const double base = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
    worst_half = std::max(worst_half, rel_err(half[i][0], base));
    worst_half = std::max(worst_half, rel_err(half[i][1], base * (1.0 + 1.0 / x)));
    worst_half = std::max(worst_half, rel_err(half[i][2], base * (1.0 + 3.0 / x + 3.0 / (x * x))));
  }
  v.require(worst <= 1e-10, fmt::format("lattice max rel err {:.2e} (<= 1e-10)", worst));
  v.require(worst_half <= 1e-12, fmt::format("half-integer max rel err {:.2e} (<= 1e-12)", worst_half));
  v.require(elapsed < 1.0, fmt::format("evaluation {:.3f} s (< 1 s)", elapsed));
  return v;
}

// ---- 2 -------------------------------------------------------------------

Verdict matern_special_cases() {
  Verdict v;
  const auto start = Clock::now();
  double worst_exp = 0.0;
  double worst_rbf = 0.0;
  for (double rho : {0.05, 0.7, 3.0}) {
    const MaternParams p(2.3, rho, 0.5, 0.0);
    for (int i = 0; i < 100; ++i) {
      const double d = 5.0 * i / 99.0;
      const double want = 2.3 * std::exp(-d / rho);
      worst_exp = std::max(worst_exp, std::abs(kernel::matern_covariance(d, p) - want) / 2.3);
      const double rbf = std::exp(-d * d / (2.0 * rho * rho));
      worst_rbf = std::max(worst_rbf, std::abs(kernel::matern_correlation(d, rho, 50.0) - rbf));
    }
  }
  const double elapsed = seconds_since(start);
  v.require(worst_exp <= 1e-12, fmt::format("nu=1/2 max err {:.2e} (<= 1e-12)", worst_exp));
  v.require(worst_rbf <= 5e-3, fmt::format("nu=50 vs RBF max err {:.2e} (<= 5e-3)", worst_rbf));
  v.require(elapsed < 1.0, fmt::format("{:.3f} s (< 1 s)", elapsed));
  return v;
}

// ---- shared random systems -------------------------------------------------

struct RandomSystem {
  LocationSet train;
  std::vector<double> pred;
  MaternParams params;
  std::vector<double> y;
};

RandomSystem random_system(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t dim = 1 + rng() % 2;
  const std::size_t n = 2 + rng() % 24;
  std::vector<double> coords(n * dim);
  for (double& c : coords) {
    c = u(rng);
  }
  std::vector<double> pred(dim);
  for (double& c : pred) {
    c = u(rng);
  }
  const double sigma2 = 0.1 + 4.9 * u(rng);
  const double rho = 0.01 + 4.99 * u(rng);
  const double nu = 0.01 + 2.49 * u(rng);
  const double omega2 = 0.001 + 0.099 * u(rng);
  std::normal_distribution<double> normal;
  std::vector<double> y(n);
  for (double& x : y) {
    x = normal(rng);
  }
  return {LocationSet(dim, coords), pred, MaternParams(sigma2, rho, nu, omega2 * sigma2), y};
}

// ---- 3 -------------------------------------------------------------------

Verdict kriging_correctness() {
  Verdict v;
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  double worst_w = 0.0;
  double worst_mean = 0.0;
  double worst_var = 0.0;
  double worst_ll = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const RandomSystem s = random_system(rng);
    const std::size_t n = s.train.size();
    oracle::Dense k(n);
    std::vector<long double> c(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        k(i, j) = kernel::matern_covariance(kernel::distance(s.train.point(i), s.train.point(j)), s.params);
      }
      c[i] = kernel::matern_covariance(kernel::distance(s.train.point(i), s.pred), s.params);
      if (kernel::distance(s.train.point(i), s.pred) == 0.0) {
        c[i] -= s.params.tau2();
      }
    }
    const oracle::Dense kinv = oracle::inverse(k);
    const auto w = oracle::multiply(kinv, c);
    long double quad = 0.0L;
    long double mean = 0.0L;
    long double scale = 0.0L;
    long double w_scale = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      quad += w[i] * c[i];
      mean += w[i] * s.y[i];
      scale += std::abs(w[i] * s.y[i]);
      w_scale = std::max(w_scale, std::abs(w[i]));
    }
    const auto kinv_y = oracle::multiply(kinv, std::vector<long double>(s.y.begin(), s.y.end()));
    long double yky = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      yky += s.y[i] * kinv_y[i];
    }
    const long double p = static_cast<long double>(s.train.dimension());
    const double want_ll = static_cast<double>(-0.5L * p * std::log(2.0L * std::numbers::pi_v<long double>) -
                                               0.5L * oracle::log_abs_determinant(k) - 0.5L * yky);
    const double want_var = static_cast<double>(s.params.sigma2() - quad);

    const auto got = kriging::kriging_weights(s.train, s.pred, s.params.reduced());
    for (std::size_t i = 0; i < n; ++i) {
      worst_w = std::max(worst_w, static_cast<double>(std::abs(got.weights[i] - w[i]) / w_scale));
    }
    worst_mean = std::max(worst_mean,
                          static_cast<double>(std::abs(kriging::predict_mean(got, s.y) - mean) / scale));
    worst_var = std::max(worst_var, rel_err(kriging::kriging_variance(s.train, s.pred, s.params), want_var));
    worst_ll = std::max(worst_ll, rel_err(kriging::log_likelihood(s.train, s.y, s.params), want_ll));
  }
  const double elapsed = seconds_since(start);
  v.require(worst_w <= 1e-8, fmt::format("weights {:.2e}", worst_w));
  v.require(worst_mean <= 1e-8, fmt::format("mean {:.2e}", worst_mean));
  v.require(worst_var <= 1e-8, fmt::format("variance {:.2e}", worst_var));
  v.require(worst_ll <= 1e-8, fmt::format("loglik {:.2e}", worst_ll));
  v.require(elapsed < 60.0, fmt::format("{:.2f} s", elapsed));
  return v;
}

// ---- 4 -------------------------------------------------------------------

Verdict variance_ratio_invariance() {
  Verdict v;
  std::mt19937_64 rng(77);
  double worst_w = 0.0;
  double worst_var = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const RandomSystem s = random_system(rng);
    const auto& p = s.params;
    const auto base_w = kriging::kriging_weights(s.train, s.pred, p.reduced()).weights;
    const double base_var = kriging::kriging_variance(s.train, s.pred, p);
    for (double c : {0.1, 10.0}) {
      const MaternParams scaled(c * p.sigma2(), p.rho(), p.nu(), c * p.tau2());
      const auto w = kriging::kriging_weights(s.train, s.pred, scaled.reduced()).weights;
      for (std::size_t i = 0; i < w.size(); ++i) {
        worst_w = std::max(worst_w, std::abs(w[i] - base_w[i]));
      }
      worst_var = std::max(worst_var, rel_err(kriging::kriging_variance(s.train, s.pred, scaled), c * base_var));
    }
  }
  v.require(worst_w <= 1e-12, fmt::format("max weight change {:.2e} (<= 1e-12)", worst_w));
  v.require(worst_var <= 1e-12, fmt::format("variance scaling rel err {:.2e} (<= 1e-12)", worst_var));
  return v;
}

// ---- 5 -------------------------------------------------------------------

Verdict collinearity_scan() {
  Verdict v;
  const auto start = Clock::now();
  identifiability::ScanConfig config;
  config.resolution = 40;
  const std::vector<identifiability::OutputKind> outputs = {identifiability::OutputKind::correlation_curve,
                                                            identifiability::OutputKind::kriging_weights};
  const auto cells = identifiability::collinearity_scan(config, outputs);
  const double elapsed = seconds_since(start);

  std::size_t collinear_corr = 0;
  std::size_t collinear_weights = 0;
  std::size_t failed = 0;
  std::size_t low_hits = 0;
  std::size_t low_total = 0;
  std::size_t high_hits = 0;
  std::size_t high_total = 0;
  for (const auto& c : cells) {
    if (!c.error.empty()) {
      ++failed;
    }
    const bool corr = c.gamma_correlation && *c.gamma_correlation > identifiability::collinear_above;
    collinear_corr += corr ? 1 : 0;
    collinear_weights += c.gamma_weights && *c.gamma_weights > identifiability::collinear_above ? 1 : 0;
    if (c.gamma_correlation) {
      if (c.nu_index < 10) {
        ++low_total;
        low_hits += corr ? 1 : 0;
      } else if (c.nu_index >= 30) {
        ++high_total;
        high_hits += corr ? 1 : 0;
      }
    }
  }
  const double low = low_total ? static_cast<double>(low_hits) / low_total : 0.0;
  const double high = high_total ? static_cast<double>(high_hits) / high_total : 0.0;
  v.require(collinear_corr > 0, fmt::format("correlation gamma>20 cells {}", collinear_corr));
  v.require(collinear_weights > 0, fmt::format("weights gamma>20 cells {}", collinear_weights));
  v.require(high > low, fmt::format("collinear fraction top nu quartile {:.3f} > bottom {:.3f}", high, low));
  v.require(elapsed < 120.0, fmt::format("{:.1f} s, {} failed cells", elapsed, failed));
  return v;
}

// ---- 6 -------------------------------------------------------------------

Verdict sobol_calibration() {
  Verdict v;
  const auto start = Clock::now();
  const double pi = std::numbers::pi;
  const sensitivity::ParamBox cube({{"x1", -pi, pi}, {"x2", -pi, pi}, {"x3", -pi, pi}});
  const double a = 7.0;
  const double b = 0.1;
  const auto ishigami = [&](std::span<const double> x) {
    return std::sin(x[0]) + a * std::sin(x[1]) * std::sin(x[1]) + b * std::pow(x[2], 4) * std::sin(x[0]);
  };
  const double pi4 = std::pow(pi, 4);
  const double pi8 = pi4 * pi4;
  const double var = a * a / 8.0 + b * pi4 / 5.0 + b * b * pi8 / 18.0 + 0.5;
  const double v1 = 0.5 * std::pow(1.0 + b * pi4 / 5.0, 2);
  const double v13 = b * b * pi8 * (1.0 / 18.0 - 1.0 / 50.0);
  const std::vector<double> want = {(v1 + v13) / var, a * a / 8.0 / var, v13 / var};
  const auto r = sensitivity::sobol_total(ishigami, cube, std::nullopt, {.base_count = 4096, .seed = 11});
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs(r.total_index[i] - want[i]));
  }

  const sensitivity::ParamBox square({{"u", 0.0, 1.0}, {"w", 0.0, 1.0}});
  const auto additive = sensitivity::sobol_total([](std::span<const double> x) { return x[0] + x[1]; }, square,
                                                 std::nullopt, {.base_count = 4096, .seed = 12});
  const double elapsed = seconds_since(start);
  v.require(worst <= 0.05, fmt::format("Ishigami max |T - T_exact| {:.4f} (<= 0.05)", worst));
  v.require(std::abs(additive.percent_share[0] - 50.0) <= 5.0,
            fmt::format("additive shares {}/{}", pct(additive.percent_share[0]), pct(additive.percent_share[1])));
  v.require(elapsed < 30.0, fmt::format("{:.2f} s", elapsed));
  return v;
}

// ---- 7, 8 ----------------------------------------------------------------

struct Shares {
  std::map<std::string, double> share;
  std::map<std::string, double> halfwidth;
};

Shares study(std::size_t dim, sensitivity::Response response, std::optional<double> omega2, std::uint64_t seed) {
  sensitivity::StudyConfig config;
  config.grid_dimension = dim;
  config.response = response;
  config.fixed_omega2 = omega2;
  config.base_count = 2048;
  config.seed = seed;
  const auto r = sensitivity::run_study(config);
  Shares s;
  for (std::size_t i = 0; i < r.inputs.size(); ++i) {
    s.share[r.inputs[i]] = r.percent_share[i];
    s.halfwidth[r.inputs[i]] = r.share_bootstrap_halfwidth[i];
  }
  return s;
}

std::string row(const Shares& s) {
  std::string out;
  for (const char* name : {"sigma2", "rho", "nu", "omega2", "x"}) {
    if (s.share.contains(name)) {
      out += fmt::format("{}{}={}", out.empty() ? "" : " ", name, pct(s.share.at(name)));
    }
  }
  return out;
}

Verdict table_reproduction(std::size_t dim, double x_floor, std::uint64_t seed) {
  using sensitivity::Response;
  Verdict v;
  const auto start = Clock::now();
  const Shares zero = study(dim, Response::weights, 0.0, seed);
  v.require(zero.share.at("rho") < 5.0 && zero.share.at("x") > x_floor,
            fmt::format("(a) omega2=0 [{}] rho<5 x>{}", row(zero), x_floor));

  bool ordering = true;
  std::string fixed;
  for (double omega2 : {0.0, 0.001, 0.01, 0.1}) {
    const Shares s = omega2 == 0.0 ? zero : study(dim, Response::weights, omega2, seed);
    const double nu = s.share.at("nu");
    const double rho = s.share.at("rho");
    bool ok = nu > rho;
    if (omega2 == 0.1 && !ok) {
      ok = rho - nu <= s.halfwidth.at("nu") + s.halfwidth.at("rho");
    }
    ordering = ordering && ok;
    fixed += fmt::format("{}{}:nu={} rho={}", fixed.empty() ? "" : ", ", omega2, pct(nu), pct(rho));
  }
  v.require(ordering, fmt::format("(b) nu>rho in fixed rows [{}]", fixed));

  const Shares vary = study(dim, Response::weights, std::nullopt, seed);
  bool all_above = true;
  for (const auto& [name, share] : vary.share) {
    all_above = all_above && share > 5.0;
  }
  v.require(all_above, fmt::format("(c) vary row all >5 [{}]", row(vary)));

  const Shares var = study(dim, Response::prediction_variance, std::nullopt, seed);
  const auto& vs = var.share;
  v.require(vs.at("nu") > vs.at("sigma2") && vs.at("sigma2") > vs.at("rho") && vs.at("rho") > vs.at("omega2"),
            fmt::format("(d) variance nu>sigma2>rho>omega2 [{}]", row(var)));
  const double elapsed = seconds_since(start);
  v.require(elapsed < 300.0, fmt::format("{:.1f} s", elapsed));
  return v;
}

// ---- 9 -------------------------------------------------------------------

Verdict classifier_benchmark() {
  using classifier::Subset;
  Verdict v;
  const auto start = Clock::now();
  classifier::BenchmarkConfig config;
  config.train_sizes = {200, 400, 800};
  config.iterations = 10;
  config.seed = 5;
  const auto trials = classifier::run_benchmark(config);
  const auto summary = classifier::summarize(trials);
  const double elapsed = seconds_since(start);

  bool counts = true;
  for (const auto& t : trials) {
    const std::size_t want = t.subset == Subset::nu_only ? 10 : t.subset == Subset::nu_rho ? 100 : 1000;
    counts = counts && t.evaluations == want;
  }
  v.require(counts && trials.size() == 90, "(a) evaluations 10/100/1000");

  std::map<std::pair<std::size_t, Subset>, classifier::TrialSummary> by;
  for (const auto& s : summary) {
    by[{s.train_size, s.subset}] = s;
  }
  std::string ratios;
  for (std::size_t size : config.train_sizes) {
    ratios += fmt::format("{}{}:{:.1f}x", ratios.empty() ? "" : " ", size,
                          by[{size, Subset::all}].mean_wall_time_s / by[{size, Subset::nu_only}].mean_wall_time_s);
  }
  const double ratio = by[{800, Subset::all}].mean_wall_time_s / by[{800, Subset::nu_only}].mean_wall_time_s;
  v.require(ratio >= 20.0, fmt::format("(b) all/nu_only time ratio at 800 {:.1f}x >= 20 [{}]", ratio, ratios));
  const double acc_nu = by[{800, Subset::nu_only}].mean_accuracy;
  const double acc_all = by[{800, Subset::all}].mean_accuracy;
  v.require(std::abs(acc_nu - acc_all) <= 0.02,
            fmt::format("(c) accuracy at 800 nu_only {:.4f} vs all {:.4f}", acc_nu, acc_all));
  v.require(elapsed < 600.0, fmt::format("{:.1f} s", elapsed));
  return v;
}

// ---- 10 ------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Drops the named CSV column (no quoted fields in these tables).
std::string drop_column(const std::string& csv, const std::string& column) {
  std::istringstream in(csv);
  std::string line;
  std::string out;
  std::size_t drop = std::string::npos;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) {
      fields.push_back(f);
    }
    if (drop == std::string::npos) {
      drop = static_cast<std::size_t>(std::find(fields.begin(), fields.end(), column) - fields.begin());
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i != drop) {
        out += fields[i] + ",";
      }
    }
    out += "\n";
  }
  return out;
}

Verdict reproducibility() {
  Verdict v;
  const auto dir = std::filesystem::temp_directory_path() / "krigesense_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<std::string>> studies = {
      {"weights", "--dim", "2", "--rho", "0.8", "--nu", "1.7"},
      {"collinearity", "--resolution", "6"},
      {"sobol", "--dim", "1", "--response", "weights", "--omega2", "vary", "--n", "256", "--seed", "3"},
      {"sobol", "--dim", "2", "--response", "variance", "--n", "256", "--seed", "4"},
      {"classify-bench", "--sizes", "60,80", "--iters", "2", "--k", "10", "--subset", "compare", "--test-size",
       "20", "--grid-values", "3", "--seed", "9"},
  };
  std::size_t identical = 0;
  std::size_t runs = 0;
  for (std::size_t s = 0; s < studies.size(); ++s) {
    std::string reference;
    for (const char* threads : {"1", "4", "4"}) {
      ::setenv("KRIGESENSE_THREADS", threads, 1);
      const auto path = dir / fmt::format("study{}_{}_{}.csv", s, threads, runs);
      auto args = studies[s];
      args.push_back("--out");
      args.push_back(path.string());
      std::ostringstream out;
      std::ostringstream err;
      const int code = cli::run_cli(args, out, err);
      ++runs;
      if (code != 0) {
        v.require(false, fmt::format("{} exited {}: {}", studies[s][0], code, err.str()));
        continue;
      }
      const std::string csv = drop_column(slurp(path), "wall_time_s");
      if (reference.empty()) {
        reference = csv;
        ++identical;
      } else if (csv == reference) {
        ++identical;
      }
    }
  }
  ::unsetenv("KRIGESENSE_THREADS");
  std::filesystem::remove_all(dir);
  v.require(identical == runs, fmt::format("{}/{} runs byte-identical across KRIGESENSE_THREADS=1,4", identical, runs));
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "special functions", special_functions},
      {2, "Matern special cases", matern_special_cases},
      {3, "kriging vs dense oracle", kriging_correctness},
      {4, "sigma2/tau2 ratio invariance", variance_ratio_invariance},
      {5, "collinearity scan 40x40", collinearity_scan},
      {6, "Sobol calibration", sobol_calibration},
      {7, "1-D sensitivity table", [] { return table_reproduction(1, 55.0, 21); }},
      {8, "2-D sensitivity table", [] { return table_reproduction(2, 60.0, 22); }},
      {9, "classifier benchmark", classifier_benchmark},
      {10, "CLI reproducibility", reproducibility},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failures += v.pass ? 0 : 1;
    fmt::print("{} {:>2} {}: {}\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
