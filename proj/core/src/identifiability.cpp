#include "krigesense/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "krigesense/error.hpp"
#include "krigesense/kernel.hpp"
#include "krigesense/kriging.hpp"
#include "krigesense/parallel.hpp"

namespace krigesense::identifiability {
namespace {

constexpr double min_step_base = 1e-3;

std::vector<double> evaluate_checked(const VectorFunction& f, std::span<const double> theta,
                                     std::size_t expected_size) {
  std::vector<double> y;
  try {
    y = f(theta);
  } catch (const Error& e) {
    raise(ErrorKind::evaluation_failure, std::string("local_sensitivities: ") + e.what());
  }
  if (expected_size != 0 && y.size() != expected_size) {
    raise(ErrorKind::evaluation_failure, "local_sensitivities: output size changed between evaluations");
  }
  for (double v : y) {
    if (!std::isfinite(v)) {
      raise(ErrorKind::evaluation_failure, "local_sensitivities: non-finite output");
    }
  }
  return y;
}

const kriging::LocationSet& scan_design() {
  static const kriging::LocationSet design = kernel::make_grid(1, 21, std::vector<double>{0.5});
  return design;
}

}  // namespace

SensitivityMatrix::SensitivityMatrix(linalg::Matrix entries, Normalization normalization)
    : entries_(std::move(entries)), normalization_(normalization), zero_columns_(entries_.cols(), false) {
  for (double v : entries_.data()) {
    if (!std::isfinite(v)) {
      raise(ErrorKind::domain, "sensitivity matrix entries must be finite");
    }
  }
  for (std::size_t j = 0; j < entries_.cols(); ++j) {
    bool zero = true;
    for (std::size_t i = 0; i < entries_.rows() && zero; ++i) {
      zero = entries_(i, j) == 0.0;
    }
    zero_columns_[j] = zero;
  }
}

bool SensitivityMatrix::has_zero_column() const {
  return std::find(zero_columns_.begin(), zero_columns_.end(), true) != zero_columns_.end();
}

SensitivityMatrix SensitivityMatrix::normalized() const {
  linalg::Matrix out = entries_;
  for (std::size_t j = 0; j < out.cols(); ++j) {
    if (zero_columns_[j]) {
      continue;
    }
    // Scale first so the sum of squares cannot overflow or underflow.
    double scale = 0.0;
    for (std::size_t i = 0; i < out.rows(); ++i) {
      scale = std::max(scale, std::abs(out(i, j)));
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < out.rows(); ++i) {
      const double v = out(i, j) / scale;
      ss += v * v;
    }
    const double norm = scale * std::sqrt(ss);
    for (std::size_t i = 0; i < out.rows(); ++i) {
      out(i, j) /= norm;
    }
  }
  return {std::move(out), Normalization::unit_column};
}

SensitivityMatrix local_sensitivities(const VectorFunction& f, std::span<const double> theta, double rel_step) {
  if (!(rel_step > 0.0) || !std::isfinite(rel_step)) {
    raise(ErrorKind::domain, "local_sensitivities: rel_step must be positive");
  }
  const std::size_t p = theta.size();
  if (p == 0) {
    raise(ErrorKind::domain, "local_sensitivities: empty parameter vector");
  }
  const std::size_t n = evaluate_checked(f, theta, 0).size();
  linalg::Matrix s(n, p);
  std::vector<double> point(theta.begin(), theta.end());
  for (std::size_t j = 0; j < p; ++j) {
    const double h = rel_step * std::max(std::abs(theta[j]), min_step_base);
    point[j] = theta[j] + h;
    const std::vector<double> up = evaluate_checked(f, point, n);
    point[j] = theta[j] - h;
    const std::vector<double> down = evaluate_checked(f, point, n);
    point[j] = theta[j];
    for (std::size_t i = 0; i < n; ++i) {
      s(i, j) = (up[i] - down[i]) / (2.0 * h);
    }
  }
  return {std::move(s), Normalization::raw};
}

double collinearity_index(const SensitivityMatrix& s) {
  if (s.cols() == 0) {
    raise(ErrorKind::undefined_collinearity, "collinearity_index: no parameters");
  }
  if (s.has_zero_column()) {
    raise(ErrorKind::undefined_collinearity, "collinearity_index: a parameter has zero sensitivity");
  }
  const SensitivityMatrix unit = s.normalization() == Normalization::unit_column ? s : s.normalized();
  const linalg::Matrix& m = unit.entries();
  const std::size_t p = m.cols();
  linalg::Matrix gram(p, p);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) {
        dot += m(i, a) * m(i, b);
      }
      gram(a, b) = dot;
      gram(b, a) = dot;
    }
  }
  const double lambda_min = linalg::sym_eigenvalues(gram).back();
  const double singular = 8.0 * static_cast<double>(p) * std::numeric_limits<double>::epsilon();
  if (!(lambda_min > singular)) {
    return gamma_cap;
  }
  return std::min(gamma_cap, std::max(1.0, 1.0 / std::sqrt(lambda_min)));
}

Band classify(double gamma) {
  if (gamma < identifiable_below) {
    return Band::identifiable;
  }
  if (gamma <= collinear_above) {
    return Band::borderline;
  }
  return Band::collinear;
}

std::string_view to_string(Band band) {
  switch (band) {
    case Band::identifiable: return "identifiable";
    case Band::borderline: return "borderline";
    case Band::collinear: return "collinear";
  }
  return "unknown";
}

std::vector<double> scan_axis(double lo, double hi, std::size_t resolution) {
  if (resolution == 0 || !(lo < hi)) {
    raise(ErrorKind::domain, "scan_axis: need resolution >= 1 and lo < hi");
  }
  if (resolution == 1) {
    return {0.5 * (lo + hi)};
  }
  std::vector<double> v(resolution);
  for (std::size_t i = 0; i < resolution; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
  }
  v.back() = hi;
  return v;
}

std::vector<double> scan_output(OutputKind kind, double nu, double rho, double omega2) {
  const kriging::LocationSet& design = scan_design();
  const std::vector<double> pred = {0.5};
  if (kind == OutputKind::correlation_curve) {
    return kernel::correlation_vector(design, pred, kernel::MaternCorrelation(rho, nu));
  }
  return kriging::kriging_weights(design, pred, kernel::ReducedParams(rho, nu, omega2)).weights;
}

std::vector<CollinearityCell> collinearity_scan(const ScanConfig& config, std::span<const OutputKind> outputs) {
  const std::vector<double> nus = scan_axis(config.nu_min, config.nu_max, config.resolution);
  const std::vector<double> rhos = scan_axis(config.rho_min, config.rho_max, config.resolution);
  if (!(config.nu_min > 0.0) || !(config.rho_min > 0.0)) {
    raise(ErrorKind::domain, "collinearity_scan: parameter ranges must be positive");
  }

  auto wants = [&](OutputKind k) {
    return outputs.empty() || std::find(outputs.begin(), outputs.end(), k) != outputs.end();
  };
  const bool want_corr = wants(OutputKind::correlation_curve);
  const bool want_weights = wants(OutputKind::kriging_weights);

  std::vector<CollinearityCell> cells(nus.size() * rhos.size());
  parallel_for(cells.size(), [&](std::size_t idx) {
    CollinearityCell& cell = cells[idx];
    cell.nu_index = idx / rhos.size();
    cell.rho_index = idx % rhos.size();
    cell.nu = nus[cell.nu_index];
    cell.rho = rhos[cell.rho_index];
    const double theta[2] = {cell.nu, cell.rho};

    auto run = [&](OutputKind kind, std::optional<double>& gamma, std::optional<Band>& band) {
      try {
        const VectorFunction f = [&](std::span<const double> t) {
          return scan_output(kind, t[0], t[1], config.omega2);
        };
        gamma = collinearity_index(local_sensitivities(f, theta, config.rel_step));
        band = classify(*gamma);
      } catch (const Error& e) {
        if (!cell.error.empty()) {
          cell.error += "; ";
        }
        cell.error += e.what();
      }
    };
    if (want_corr) {
      run(OutputKind::correlation_curve, cell.gamma_correlation, cell.band_correlation);
    }
    if (want_weights) {
      run(OutputKind::kriging_weights, cell.gamma_weights, cell.band_weights);
    }
  });
  return cells;
}

}  // namespace krigesense::identifiability
