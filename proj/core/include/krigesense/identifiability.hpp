#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "krigesense/linalg.hpp"

namespace krigesense::identifiability {

enum class Normalization { raw, unit_column };

// n x p matrix of d y_i / d theta_j.
class SensitivityMatrix {
 public:
  SensitivityMatrix(linalg::Matrix entries, Normalization normalization);

  std::size_t rows() const noexcept { return entries_.rows(); }
  std::size_t cols() const noexcept { return entries_.cols(); }
  const linalg::Matrix& entries() const noexcept { return entries_; }
  Normalization normalization() const noexcept { return normalization_; }

  // Columns with zero Euclidean norm; they stay zero under normalization.
  const std::vector<bool>& zero_columns() const noexcept { return zero_columns_; }
  bool has_zero_column() const;

  // Copy with every nonzero column scaled to unit Euclidean norm.
  SensitivityMatrix normalized() const;

 private:
  linalg::Matrix entries_;
  Normalization normalization_;
  std::vector<bool> zero_columns_;
};

using VectorFunction = std::function<std::vector<double>(std::span<const double>)>;

// Central differences with step rel_step * max(|theta_j|, 1e-3) per parameter.
// Throws ErrorKind::evaluation_failure if f fails or returns non-finite or
// inconsistently sized output at any perturbed point.
SensitivityMatrix local_sensitivities(const VectorFunction& f, std::span<const double> theta, double rel_step = 1e-5);

// Reported in place of +infinity when the normalized Gram matrix is singular.
inline constexpr double gamma_cap = 1e12;

// gamma = 1 / sqrt(min eigenvalue of S^T S) on the column-normalized matrix
// (raw input is normalized first). Minimum eigenvalues within rounding of
// zero, p * 8 * machine epsilon, report gamma_cap. Throws
// ErrorKind::undefined_collinearity for an all-zero column.
double collinearity_index(const SensitivityMatrix& s);

enum class Band { identifiable, borderline, collinear };

inline constexpr double identifiable_below = 10.0;
inline constexpr double collinear_above = 20.0;

Band classify(double gamma);
std::string_view to_string(Band band);

enum class OutputKind { correlation_curve, kriging_weights };

struct ScanConfig {
  double nu_min = 0.01;
  double nu_max = 2.5;
  double rho_min = 0.01;
  double rho_max = 5.0;
  std::size_t resolution = 100;  // grid points per axis, endpoints included
  double omega2 = 0.001;         // nugget ratio for the kriging-weights output
  double rel_step = 1e-5;
};

struct CollinearityCell {
  std::size_t nu_index = 0;
  std::size_t rho_index = 0;
  double nu = 0.0;
  double rho = 0.0;
  std::optional<double> gamma_correlation;
  std::optional<double> gamma_weights;
  std::optional<Band> band_correlation;
  std::optional<Band> band_weights;
  std::string error;  // empty unless some output failed in this cell
};

// Axis values used by the scan: resolution points from lo to hi inclusive
// (the midpoint when resolution is 1).
std::vector<double> scan_axis(double lo, double hi, std::size_t resolution);

// The 20-location 1-D design around the prediction point 0.5 shared by both outputs.
std::vector<double> scan_output(OutputKind kind, double nu, double rho, double omega2);

// Collinearity of (nu, rho) across the grid, ordered by (nu index, rho index).
// Per-cell failures are recorded in the cell and do not stop the scan.
std::vector<CollinearityCell> collinearity_scan(const ScanConfig& config,
                                                std::span<const OutputKind> outputs = {});

}  // namespace krigesense::identifiability
