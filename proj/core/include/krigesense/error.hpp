#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace krigesense {

enum class ErrorKind {
  domain,
  overflow,
  shape_mismatch,
  not_symmetric,
  not_positive_definite,
  negative_variance,
  undefined_collinearity,
  undefined_shares,
  evaluation_failure,
  empty_grid,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::shape_mismatch: return "shape_mismatch";
    case ErrorKind::not_symmetric: return "not_symmetric";
    case ErrorKind::not_positive_definite: return "not_positive_definite";
    case ErrorKind::negative_variance: return "negative_variance";
    case ErrorKind::undefined_collinearity: return "undefined_collinearity";
    case ErrorKind::undefined_shares: return "undefined_shares";
    case ErrorKind::evaluation_failure: return "evaluation_failure";
    case ErrorKind::empty_grid: return "empty_grid";
  }
  return "unknown";
}

// All numerical failures raised by the library carry a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace krigesense
