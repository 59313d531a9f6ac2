#pragma once

namespace krigesense::specfun {

inline constexpr double max_order = 50.0;
inline constexpr double max_argument = 700.0;

// Modified Bessel function of the second kind K_nu(x) for real order.
// Requires nu in [0, 50] and x in (0, 700]. Throws ErrorKind::overflow when the
// value is not representable; use bessel_k_log for tiny x or large orders.
double bessel_k(double nu, double x);

// ln K_nu(x) over the same domain as bessel_k, never overflowing.
double bessel_k_log(double nu, double x);

/// Evaluator for K_nu at a fixed order.
///
/// The order-dependent constants of the Temme series (the reciprocal gamma
/// combinations and pi*mu / sin(pi*mu)) are computed once on construction, so
/// repeated evaluation across many arguments, as in kernel assembly, only pays
/// for the series or continued fraction itself.
///
/// Unlike the free functions, the evaluator accepts any x > 0; above x = 700
/// the result is carried in log space only.
class BesselK {
 public:
  explicit BesselK(double nu);

  double order() const noexcept { return nu_; }

  double log_value(double x) const;

  // Throws ErrorKind::overflow if the result exceeds the double range.
  double value(double x) const;

 private:
  struct Scaled {
    double log_scale;  // result = exp(log_scale) * mantissa
    double mantissa;
  };

  Scaled evaluate(double x) const;

  double nu_;
  double mu_;       // nu - round(nu), in [-1/2, 1/2)
  int steps_;       // forward recurrence steps from mu up to nu
  double gam1_;     // (1/G(1-mu) - 1/G(1+mu)) / (2 mu)
  double gam2_;     // (1/G(1-mu) + 1/G(1+mu)) / 2
  double rgam_plus_;   // 1/G(1+mu)
  double rgam_minus_;  // 1/G(1-mu)
  double pi_mu_over_sin_;
};

}  // namespace krigesense::specfun
