#include "krigesense/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "krigesense/error.hpp"

namespace krigesense::specfun {
namespace {

constexpr double series_eps = 1e-17;
constexpr int max_iterations = 100000;
constexpr double large_argument = 1e5;

// Taylor coefficients of 1/Gamma(1+z) about z = 0.
constexpr std::array<double, 29> rgamma_taylor = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
};

void check_domain(double nu, double x) {
  if (!(nu >= 0.0) || nu > max_order) {
    raise(ErrorKind::domain, "bessel_k: order must lie in [0, 50], got " + std::to_string(nu));
  }
  if (!(x > 0.0) || x > max_argument) {
    raise(ErrorKind::domain, "bessel_k: argument must lie in (0, 700], got " + std::to_string(x));
  }
}

}  // namespace

BesselK::BesselK(double nu) : nu_(nu) {
  if (!(nu >= 0.0) || nu > max_order) {
    raise(ErrorKind::domain, "bessel_k: order must lie in [0, 50], got " + std::to_string(nu));
  }
  steps_ = static_cast<int>(nu + 0.5);
  mu_ = nu - steps_;

  // Even and odd parts of the reciprocal gamma series give gam2 and gam1
  // without the cancellation that direct differencing suffers near mu = 0:
  // gam2 = sum_{j even} a_j mu^j, gam1 = -sum_{j odd} a_j mu^(j-1).
  double even = 0.0;
  double odd = 0.0;
  double mu_pow = 1.0;
  for (std::size_t j = 0; j < rgamma_taylor.size(); j += 2) {
    even += rgamma_taylor[j] * mu_pow;
    if (j + 1 < rgamma_taylor.size()) {
      odd += rgamma_taylor[j + 1] * mu_pow;
    }
    mu_pow *= mu_ * mu_;
  }
  gam2_ = even;
  gam1_ = -odd;
  rgam_plus_ = gam2_ - mu_ * gam1_;
  rgam_minus_ = gam2_ + mu_ * gam1_;

  const double pi_mu = std::numbers::pi * mu_;
  pi_mu_over_sin_ = std::abs(pi_mu) < 1e-15 ? 1.0 : pi_mu / std::sin(pi_mu);
}

BesselK::Scaled BesselK::evaluate(double x) const {
  double log_scale = 0.0;
  double k_mu = 0.0;
  double k_mu1 = 0.0;
  const double mu2 = mu_ * mu_;

  if (x > large_argument) {
    // Hankel expansion, for arguments far beyond the supported range where the
    // continued fraction loses its accuracy to cancellation.
    const double four_nu2 = 4.0 * nu_ * nu_;
    const double eight_x = 8.0 * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 60; ++k) {
      const double odd = 2.0 * k - 1.0;
      term *= (four_nu2 - odd * odd) / (k * eight_x);
      sum += term;
      if (std::abs(term) < std::abs(sum) * series_eps) {
        break;
      }
    }
    return {0.5 * std::log(std::numbers::pi / (2.0 * x)) - x + std::log(sum), 1.0};
  }

  if (x < 1e-250) {
    // Leading small-argument behaviour; outside the accuracy contract.
    if (nu_ == 0.0) {
      return {0.0, -std::log(0.5 * x) - std::numbers::egamma};
    }
    return {std::lgamma(nu_) - std::log(2.0) + nu_ * std::log(2.0 / x), 1.0};
  }

  if (x < 2.0) {
    // Temme's series for K_mu and K_{mu+1}.
    const double half_x = 0.5 * x;
    const double d = -std::log(half_x);
    const double e = mu_ * d;
    const double sinh_ratio = std::abs(e) < 1e-15 ? 1.0 : std::sinh(e) / e;
    double ff = pi_mu_over_sin_ * (gam1_ * std::cosh(e) + gam2_ * sinh_ratio * d);
    double sum = ff;
    const double exp_e = std::exp(e);
    double p = 0.5 * exp_e / rgam_plus_;
    double q = 0.5 / (exp_e * rgam_minus_);
    double c = 1.0;
    const double quarter_x2 = half_x * half_x;
    double sum1 = p;
    int i = 1;
    for (; i <= max_iterations; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
      c *= quarter_x2 / i;
      p /= i - mu_;
      q /= i + mu_;
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * series_eps) {
        break;
      }
    }
    if (i > max_iterations) {
      raise(ErrorKind::evaluation_failure, "bessel_k: series failed to converge");
    }
    if (x > 1e-100) {
      k_mu = sum;
      k_mu1 = sum1 * (2.0 / x);
    } else {
      log_scale = std::log(sum);
      k_mu = 1.0;
      k_mu1 = std::exp(std::log(sum1) + std::log(2.0 / x) - log_scale);
    }
  } else {
    // Steed's continued fraction for K_{mu+1}/K_mu, with Temme's normalisation.
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 1;
    for (; i <= max_iterations; ++i) {
      a -= 2 * i;
      c = -a * c / (i + 1.0);
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < series_eps) {
        break;
      }
    }
    if (i > max_iterations) {
      raise(ErrorKind::evaluation_failure, "bessel_k: continued fraction failed to converge");
    }
    h *= a1;
    const double ratio = (mu_ + x + 0.5 - h) / x;
    if (x <= max_argument) {
      k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
      k_mu1 = k_mu * ratio;
    } else {
      log_scale = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x - std::log(s);
      k_mu = 1.0;
      k_mu1 = ratio;
    }
  }

  // Forward recurrence K_{m+1} = (2m/x) K_m + K_{m-1} is stable for K.
  const double two_over_x = 2.0 / x;
  for (int i = 1; i <= steps_; ++i) {
    if (k_mu1 > 1e100 || x < 1e-100) {
      log_scale += std::log(k_mu1);
      k_mu /= k_mu1;
      k_mu1 = 1.0;
    }
    const double next = (mu_ + i) * two_over_x * k_mu1 + k_mu;
    k_mu = k_mu1;
    k_mu1 = next;
  }
  return {log_scale, k_mu};
}

double BesselK::log_value(double x) const {
  if (!(x > 0.0)) {
    raise(ErrorKind::domain, "bessel_k: argument must be positive, got " + std::to_string(x));
  }
  const Scaled r = evaluate(x);
  return r.log_scale + std::log(r.mantissa);
}

double BesselK::value(double x) const {
  if (!(x > 0.0)) {
    raise(ErrorKind::domain, "bessel_k: argument must be positive, got " + std::to_string(x));
  }
  const Scaled r = evaluate(x);
  const double v = r.log_scale == 0.0 ? r.mantissa : std::exp(r.log_scale + std::log(r.mantissa));
  if (!std::isfinite(v)) {
    raise(ErrorKind::overflow, "bessel_k: K_" + std::to_string(nu_) + "(" + std::to_string(x) +
                                   ") exceeds double range; use bessel_k_log");
  }
  return v;
}

double bessel_k(double nu, double x) {
  check_domain(nu, x);
  return BesselK(nu).value(x);
}

double bessel_k_log(double nu, double x) {
  check_domain(nu, x);
  return BesselK(nu).log_value(x);
}

}  // namespace krigesense::specfun
