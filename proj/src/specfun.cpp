#include "bilip/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bilip::specfun {

namespace {

constexpr double kTolerance = 1e-15;
constexpr double kTiny = 1e-300;

// Stirling remainder ln Gamma(a) - [(a - 1/2) ln a - a + ln(2 pi)/2], a >= 10.
double stirling_remainder(double a) {
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  return inv *
         (1.0 / 12.0 -
          inv2 * (1.0 / 360.0 -
                  inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
}

// ln(x^a e^-x / Gamma(a)).
double log_prefactor(double a, double x) {
  if (a >= 10.0) {
    // a ln(x/a) + a - x written as a (log1p(t) - t) keeps the leading terms
    // from cancelling when x is close to a.
    const double t = (x - a) / a;
    const double core = a * (std::log1p(t) - t);
    return core + 0.5 * std::log(a) - 0.5 * std::log(2.0 * std::numbers::pi) -
           stirling_remainder(a);
  }
  return a * std::log(x) - x - ln_gamma(a);
}

void check_domain(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::domain_error("regularized_lower_gamma: shape must be positive and finite, got " +
                            std::to_string(a));
  }
  if (!(x >= 0.0)) {
    throw std::domain_error("regularized_lower_gamma: x must be >= 0, got " + std::to_string(x));
  }
}

struct Partial {
  double log_value;
  int iterations;
  bool converged;
};

// ln of sum_{n>=0} x^n / (a (a+1) ... (a+n)).
Partial lower_series(double a, double x, int cap) {
  double term = 1.0 / a;
  double sum = term;
  int n = 1;
  bool converged = false;
  for (; n <= cap; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kTolerance) {
      converged = true;
      break;
    }
  }
  return {std::log(sum), std::min(n, cap), converged};
}

// ln of the continued fraction for Gamma(a, x) e^x x^-a (modified Lentz).
Partial upper_fraction(double a, double x, int cap) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  int i = 1;
  bool converged = false;
  for (; i <= cap; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kTolerance) {
      converged = true;
      break;
    }
  }
  return {std::log(h), std::min(i, cap), converged};
}

}  // namespace

double ln_gamma(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::domain_error("ln_gamma: argument must be positive and finite, got " +
                            std::to_string(a));
  }
  int sign = 1;
  return ::lgamma_r(a, &sign);
}

int gamma_iteration_cap(double a) {
  return 500 + 10 * static_cast<int>(std::ceil(std::sqrt(a)));
}

RegularizedGammaResult regularized_lower_gamma(double a, double x) {
  check_domain(a, x);
  RegularizedGammaResult out;
  if (x == 0.0) {
    out.value = 0.0;
    out.log_value = -std::numeric_limits<double>::infinity();
    return out;
  }
  if (std::isinf(x)) {
    out.value = 1.0;
    out.log_value = 0.0;
    return out;
  }
  const int cap = gamma_iteration_cap(a);
  const double log_pre = log_prefactor(a, x);
  if (x < a + 1.0) {
    const Partial s = lower_series(a, x, cap);
    out.log_value = std::min(0.0, log_pre + s.log_value);
    out.value = std::exp(out.log_value);
    out.iterations = s.iterations;
    out.converged = s.converged;
  } else {
    const Partial f = upper_fraction(a, x, cap);
    const double upper = std::exp(log_pre + f.log_value);
    out.value = 1.0 - upper;
    out.log_value = std::log1p(-std::min(upper, 1.0));
    out.iterations = f.iterations;
    out.converged = f.converged;
  }
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

double regularized_upper_gamma(double a, double x) {
  check_domain(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::clamp(1.0 - regularized_lower_gamma(a, x).value, 0.0, 1.0);
  const Partial f = upper_fraction(a, x, gamma_iteration_cap(a));
  return std::clamp(std::exp(log_prefactor(a, x) + f.log_value), 0.0, 1.0);
}

double erf(double x) { return std::erf(x); }

double erfc(double x) { return std::erfc(x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) {
    throw std::domain_error("normal_quantile: p must lie in [0, 1]");
  }
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();

  // Acklam's rational approximation, then Halley refinement against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int it = 0; it < 2; ++it) {
    // Work on the smaller tail so the residual keeps relative precision.
    const double e = (x < 0.0) ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace bilip::specfun
