#pragma once

// Special functions behind the Gaussian ball measures: log-gamma, the
// regularized lower incomplete gamma function P(a, x) and the error function.
//
// P(a, x) = gamma(a, x) / Gamma(a), with a the shape parameter. The centered
// standard Gaussian measure of an l2 ball of radius r in R^d is P(d/2, r^2/2).

#include <cstdint>

namespace bilip::specfun {

struct RegularizedGammaResult {
  /// P(a, x), always in [0, 1].
  double value = 0.0;
  /// ln P(a, x); finite even when `value` underflows to 0.
  double log_value = 0.0;
  int iterations = 0;
  /// False only when the iteration cap was hit; `value` is still returned.
  bool converged = true;
};

/// ln Gamma(a) for a > 0. Throws std::domain_error otherwise.
double ln_gamma(double a);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
///
/// Uses the power series for x < a + 1 and the Lentz continued fraction for
/// the complement otherwise. The prefactor x^a e^-x / Gamma(a) is evaluated in
/// log space, so large shapes (a ~ 10^4) neither overflow nor lose the
/// logarithm of tiny results. Throws std::domain_error for a <= 0, x < 0 or
/// NaN arguments.
RegularizedGammaResult regularized_lower_gamma(double a, double x);

/// Upper complement Q(a, x) = 1 - P(a, x), computed without cancellation.
double regularized_upper_gamma(double a, double x);

double erf(double x);
double erfc(double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile, p in (0, 1). Returns -inf / +inf at 0 / 1.
double normal_quantile(double p);

/// Iteration cap used by regularized_lower_gamma for shape a.
int gamma_iteration_cap(double a);

}  // namespace bilip::specfun
