#pragma once

// Standard Gaussian measure Q of l2 balls in R^d, plus the closed-form caps
// on Q(B_r) used by the ball lower bounds.
//
// All radii here are latent-space radii: callers apply the L1 (forward) or
// 1/L2 (inverse) scaling before calling.

#include <cstdint>

namespace bilip::gaussmeasure {

struct BallSpec {
  int dim = 1;
  double radius = 0.0;
  /// Distance of the ball center from the latent origin.
  double center_norm = 0.0;
};

struct MonteCarloMeasure {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

/// Q(B_{r,0}) = P(d/2, r^2/2). Throws std::domain_error for d < 1 or r < 0.
double gaussian_ball_measure_centered(int d, double r);

/// Seeded Monte Carlo estimate of Q(B_{r,c}) with |c| = spec.center_norm.
///
/// By rotational symmetry the center is taken on the first axis, so each
/// draw needs one normal coordinate and one chi-square(d-1) variate. Samples
/// are produced in fixed blocks with per-block substreams: the result is the
/// same for any `workers`.
MonteCarloMeasure gaussian_ball_measure_mc(const BallSpec& spec, std::uint64_t n,
                                           std::uint64_t seed, unsigned workers = 1);

/// r / sqrt(pi).
double ball_measure_upper_sqrt_pi(int d, double r);

/// 4 d^{1/4} r, stated for d >= 2 only (std::domain_error otherwise).
double ball_measure_upper_ball93(int d, double r);

/// sqrt(2) r / Gamma(d/2) * ((d-1)/(2e))^{(d-1)/2}: the radial integrand
/// t^{d-1} e^{-t^2/2} replaced by its maximum. Valid for every d >= 1.
double ball_measure_upper_radial_peak(int d, double r);

}  // namespace bilip::gaussmeasure
