#pragma once

// Total variation distance between a target P* and a flow model P_hat, and
// the maximum precision / recall of P_hat with respect to P*.
//
// TV(P*, P_hat) = sup_A |P*(A) - P_hat(A)| is evaluated through the identity
// TV = 1/2 * int |p* - p_hat|: the supremum is attained by A = {p* > p_hat},
// where P*(A) - P_hat(A) = int (p* - p_hat)_+ = 1/2 * int |p* - p_hat| since
// both densities integrate to one.

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "bilip/csv.hpp"
#include "bilip/flows.hpp"
#include "bilip/targets.hpp"

namespace bilip {

enum class TvMethod { quadrature, monte_carlo };

std::string to_string(TvMethod method);

struct TvEstimate {
  double value = 0.0;
  TvMethod method = TvMethod::quadrature;
  /// Zero for quadrature.
  double std_error = 0.0;
  /// Quadrature panels or Monte Carlo samples.
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  /// Non-empty when the domain misses more than 1e-9 of either mass.
  std::string warning;
};

CsvRow tv_csv_header();
CsvRow to_csv_row(const TvEstimate& estimate);

using Density1D = std::function<double(double)>;

/// 1/2 int_domain |p_star - p_hat| by adaptive Gauss-Kronrod on `panels`
/// equal panels, further split at every breakpoint inside the domain.
TvEstimate tv_quadrature_1d(const Density1D& p_star, const Density1D& p_hat, Interval domain,
                            int panels, std::span<const double> breakpoints = {},
                            double abs_tol = 1e-10);

/// tv_quadrature_1d for a target and a piecewise-linear flow, with the domain
/// and breakpoints (target support boundaries, flow knots) filled in.
TvEstimate tv_quadrature(const TargetDistribution& target, const PiecewiseLinearFlow1D& flow,
                         int panels = 64);

/// TV from exact interval masses: the line is cut at all density
/// discontinuities and at the sign changes of p* - p_hat (located by
/// sampling each cell at `samples_per_cell` points and bisecting), and
/// 1/2 sum |P*(I) - P_hat(I)| is taken over the pieces. Smooth in the flow
/// parameters, so it serves as the fitting objective.
double tv_partition_1d(const TargetDistribution& target, const PiecewiseLinearFlow1D& flow,
                       int samples_per_cell = 16);

/// Monte Carlo estimate E_{x~P*}[(1 - p_hat(x)/p*(x))_+], which equals TV.
/// Deterministic per seed and independent of `workers`.
TvEstimate tv_monte_carlo(const TargetDistribution& target, const PiecewiseLinearFlow1D& flow,
                          std::uint64_t n, std::uint64_t seed, unsigned workers = 1);
TvEstimate tv_monte_carlo(const TargetDistribution& target, const AffineFlowD& flow,
                          std::uint64_t n, std::uint64_t seed, unsigned workers = 1);

/// alpha_bar = P_hat(Supp P*), the support widened by `support_tolerance`.
/// Exact through the latent CDF in 1D.
double max_precision(const TargetDistribution& target, const PiecewiseLinearFlow1D& flow,
                     double support_tolerance = 0.0);
/// Monte Carlo over latent draws for d > 1.
double max_precision(const TargetDistribution& target, const AffineFlowD& flow,
                     double support_tolerance = 0.0, std::uint64_t n = 100000,
                     std::uint64_t seed = 0);

/// beta_bar = P*(Supp P_hat). Both flow families have full support, so this
/// is always 1.
double max_recall(const TargetDistribution& target, const PiecewiseLinearFlow1D& flow);
double max_recall(const TargetDistribution& target, const AffineFlowD& flow);

}  // namespace bilip
