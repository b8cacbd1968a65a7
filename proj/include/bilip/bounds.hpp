#pragma once

// Lower bounds on TV(P*, P_hat) for P_hat pushed forward from N(0, I) by an
// (L1, L2)-bi-Lipschitz flow, and the matching precision upper bound.
//
// Each bound is pointwise in its witness set; the sup over sets is taken by
// the search helpers at the bottom of this header.

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bilip/csv.hpp"
#include "bilip/lipschitz.hpp"
#include "bilip/targets.hpp"
#include "bilip/types.hpp"

namespace bilip {

enum class TheoremId { T1, T2a, T2b, T3, COR1, MIX, PREC };

std::string to_string(TheoremId id);
TheoremId parse_theorem_id(const std::string& name);

struct BoundInput {
  std::string name;
  double value = 0.0;
};

struct Witness {
  Point center;
  /// NaN when the witness is not a ball.
  double radius = std::numeric_limits<double>::quiet_NaN();
  double volume = std::numeric_limits<double>::quiet_NaN();
};

struct BoundReport {
  TheoremId id = TheoremId::T1;
  std::vector<BoundInput> inputs;
  /// min(raw_bound, 1). For PREC this holds the precision upper bound.
  double lower_bound_tv = 0.0;
  double raw_bound = 0.0;
  Witness witness;
  /// lower_bound_tv > 0.
  bool valid = false;
  /// A gamma term fell below the smallest normal double and was reported as 0.
  bool underflow = false;
  /// The underlying inequality is strict.
  bool strict = false;
};

/// mass_a - vol_a * (l1 / (4 l2 sqrt(2 pi)))^d for one subset A.
BoundReport theorem1_bound(double vol_a, double mass_a, const BiLipschitzConstants& consts, int d);

/// mass_ball - radius * l1 / sqrt(pi).
BoundReport theorem2_bound_sqrt_pi(double mass_ball, double radius, double l1);

/// mass_ball - 4 d^{1/4} radius l1, d >= 2.
BoundReport theorem2_bound_ball93(double mass_ball, double radius, double l1, int d);

/// P(d/2, R^2 / (2 l2^2)) - mass of the ball of radius R around F^{-1}(0).
BoundReport theorem3_bound(double mass_ball_at_center, double radius, double l2, int d);

/// theorem3_bound with zero mass and radius D.
BoundReport corollary_separated_modes(double distance, double l2, int d);

/// mass_ball - (1/k) radius l1 / (sigma_term sqrt(pi)).
BoundReport mixture_bound(double mass_ball, double radius, double l1, int k, double sigma_term);

/// 1 - P(d/2, D^2 / (2 l2^2)): upper bound on the maximum precision.
double precision_upper_bound(double distance, double l2, int d);
/// precision_upper_bound as a report with id PREC.
BoundReport precision_report(double distance, double l2, int d);

double tv_from_max_precision(double alpha_bar);
double tv_from_max_recall(double beta_bar);

/// theorem_id, inputs..., value, raw_bound, valid. The value column is
/// named lower_bound_tv, or max_precision_upper for PREC.
CsvRow bound_csv_header(TheoremId id);
CsvRow to_csv_row(const BoundReport& report);

// ---- sup search ----

struct RadiusSearch {
  double r_min = 1e-4;
  double r_max = 20.0;
  /// Log-spaced grid points between r_min and r_max.
  int grid = 400;
  /// Additional candidate radii, e.g. distances to density discontinuities.
  std::vector<double> extra_radii;
  int golden_iterations = 60;
};

using BallBoundFn = std::function<BoundReport(const Point& center, double radius)>;

/// Maximizes raw_bound over centers x radii: grid plus extra radii, then a
/// golden-section refinement between the neighbours of the best candidate.
/// The best report found anywhere is returned.
BoundReport maximize_over_radius(const BallBoundFn& bound, std::span<const Point> centers,
                                 const RadiusSearch& search);

/// Search defaults for a target: r_max spans its effective range, and the
/// distances from each center to every 1D breakpoint become candidates.
RadiusSearch radius_search_for(const TargetDistribution& target, std::span<const Point> centers);

/// Centers searched for ball bounds: target mode centers plus `extra`.
std::vector<Point> search_centers(const TargetDistribution& target, std::span<const Point> extra = {});

/// sup over balls A of theorem1_bound(vol A, P*(A)).
BoundReport sup_theorem1(const TargetDistribution& target, const BiLipschitzConstants& consts,
                         std::span<const Point> extra_centers = {});
BoundReport sup_theorem2_sqrt_pi(const TargetDistribution& target, double l1,
                                 std::span<const Point> extra_centers = {});
BoundReport sup_theorem2_ball93(const TargetDistribution& target, double l1,
                                std::span<const Point> extra_centers = {});
/// Ball center fixed at `flow_preimage_of_origin`.
BoundReport sup_theorem3(const TargetDistribution& target, const Point& flow_preimage_of_origin,
                         double l2);
BoundReport sup_mixture(const TargetDistribution& target, double l1, int k, double sigma_term,
                        std::span<const Point> extra_centers = {});

}  // namespace bilip
