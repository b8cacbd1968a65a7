#pragma once

// Bi-Lipschitz normalizing flows F : X -> Z with a standard Gaussian latent.
// The model density is p_hat(x) = |det Jac_F(x)| q(F(x)).
//
// Two families with exact Lipschitz constants:
//   - PiecewiseLinearFlow1D: monotone knot interpolation, linear tails.
//   - AffineFlowD: F(x) = A x + b in any dimension.

#include <iosfwd>
#include <string>
#include <span>
#include <vector>

#include "bilip/lipschitz.hpp"
#include "bilip/targets.hpp"
#include "bilip/types.hpp"

namespace bilip {

class PiecewiseLinearFlow1D {
 public:
  /// Knot lists must be strictly increasing, of equal length >= 2 and finite;
  /// tail slopes positive. Throws std::invalid_argument otherwise.
  PiecewiseLinearFlow1D(std::vector<double> knots_x, std::vector<double> knots_z,
                        double left_tail_slope, double right_tail_slope);

  static PiecewiseLinearFlow1D identity();
  static PiecewiseLinearFlow1D affine(double slope, double offset = 0.0);

  int dim() const { return 1; }

  double forward(double x) const;
  double inverse(double z) const;

  /// dF/dx. At a knot the slope of the segment on its left is used.
  double slope_at(double x) const;

  double model_density(double x) const;
  double log_model_density(double x) const;
  double model_density(const Point& x) const { return model_density(x[0]); }

  /// P_hat([a, b]) = Q([F(a), F(b)]).
  double interval_mass(double a, double b) const;

  const std::vector<double>& knots_x() const { return xs_; }
  const std::vector<double>& knots_z() const { return zs_; }
  /// Interior segment slopes; slopes()[i] is the slope on [x_i, x_{i+1}].
  const std::vector<double>& slopes() const { return slopes_; }
  double left_tail_slope() const { return left_tail_; }
  double right_tail_slope() const { return right_tail_; }

  double min_slope() const;
  double max_slope() const;

  bool operator==(const PiecewiseLinearFlow1D&) const = default;

 private:
  std::vector<double> xs_;
  std::vector<double> zs_;
  std::vector<double> slopes_;
  double left_tail_;
  double right_tail_;
};

class AffineFlowD {
 public:
  /// Throws std::invalid_argument for non-square, mismatched or singular A.
  AffineFlowD(Eigen::MatrixXd matrix, Eigen::VectorXd offset);

  /// F(x) = s x.
  static AffineFlowD scaling(int dim, double s);

  int dim() const { return static_cast<int>(offset_.size()); }

  Point forward(const Point& x) const;
  Point inverse(const Point& z) const;

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::VectorXd& offset() const { return offset_; }
  /// Descending.
  const Eigen::VectorXd& singular_values() const { return singular_values_; }
  double abs_det() const;
  double log_abs_det() const { return log_abs_det_; }

  double model_density(const Point& x) const;
  double log_model_density(const Point& x) const;

 private:
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd inverse_;
  Eigen::VectorXd offset_;
  Eigen::VectorXd singular_values_;
  double log_abs_det_ = 0.0;
};

/// L1 = max slope, L2 = 1 / min slope (tails included).
BiLipschitzConstants certify_bilipschitz(const PiecewiseLinearFlow1D& flow);
/// L1 = largest singular value, L2 = 1 / smallest singular value.
BiLipschitzConstants certify_bilipschitz(const AffineFlowD& flow);

/// Knots at `xs` with z[anchor] = z_anchor and the given segment slopes
/// (xs.size() - 1 of them). Slopes are clamped to [lo, hi] and each knot is
/// nudged by ulps until the slope recomputed from the rounded knots also lies
/// in [lo, hi], so certification stays within the budget.
PiecewiseLinearFlow1D flow_from_slopes(std::vector<double> xs, std::size_t anchor, double z_anchor,
                                       double left_tail, std::span<const double> slopes,
                                       double right_tail, double lo, double hi);

/// Discretized monotone rearrangement Phi^{-1} o CDF of a 1D target on a
/// quantile grid of `grid` levels plus the median. Segment slopes are
/// clipped into [1/l2_max, l1_max] and the knots re-accumulated from the
/// median, which stays mapped to 0. CDF plateaus give zero slopes and are
/// floored at 1/l2_max. Tail slopes copy the clipped outermost segments.
PiecewiseLinearFlow1D clipped_quantile_flow(const TargetDistribution& target, double l1_max,
                                            double l2_max, int grid);

/// Flow file: a version header row, a tail-slope row, then one `x,z` row per
/// knot, all with 17 significant digits.
void write_flow_csv(std::ostream& out, const PiecewiseLinearFlow1D& flow);
PiecewiseLinearFlow1D read_flow_csv(std::istream& in);
void save_flow_csv(const std::string& path, const PiecewiseLinearFlow1D& flow);
PiecewiseLinearFlow1D load_flow_csv(const std::string& path);

}  // namespace bilip
