#pragma once

// Analytic target distributions P*: finite mixtures of uniform-on-ball and
// isotropic Gaussian components, with exact density, ball mass, 1D CDF and
// seeded sampling.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bilip/types.hpp"

namespace bilip {

enum class Shape { uniform_ball, gaussian };

struct Component {
  double weight = 1.0;
  Shape shape = Shape::gaussian;
  Point center;
  /// Ball radius for uniform_ball, standard deviation for gaussian.
  double scale = 1.0;
};

struct BallMass {
  double value = 0.0;
  double std_error = 0.0;
  /// False when any component needed Monte Carlo (d > 1, partial overlap).
  bool exact = true;
};

class TargetDistribution {
 public:
  /// Validates: dim >= 1, weights in [0, 1] summing to 1 within 1e-12,
  /// scales positive, centers of matching dimension. Throws
  /// std::invalid_argument on violation.
  TargetDistribution(int dim, std::vector<Component> components, std::string label = "custom");

  /// Uniform spike of the given width centered at 0 carrying `mass`, with the
  /// remaining 1 - mass spread as a standard Gaussian background.
  static TargetDistribution dense_spike(double mass, double width);

  /// Two equal-weight uniform modes of the given width, each at distance
  /// `distance` from the origin: supports [-distance - width, -distance] and
  /// [distance, distance + width]. The ball of radius `distance` around the
  /// equidistant point 0 carries no mass.
  static TargetDistribution separated_bimodal(double distance, double width);

  static TargetDistribution standard_gaussian(int dim = 1);

  int dim() const { return dim_; }
  const std::vector<Component>& components() const { return components_; }
  const std::string& label() const { return label_; }

  double density(const Point& x) const;
  double density(double x) const;

  /// P*(B_{radius, center}). Exact in 1D; in higher dimension exact for
  /// components fully inside/outside the ball and for centered Gaussians,
  /// seeded Monte Carlo otherwise.
  BallMass ball_mass(const Point& center, double radius, std::uint64_t mc_samples = 200000,
                     std::uint64_t seed = 0) const;
  double ball_mass_1d(double center, double radius) const;

  /// P*([a, b]) in 1D.
  double interval_mass_1d(double a, double b) const;

  std::vector<Point> sample(std::uint64_t n, std::uint64_t seed) const;
  Point draw(Rng& rng) const;

  double cdf_1d(double x) const;
  /// inf{x : cdf(x) >= u}, u in (0, 1).
  double quantile_1d(double u) const;
  /// Midpoint of {x : cdf(x) = 1/2}; for a CDF plateau at 1/2 this is the
  /// center of the gap.
  double median_1d() const;

  /// Sorted jump locations of the density (uniform component boundaries).
  std::vector<double> breakpoints_1d() const;
  /// Interval outside of which P* has at most `tail_mass` on each side.
  Interval effective_range_1d(double tail_mass = 1e-13) const;

  bool has_full_support() const;
  /// Merged support intervals of the uniform components (1D). Only meaningful
  /// when !has_full_support().
  std::vector<Interval> support_intervals_1d() const;
  bool in_support(const Point& x, double tolerance = 0.0) const;
  /// Euclidean distance from x to Supp(P*); 0 inside.
  double distance_to_support(const Point& x) const;

  std::vector<Point> mode_centers() const;

 private:
  void require_1d(const char* where) const;

  int dim_;
  std::vector<Component> components_;
  std::string label_;
  std::vector<double> log_norm_;  // per-component log normalizer of its density
};

/// Volume of the l2 ball of radius r in R^d.
double ball_volume(int d, double r);

/// Plain-text key-value target format:
///
///   # comment
///   label = dense_spike
///   dim = 1
///   component = <weight> <uniform_ball|gaussian> <c1,c2,...> <scale>
///
/// One `component` line per mixture component.
TargetDistribution parse_target_config(std::istream& in);
TargetDistribution load_target_config(const std::string& path);
std::string to_config(const TargetDistribution& target);

/// Builds a target from a preset spec (`dense_spike:MASS,WIDTH`,
/// `separated_bimodal:DISTANCE,WIDTH`, `gaussian[:DIM]`) or, failing that, a
/// config file path.
TargetDistribution make_target(const std::string& spec);

}  // namespace bilip
