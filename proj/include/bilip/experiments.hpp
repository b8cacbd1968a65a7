#pragma once

// Experiment drivers behind the CLI. Every table is a pure function of its
// config (and seed), so repeated runs produce identical CSV bytes.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bilip/bounds.hpp"
#include "bilip/csv.hpp"
#include "bilip/fitting.hpp"
#include "bilip/svg.hpp"
#include "bilip/tvmetrics.hpp"

namespace bilip::experiments {

// ---- fig3: Gaussian measure of centered balls ----

/// MNIST 28*28, CIFAR10 32*32*3 and a 64*64*3 CelebA crop.
std::vector<int> default_fig3_dims();
/// 0 followed by 200 log-spaced ratios in [1e-2, 250].
std::vector<double> default_fig3_ratios();

/// Columns dim, ratio, measure with measure = P(d/2, ratio^2 / 2).
CsvTable run_fig3(std::span<const int> dims, std::span<const double> ratios);
SvgPlot fig3_plot(const CsvTable& table);

// ---- bounds-eval: bound formulas over a parameter grid ----

struct BoundsEvalConfig {
  TheoremId theorem = TheoremId::T2a;
  std::vector<double> mass{0.9};
  std::vector<double> radius{0.1};
  std::vector<double> vol{1.0};
  std::vector<double> l1{1.0};
  std::vector<double> l2{1.0};
  std::vector<double> distance{2.0};
  std::vector<double> sigma_term{1.0};
  std::vector<int> dims{1};
  std::vector<int> k{1};
  /// Input column to sweep (e.g. "l1", "d"); empty picks the last input
  /// with more than one value.
  std::string sweep;
};

/// Cartesian grid of reports, sweep axis innermost. The trailing
/// sign_change column holds, on the first row past a sign change of the
/// raw bound along the sweep, the crossing located by bisection.
CsvTable run_bounds_eval(const BoundsEvalConfig& config);
SvgPlot bounds_eval_plot(const CsvTable& table);

// ---- verify: fitted flows against the bounds ----

enum class Scenario { theorem1, theorem2, theorem3, corollary };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

struct VerifyConfig {
  Scenario scenario = Scenario::theorem2;
  /// Target specs as accepted by make_target.
  std::vector<std::string> targets;
  /// Budgets are the cartesian product l1 x l2.
  std::vector<double> l1;
  std::vector<double> l2;
  int knots = 64;
  int steps = 200;
  double step_size = 0.5;
  std::uint64_t seed = 0;
  FitObjective objective = FitObjective::tv;
  unsigned jobs = 1;
  int panels = 64;
  /// A row is a violation when measured_tv - bound < -tolerance.
  double tolerance = 1e-3;
};

/// Scenario-specific target and budgets.
VerifyConfig default_verify_config(Scenario scenario);

struct VerifyResult {
  CsvTable table;
  bool sound = true;
};

/// One row per (target, l1, l2) cell in config order. The bound uses the
/// budget constants, so it covers every flow in the budget class:
///   theorem1  sup over balls of the subset bound
///   theorem2  sup over balls of mass - R l1 / sqrt(pi)
///   theorem3  sup over R with the ball centered at F^{-1}(0)
///   corollary D = distance from F^{-1}(0) to the target support
VerifyResult run_verify(const VerifyConfig& config);
SvgPlot verify_plot(const CsvTable& table);

// ---- fit1d: one fit with diagnostics ----

struct Fit1dConfig {
  std::string target = "dense_spike:0.9,0.1";
  FitOptions fit;
  int panels = 64;
  /// Rows of the density table.
  int density_points = 1000;
};

struct Fit1dResult {
  FitResult fit;
  BiLipschitzConstants certified;
  TvEstimate initial_tv;
  TvEstimate final_tv;
  CsvTable summary;
  /// Columns x, p_star, p_hat.
  CsvTable densities;
};

Fit1dResult run_fit1d(const Fit1dConfig& config);
SvgPlot density_plot(const CsvTable& densities, const std::string& title);

}  // namespace bilip::experiments
