#pragma once

// Budget-constrained fitting of 1D piecewise-linear flows.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bilip/flows.hpp"
#include "bilip/targets.hpp"

namespace bilip {

enum class FitObjective { tv, nll };

std::string to_string(FitObjective objective);
FitObjective parse_fit_objective(const std::string& name);

struct FitOptions {
  double l1_max = 1.0;
  double l2_max = 1.0;
  /// Knot count of the quantile initialization; ignored when `init` is set.
  int knots = 64;
  int steps = 200;
  /// Initial step in log-slope units, halved up to 30 times per step.
  double step_size = 0.5;
  std::uint64_t seed = 0;
  FitObjective objective = FitObjective::tv;
  /// Samples drawn once from the target for the NLL objective.
  std::uint64_t nll_samples = 4096;
  std::optional<PiecewiseLinearFlow1D> init;
};

struct FitResult {
  PiecewiseLinearFlow1D flow;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  /// Objective after each accepted step, starting with the initial value.
  std::vector<double> history;
  int accepted_steps = 0;
  std::uint64_t evaluations = 0;
  /// True when no descent direction could be found before `steps` ran out.
  bool stalled = false;
};

/// Projected descent on the log-slopes of the segments (tails included). The
/// knot x-positions stay fixed and the knot nearest to z = 0 keeps its latent
/// value, so with the default initialization the target median stays mapped
/// to the latent origin. Gradients are central finite differences; each step
/// moves along -g/|g|_inf with halving backtracking and is accepted only if
/// the objective strictly decreases. When backtracking fails, a few
/// seed-derived random directions are tried before giving up.
///
/// The TV objective is tv_partition_1d. Throws std::runtime_error if the
/// objective becomes non-finite, std::invalid_argument on bad options.
FitResult fit_projected_gradient(const TargetDistribution& target, const FitOptions& options);

}  // namespace bilip
