#include "bilip/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bilip/tvmetrics.hpp"

namespace bilip {

namespace {

constexpr double kFdStep = 1e-6;
constexpr int kMaxHalvings = 30;
constexpr int kRandomDirections = 4;

class SlopeParameterization {
 public:
  SlopeParameterization(const PiecewiseLinearFlow1D& flow, double slope_lo, double slope_hi)
      : xs_(flow.knots_x()), slope_lo_(slope_lo), slope_hi_(slope_hi) {
    const auto& zs = flow.knots_z();
    anchor_ = 0;
    for (std::size_t i = 1; i < zs.size(); ++i) {
      if (std::fabs(zs[i]) < std::fabs(zs[anchor_])) anchor_ = i;
    }
    anchor_z_ = zs[anchor_];
  }

  std::vector<double> encode(const PiecewiseLinearFlow1D& flow) const {
    std::vector<double> theta;
    theta.reserve(flow.slopes().size() + 2);
    theta.push_back(std::log(flow.left_tail_slope()));
    for (double s : flow.slopes()) theta.push_back(std::log(s));
    theta.push_back(std::log(flow.right_tail_slope()));
    return theta;
  }

  PiecewiseLinearFlow1D decode(const std::vector<double>& theta) const {
    std::vector<double> slopes(xs_.size() - 1);
    for (std::size_t i = 0; i < slopes.size(); ++i) slopes[i] = std::exp(theta[i + 1]);
    return flow_from_slopes(xs_, anchor_, anchor_z_, std::exp(theta.front()), slopes,
                            std::exp(theta.back()), slope_lo_, slope_hi_);
  }

 private:
  std::vector<double> xs_;
  double slope_lo_;
  double slope_hi_;
  std::size_t anchor_ = 0;
  double anchor_z_ = 0.0;
};

}  // namespace

std::string to_string(FitObjective objective) {
  return objective == FitObjective::tv ? "tv" : "nll";
}

FitObjective parse_fit_objective(const std::string& name) {
  if (name == "tv") return FitObjective::tv;
  if (name == "nll") return FitObjective::nll;
  throw std::invalid_argument("unknown fit objective: " + name);
}

FitResult fit_projected_gradient(const TargetDistribution& target, const FitOptions& options) {
  if (target.dim() != 1) throw std::invalid_argument("fit_projected_gradient: target must be 1D");
  if (!(options.l1_max > 0.0) || !(options.l2_max > 0.0) ||
      options.l1_max * options.l2_max < 1.0) {
    throw std::invalid_argument("fit_projected_gradient: need l1_max, l2_max > 0 and l1_max * l2_max >= 1");
  }
  if (options.steps < 0) throw std::invalid_argument("fit_projected_gradient: steps must be >= 0");
  if (!(options.step_size > 0.0)) {
    throw std::invalid_argument("fit_projected_gradient: step_size must be positive");
  }

  const PiecewiseLinearFlow1D init =
      options.init ? *options.init
                   : clipped_quantile_flow(target, options.l1_max, options.l2_max, options.knots);
  const SlopeParameterization param(init, 1.0 / options.l2_max, options.l1_max);
  const double lo = -std::log(options.l2_max);
  const double hi = std::log(options.l1_max);
  const auto project = [&](std::vector<double>& theta) {
    for (double& t : theta) t = std::clamp(t, lo, hi);
  };

  std::vector<double> nll_points;
  if (options.objective == FitObjective::nll) {
    for (const auto& p : target.sample(options.nll_samples, options.seed)) nll_points.push_back(p[0]);
  }

  std::uint64_t evaluations = 0;
  const auto objective = [&](const std::vector<double>& theta) {
    ++evaluations;
    const PiecewiseLinearFlow1D flow = param.decode(theta);
    double value = 0.0;
    if (options.objective == FitObjective::tv) {
      value = tv_partition_1d(target, flow);
    } else {
      for (double x : nll_points) value -= flow.log_model_density(x);
      value /= static_cast<double>(nll_points.size());
    }
    if (!std::isfinite(value)) {
      throw std::runtime_error("fit_projected_gradient: objective is not finite after " +
                               std::to_string(evaluations) + " evaluations");
    }
    return value;
  };

  std::vector<double> theta = param.encode(init);
  project(theta);
  double f = objective(theta);

  FitResult result{param.decode(theta), f, f, {f}, 0, 0, false};
  Rng rng = substream(options.seed, 1);
  std::normal_distribution<double> normal;

  // Tries theta + eta * dir with halving eta; updates theta/f on success.
  const auto line_search = [&](const std::vector<double>& dir) {
    double eta = options.step_size;
    std::vector<double> trial(theta.size());
    for (int h = 0; h <= kMaxHalvings; ++h, eta *= 0.5) {
      for (std::size_t i = 0; i < theta.size(); ++i) trial[i] = theta[i] + eta * dir[i];
      project(trial);
      if (trial == theta) continue;
      const double ft = objective(trial);
      if (ft < f) {
        theta = trial;
        f = ft;
        return true;
      }
    }
    return false;
  };

  std::vector<double> grad(theta.size());
  std::vector<double> dir(theta.size());
  for (int step = 0; step < options.steps; ++step) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta[i];
      theta[i] = saved + kFdStep;
      const double fp = objective(theta);
      theta[i] = saved - kFdStep;
      const double fm = objective(theta);
      theta[i] = saved;
      grad[i] = (fp - fm) / (2.0 * kFdStep);
    }
    double gmax = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      // Components pushing against an active bound cannot move.
      const bool blocked = (theta[i] <= lo && grad[i] > 0.0) || (theta[i] >= hi && grad[i] < 0.0);
      if (blocked) grad[i] = 0.0;
      gmax = std::max(gmax, std::fabs(grad[i]));
    }

    bool moved = false;
    if (gmax > 0.0) {
      for (std::size_t i = 0; i < grad.size(); ++i) dir[i] = -grad[i] / gmax;
      moved = line_search(dir);
    }
    for (int r = 0; !moved && r < kRandomDirections; ++r) {
      double dmax = 0.0;
      for (double& d : dir) {
        d = normal(rng);
        dmax = std::max(dmax, std::fabs(d));
      }
      for (double& d : dir) d /= dmax;
      moved = line_search(dir);
    }
    if (!moved) {
      result.stalled = true;
      break;
    }
    ++result.accepted_steps;
    result.history.push_back(f);
  }

  result.flow = param.decode(theta);
  result.final_objective = f;
  result.evaluations = evaluations;
  return result;
}

}  // namespace bilip
