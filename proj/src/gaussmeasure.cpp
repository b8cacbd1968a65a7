#include "bilip/gaussmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "bilip/parallel.hpp"
#include "bilip/specfun.hpp"
#include "bilip/types.hpp"

namespace bilip::gaussmeasure {

namespace {

constexpr std::uint64_t kBlockSize = 8192;

void require_radius(double r, const char* where) {
  if (!(r >= 0.0)) {
    throw std::domain_error(std::string(where) + ": radius must be >= 0");
  }
}

void require_dim(int d, int min_dim, const char* where) {
  if (d < min_dim) {
    throw std::domain_error(std::string(where) + ": dimension must be >= " +
                            std::to_string(min_dim) + ", got " + std::to_string(d));
  }
}

}  // namespace

double gaussian_ball_measure_centered(int d, double r) {
  require_dim(d, 1, "gaussian_ball_measure_centered");
  require_radius(r, "gaussian_ball_measure_centered");
  return specfun::regularized_lower_gamma(0.5 * d, 0.5 * r * r).value;
}

MonteCarloMeasure gaussian_ball_measure_mc(const BallSpec& spec, std::uint64_t n,
                                           std::uint64_t seed, unsigned workers) {
  require_dim(spec.dim, 1, "gaussian_ball_measure_mc");
  require_radius(spec.radius, "gaussian_ball_measure_mc");
  if (!(spec.center_norm >= 0.0)) {
    throw std::domain_error("gaussian_ball_measure_mc: center_norm must be >= 0");
  }
  if (n < 1) throw std::domain_error("gaussian_ball_measure_mc: need at least one sample");

  MonteCarloMeasure out;
  out.n = n;
  out.seed = seed;
  if (spec.radius == 0.0) return out;

  const std::uint64_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<std::uint64_t> hits(blocks, 0);
  const double r2 = spec.radius * spec.radius;
  const double c = spec.center_norm;
  const int rest_dim = spec.dim - 1;

  parallel_for(blocks, workers, [&](std::size_t b) {
    Rng rng = substream(seed, b);
    std::normal_distribution<double> normal;
    std::gamma_distribution<double> chi2_half(rest_dim > 0 ? 0.5 * rest_dim : 1.0, 2.0);
    const std::uint64_t begin = b * kBlockSize;
    const std::uint64_t count = std::min(kBlockSize, n - begin);
    std::uint64_t h = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double z0 = normal(rng) - c;
      const double rest = rest_dim > 0 ? chi2_half(rng) : 0.0;
      if (z0 * z0 + rest <= r2) ++h;
    }
    hits[b] = h;
  });

  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(n);
  out.value = p;
  out.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return out;
}

double ball_measure_upper_sqrt_pi(int d, double r) {
  require_dim(d, 1, "ball_measure_upper_sqrt_pi");
  require_radius(r, "ball_measure_upper_sqrt_pi");
  return r / std::sqrt(std::numbers::pi);
}

double ball_measure_upper_ball93(int d, double r) {
  require_dim(d, 2, "ball_measure_upper_ball93");
  require_radius(r, "ball_measure_upper_ball93");
  return 4.0 * std::pow(static_cast<double>(d), 0.25) * r;
}

double ball_measure_upper_radial_peak(int d, double r) {
  require_dim(d, 1, "ball_measure_upper_radial_peak");
  require_radius(r, "ball_measure_upper_radial_peak");
  if (r == 0.0) return 0.0;
  const double k = 0.5 * (d - 1);
  double log_cap = 0.5 * std::log(2.0) + std::log(r) - specfun::ln_gamma(0.5 * d);
  if (d > 1) log_cap += k * std::log((d - 1) / (2.0 * std::numbers::e));
  return std::exp(log_cap);
}

}  // namespace bilip::gaussmeasure
