#include "bilip/tvmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "bilip/parallel.hpp"
#include "bilip/quadrature.hpp"

namespace bilip {

namespace {

constexpr std::uint64_t kBlockSize = 8192;
constexpr double kLatentReach = 9.0;  // Q(|z| > 9) ~ 2e-19

struct BlockSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

template <class DensityFn>
TvEstimate monte_carlo_tv(const TargetDistribution& target, DensityFn&& model_density,
                          std::uint64_t n, std::uint64_t seed, unsigned workers) {
  if (n < 2) throw std::domain_error("tv_monte_carlo: need at least two samples");
  const std::uint64_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<BlockSums> sums(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    Rng rng = substream(seed, b);
    const std::uint64_t begin = b * kBlockSize;
    const std::uint64_t count = std::min(kBlockSize, n - begin);
    BlockSums s;
    for (std::uint64_t i = 0; i < count; ++i) {
      const Point x = target.draw(rng);
      const double p_star = target.density(x);
      const double p_hat = model_density(x);
      if (!std::isfinite(p_hat)) {
        throw std::runtime_error("tv_monte_carlo: model density is not finite");
      }
      const double term = p_star > 0.0 ? std::max(0.0, 1.0 - p_hat / p_star) : 0.0;
      s.sum += term;
      s.sum_sq += term * term;
    }
    sums[b] = s;
  });
  BlockSums total;
  for (const auto& s : sums) {
    total.sum += s.sum;
    total.sum_sq += s.sum_sq;
  }
  const double nn = static_cast<double>(n);
  const double mean = total.sum / nn;
  const double var = std::max(0.0, (total.sum_sq - nn * mean * mean) / (nn - 1.0));
  TvEstimate est;
  est.value = mean;
  est.method = TvMethod::monte_carlo;
  est.std_error = std::sqrt(var / nn);
  est.n = n;
  est.seed = seed;
  return est;
}

Interval tv_domain(const TargetDistribution& target, const PiecewiseLinearFlow1D& flow) {
  const Interval t = target.effective_range_1d(1e-13);
  return {std::min(t.lo, flow.inverse(-kLatentReach)), std::max(t.hi, flow.inverse(kLatentReach))};
}

}  // namespace

std::string to_string(TvMethod method) {
  return method == TvMethod::quadrature ? "quadrature" : "monte_carlo";
}

CsvRow tv_csv_header() { return {"value", "method", "std_error", "n", "seed"}; }

CsvRow to_csv_row(const TvEstimate& e) {
  return {format_double(e.value), to_string(e.method), format_double(e.std_error),
          std::to_string(e.n), std::to_string(e.seed)};
}

TvEstimate tv_quadrature_1d(const Density1D& p_star, const Density1D& p_hat, Interval domain,
                            int panels, std::span<const double> breakpoints, double abs_tol) {
  if (!(domain.hi > domain.lo)) throw std::domain_error("tv_quadrature_1d: empty domain");
  if (panels < 1) throw std::domain_error("tv_quadrature_1d: panels must be >= 1");
  std::vector<double> breaks;
  breaks.reserve(static_cast<std::size_t>(panels) + 1 + breakpoints.size());
  for (int i = 0; i <= panels; ++i) {
    breaks.push_back(domain.lo + (domain.hi - domain.lo) * i / panels);
  }
  breaks.back() = domain.hi;
  for (double b : breakpoints) {
    if (b > domain.lo && b < domain.hi) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const auto half_abs = [&](double x) { return 0.5 * std::fabs(p_star(x) - p_hat(x)); };
  const auto tv = quadrature::integrate_panels(half_abs, breaks, abs_tol);
  const auto m_star = quadrature::integrate_panels(p_star, breaks, abs_tol);
  const auto m_hat = quadrature::integrate_panels(p_hat, breaks, abs_tol);

  TvEstimate est;
  est.value = std::clamp(tv.value, 0.0, 1.0);
  est.method = TvMethod::quadrature;
  est.n = breaks.size() - 1;
  if (m_star.value < 1.0 - 1e-9 || m_hat.value < 1.0 - 1e-9) {
    est.warning = "mass deficit on domain: p_star=" + format_double(m_star.value) +
                  " p_hat=" + format_double(m_hat.value);
  }
  return est;
}

TvEstimate tv_quadrature(const TargetDistribution& target, const PiecewiseLinearFlow1D& flow,
                         int panels) {
  if (target.dim() != 1) throw std::invalid_argument("tv_quadrature: target must be 1D");
  std::vector<double> breaks = target.breakpoints_1d();
  breaks.insert(breaks.end(), flow.knots_x().begin(), flow.knots_x().end());
  return tv_quadrature_1d([&](double x) { return target.density(x); },
                          [&](double x) { return flow.model_density(x); },
                          tv_domain(target, flow), panels, breaks);
}

double tv_partition_1d(const TargetDistribution& target, const PiecewiseLinearFlow1D& flow,
                       int samples_per_cell) {
  if (target.dim() != 1) throw std::invalid_argument("tv_partition_1d: target must be 1D");
  if (samples_per_cell < 2) throw std::domain_error("tv_partition_1d: need >= 2 samples per cell");
  const Interval domain = tv_domain(target, flow);

  std::vector<double> cuts = target.breakpoints_1d();
  cuts.insert(cuts.end(), flow.knots_x().begin(), flow.knots_x().end());
  cuts.push_back(domain.lo);
  cuts.push_back(domain.hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                            [&](double c) { return c < domain.lo || c > domain.hi; }),
             cuts.end());

  const auto gap = [&](double x) { return target.density(x) - flow.model_density(x); };
  const auto piece = [&](double a, double b) {
    return std::fabs(target.interval_mass_1d(a, b) - flow.interval_mass(a, b));
  };

  const double inf = std::numeric_limits<double>::infinity();
  double total = piece(-inf, cuts.front()) + piece(cuts.back(), inf);
  std::vector<double> roots;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c];
    const double b = cuts[c + 1];
    roots.clear();
    double prev_t = a + (b - a) * 0.5 / samples_per_cell;
    double prev_g = gap(prev_t);
    for (int k = 1; k < samples_per_cell; ++k) {
      const double t = a + (b - a) * (k + 0.5) / samples_per_cell;
      const double g = gap(t);
      if ((prev_g < 0.0) != (g < 0.0)) {
        double lo = prev_t, hi = t;
        const bool lo_negative = prev_g < 0.0;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          ((gap(mid) < 0.0) == lo_negative ? lo : hi) = mid;
        }
        roots.push_back(0.5 * (lo + hi));
      }
      prev_t = t;
      prev_g = g;
    }
    double left = a;
    for (double r : roots) {
      total += piece(left, r);
      left = r;
    }
    total += piece(left, b);
  }
  return std::clamp(0.5 * total, 0.0, 1.0);
}

TvEstimate tv_monte_carlo(const TargetDistribution& target, const PiecewiseLinearFlow1D& flow,
                          std::uint64_t n, std::uint64_t seed, unsigned workers) {
  if (target.dim() != 1) throw std::invalid_argument("tv_monte_carlo: dimension mismatch");
  return monte_carlo_tv(
      target, [&](const Point& x) { return flow.model_density(x[0]); }, n, seed, workers);
}

TvEstimate tv_monte_carlo(const TargetDistribution& target, const AffineFlowD& flow,
                          std::uint64_t n, std::uint64_t seed, unsigned workers) {
  if (target.dim() != flow.dim()) throw std::invalid_argument("tv_monte_carlo: dimension mismatch");
  return monte_carlo_tv(
      target, [&](const Point& x) { return flow.model_density(x); }, n, seed, workers);
}

double max_precision(const TargetDistribution& target, const PiecewiseLinearFlow1D& flow,
                     double support_tolerance) {
  if (target.dim() != 1) throw std::invalid_argument("max_precision: target must be 1D");
  if (!(support_tolerance >= 0.0)) throw std::domain_error("max_precision: tolerance must be >= 0");
  if (target.has_full_support()) return 1.0;
  std::vector<Interval> widened;
  for (const auto& s : target.support_intervals_1d()) {
    const Interval w{s.lo - support_tolerance, s.hi + support_tolerance};
    if (!widened.empty() && w.lo <= widened.back().hi) {
      widened.back().hi = std::max(widened.back().hi, w.hi);
    } else {
      widened.push_back(w);
    }
  }
  double alpha = 0.0;
  for (const auto& w : widened) alpha += flow.interval_mass(w.lo, w.hi);
  return std::clamp(alpha, 0.0, 1.0);
}

double max_precision(const TargetDistribution& target, const AffineFlowD& flow,
                     double support_tolerance, std::uint64_t n, std::uint64_t seed) {
  if (target.dim() != flow.dim()) throw std::invalid_argument("max_precision: dimension mismatch");
  if (!(support_tolerance >= 0.0)) throw std::domain_error("max_precision: tolerance must be >= 0");
  if (target.has_full_support()) return 1.0;
  if (n < 1) throw std::domain_error("max_precision: need at least one sample");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::uint64_t hits = 0;
  Point z(flow.dim());
  for (std::uint64_t i = 0; i < n; ++i) {
    for (int j = 0; j < flow.dim(); ++j) z[j] = normal(rng);
    if (target.in_support(flow.inverse(z), support_tolerance)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double max_recall(const TargetDistribution&, const PiecewiseLinearFlow1D&) { return 1.0; }

double max_recall(const TargetDistribution&, const AffineFlowD&) { return 1.0; }

}  // namespace bilip
