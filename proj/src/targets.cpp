#include "bilip/targets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bilip/csv.hpp"
#include "bilip/gaussmeasure.hpp"
#include "bilip/specfun.hpp"

namespace bilip {

namespace {

constexpr double kWeightTolerance = 1e-12;

double log_ball_volume(int d, double r) {
  return 0.5 * d * std::log(std::numbers::pi) + d * std::log(r) -
         specfun::ln_gamma(0.5 * d + 1.0);
}

Point uniform_in_ball(Rng& rng, const Point& center, double radius) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const int d = static_cast<int>(center.size());
  if (d == 1) {
    Point p(1);
    p[0] = center[0] + radius * (2.0 * unit(rng) - 1.0);
    return p;
  }
  Point dir(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) dir[i] = normal(rng);
    norm = dir.norm();
  } while (norm == 0.0);
  const double rho = radius * std::pow(unit(rng), 1.0 / d);
  return center + dir * (rho / norm);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_number_list(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(item));
  }
  return out;
}

}  // namespace

double ball_volume(int d, double r) {
  if (d < 1 || !(r >= 0.0)) throw std::domain_error("ball_volume: invalid arguments");
  if (r == 0.0) return 0.0;
  return std::exp(log_ball_volume(d, r));
}

TargetDistribution::TargetDistribution(int dim, std::vector<Component> components,
                                       std::string label)
    : dim_(dim), components_(std::move(components)), label_(std::move(label)) {
  if (dim_ < 1) throw std::invalid_argument("TargetDistribution: dim must be >= 1");
  if (components_.empty()) throw std::invalid_argument("TargetDistribution: no components");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight >= 0.0 && c.weight <= 1.0)) {
      throw std::invalid_argument("TargetDistribution: weight outside [0, 1]");
    }
    if (!(c.scale > 0.0) || !std::isfinite(c.scale)) {
      throw std::invalid_argument("TargetDistribution: scale must be positive");
    }
    if (c.center.size() != dim_ || !c.center.allFinite()) {
      throw std::invalid_argument("TargetDistribution: component center has wrong dimension");
    }
    total += c.weight;
  }
  if (std::fabs(total - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("TargetDistribution: weights sum to " + format_double(total));
  }
  log_norm_.reserve(components_.size());
  for (const auto& c : components_) {
    if (c.shape == Shape::uniform_ball) {
      log_norm_.push_back(-log_ball_volume(dim_, c.scale));
    } else {
      log_norm_.push_back(-0.5 * dim_ * std::log(2.0 * std::numbers::pi) -
                          dim_ * std::log(c.scale));
    }
  }
}

TargetDistribution TargetDistribution::dense_spike(double mass, double width) {
  if (!(mass > 0.0 && mass <= 1.0)) throw std::invalid_argument("dense_spike: mass in (0, 1]");
  if (!(width > 0.0)) throw std::invalid_argument("dense_spike: width must be positive");
  std::vector<Component> comps;
  comps.push_back({mass, Shape::uniform_ball, Point::Zero(1), 0.5 * width});
  if (mass < 1.0) comps.push_back({1.0 - mass, Shape::gaussian, Point::Zero(1), 1.0});
  return TargetDistribution(1, std::move(comps),
                            "dense_spike[" + format_double(mass) + ";" + format_double(width) + "]");
}

TargetDistribution TargetDistribution::separated_bimodal(double distance, double width) {
  if (!(distance >= 0.0)) throw std::invalid_argument("separated_bimodal: distance must be >= 0");
  if (!(width > 0.0)) throw std::invalid_argument("separated_bimodal: width must be positive");
  const double offset = distance + 0.5 * width;
  std::vector<Component> comps;
  comps.push_back({0.5, Shape::uniform_ball, Point::Constant(1, -offset), 0.5 * width});
  comps.push_back({0.5, Shape::uniform_ball, Point::Constant(1, offset), 0.5 * width});
  return TargetDistribution(
      1, std::move(comps),
      "separated_bimodal[" + format_double(distance) + ";" + format_double(width) + "]");
}

TargetDistribution TargetDistribution::standard_gaussian(int dim) {
  return TargetDistribution(dim, {{1.0, Shape::gaussian, Point::Zero(dim), 1.0}},
                            "gaussian[" + std::to_string(dim) + "]");
}

void TargetDistribution::require_1d(const char* where) const {
  if (dim_ != 1) {
    throw std::invalid_argument(std::string(where) + ": requires a 1D target, dim is " +
                                std::to_string(dim_));
  }
}

double TargetDistribution::density(const Point& x) const {
  if (x.size() != dim_) throw std::invalid_argument("density: dimension mismatch");
  double p = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    if (c.weight == 0.0) continue;
    const double r2 = (x - c.center).squaredNorm();
    if (c.shape == Shape::uniform_ball) {
      if (r2 <= c.scale * c.scale) p += c.weight * std::exp(log_norm_[k]);
    } else {
      p += c.weight * std::exp(log_norm_[k] - 0.5 * r2 / (c.scale * c.scale));
    }
  }
  return p;
}

double TargetDistribution::density(double x) const {
  require_1d("density");
  double p = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    if (c.weight == 0.0) continue;
    const double u = x - c.center[0];
    if (c.shape == Shape::uniform_ball) {
      if (std::fabs(u) <= c.scale) p += c.weight / (2.0 * c.scale);
    } else {
      const double t = u / c.scale;
      p += c.weight * std::exp(log_norm_[k] - 0.5 * t * t);
    }
  }
  return p;
}

double TargetDistribution::interval_mass_1d(double a, double b) const {
  require_1d("interval_mass_1d");
  if (!(b > a)) return 0.0;
  double m = 0.0;
  for (const auto& c : components_) {
    if (c.weight == 0.0) continue;
    const double mu = c.center[0];
    if (c.shape == Shape::uniform_ball) {
      const double lo = std::max(a, mu - c.scale);
      const double hi = std::min(b, mu + c.scale);
      if (hi > lo) m += c.weight * (hi - lo) / (2.0 * c.scale);
    } else {
      const double za = (a - mu) / c.scale;
      const double zb = (b - mu) / c.scale;
      // Difference taken on the tail side with less cancellation.
      const double diff = (za > 0.0) ? specfun::normal_cdf(-za) - specfun::normal_cdf(-zb)
                                     : specfun::normal_cdf(zb) - specfun::normal_cdf(za);
      m += c.weight * diff;
    }
  }
  return std::clamp(m, 0.0, 1.0);
}

double TargetDistribution::ball_mass_1d(double center, double radius) const {
  if (!(radius >= 0.0)) throw std::domain_error("ball_mass: radius must be >= 0");
  return interval_mass_1d(center - radius, center + radius);
}

BallMass TargetDistribution::ball_mass(const Point& center, double radius,
                                       std::uint64_t mc_samples, std::uint64_t seed) const {
  if (!(radius >= 0.0)) throw std::domain_error("ball_mass: radius must be >= 0");
  if (center.size() != dim_) throw std::invalid_argument("ball_mass: dimension mismatch");
  BallMass out;
  if (dim_ == 1) {
    out.value = ball_mass_1d(center[0], radius);
    return out;
  }
  double var = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    if (c.weight == 0.0) continue;
    const double dist = (c.center - center).norm();
    if (c.shape == Shape::uniform_ball) {
      if (dist + c.scale <= radius) {
        out.value += c.weight;
      } else if (dist == 0.0) {
        out.value += c.weight * std::pow(radius / c.scale, dim_);
      } else if (dist >= radius + c.scale) {
        // disjoint
      } else {
        Rng rng = substream(seed, k);
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < mc_samples; ++i) {
          if ((uniform_in_ball(rng, c.center, c.scale) - center).squaredNorm() <= radius * radius) {
            ++hits;
          }
        }
        const double p = static_cast<double>(hits) / static_cast<double>(mc_samples);
        out.value += c.weight * p;
        var += c.weight * c.weight * p * (1.0 - p) / static_cast<double>(mc_samples);
        out.exact = false;
      }
    } else if (dist == 0.0) {
      out.value += c.weight * gaussmeasure::gaussian_ball_measure_centered(dim_, radius / c.scale);
    } else {
      const auto est = gaussmeasure::gaussian_ball_measure_mc(
          {dim_, radius / c.scale, dist / c.scale}, mc_samples, seed + 0x9e3779b97f4a7c15ULL * (k + 1));
      out.value += c.weight * est.value;
      var += c.weight * c.weight * est.std_error * est.std_error;
      out.exact = false;
    }
  }
  out.value = std::clamp(out.value, 0.0, 1.0);
  out.std_error = std::sqrt(var);
  return out;
}

Point TargetDistribution::draw(Rng& rng) const {
  std::uniform_real_distribution<double> unit;
  double u = unit(rng);
  std::size_t k = 0;
  for (; k + 1 < components_.size(); ++k) {
    if (u < components_[k].weight) break;
    u -= components_[k].weight;
  }
  while (components_[k].weight == 0.0 && k > 0) --k;
  const auto& c = components_[k];
  if (c.shape == Shape::uniform_ball) return uniform_in_ball(rng, c.center, c.scale);
  std::normal_distribution<double> normal;
  Point p(dim_);
  for (int i = 0; i < dim_; ++i) p[i] = c.center[i] + c.scale * normal(rng);
  return p;
}

std::vector<Point> TargetDistribution::sample(std::uint64_t n, std::uint64_t seed) const {
  if (n < 1) throw std::domain_error("sample: n must be >= 1");
  Rng rng(seed);
  std::vector<Point> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(draw(rng));
  return out;
}

double TargetDistribution::cdf_1d(double x) const {
  require_1d("cdf_1d");
  double F = 0.0;
  for (const auto& c : components_) {
    if (c.weight == 0.0) continue;
    const double mu = c.center[0];
    if (c.shape == Shape::uniform_ball) {
      F += c.weight * std::clamp((x - (mu - c.scale)) / (2.0 * c.scale), 0.0, 1.0);
    } else {
      F += c.weight * specfun::normal_cdf((x - mu) / c.scale);
    }
  }
  return std::clamp(F, 0.0, 1.0);
}

Interval TargetDistribution::effective_range_1d(double tail_mass) const {
  require_1d("effective_range_1d");
  const double z = -specfun::normal_quantile(std::clamp(tail_mass, 1e-300, 0.5));
  Interval r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& c : components_) {
    if (c.weight == 0.0) continue;
    const double mu = c.center[0];
    const double half = (c.shape == Shape::uniform_ball) ? c.scale : z * c.scale;
    r.lo = std::min(r.lo, mu - half);
    r.hi = std::max(r.hi, mu + half);
  }
  return r;
}

double TargetDistribution::quantile_1d(double u) const {
  require_1d("quantile_1d");
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile_1d: u must lie in (0, 1)");
  const Interval range = effective_range_1d(1e-300);
  double lo = range.lo;
  double hi = range.hi;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (cdf_1d(mid) >= u) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double TargetDistribution::median_1d() const {
  require_1d("median_1d");
  const Interval range = effective_range_1d(1e-300);
  // Lower end: inf{x : F(x) >= 1/2}. Upper end: sup{x : F(x) <= 1/2}.
  double lo = range.lo, hi = range.hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (cdf_1d(mid) >= 0.5 ? hi : lo) = mid;
  }
  const double left = hi;
  lo = range.lo;
  hi = range.hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (cdf_1d(mid) <= 0.5 ? lo : hi) = mid;
  }
  const double right = lo;
  return 0.5 * (left + std::max(left, right));
}

std::vector<double> TargetDistribution::breakpoints_1d() const {
  require_1d("breakpoints_1d");
  std::vector<double> b;
  for (const auto& c : components_) {
    if (c.weight == 0.0 || c.shape != Shape::uniform_ball) continue;
    b.push_back(c.center[0] - c.scale);
    b.push_back(c.center[0] + c.scale);
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

bool TargetDistribution::has_full_support() const {
  return std::any_of(components_.begin(), components_.end(), [](const Component& c) {
    return c.weight > 0.0 && c.shape == Shape::gaussian;
  });
}

std::vector<Interval> TargetDistribution::support_intervals_1d() const {
  require_1d("support_intervals_1d");
  if (has_full_support()) {
    return {{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}};
  }
  std::vector<Interval> parts;
  for (const auto& c : components_) {
    if (c.weight == 0.0) continue;
    parts.push_back({c.center[0] - c.scale, c.center[0] + c.scale});
  }
  std::sort(parts.begin(), parts.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& p : parts) {
    if (!merged.empty() && p.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, p.hi);
    } else {
      merged.push_back(p);
    }
  }
  return merged;
}

double TargetDistribution::distance_to_support(const Point& x) const {
  if (x.size() != dim_) throw std::invalid_argument("distance_to_support: dimension mismatch");
  if (has_full_support()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : components_) {
    if (c.weight == 0.0) continue;
    best = std::min(best, std::max(0.0, (x - c.center).norm() - c.scale));
  }
  return best;
}

bool TargetDistribution::in_support(const Point& x, double tolerance) const {
  return distance_to_support(x) <= tolerance;
}

std::vector<Point> TargetDistribution::mode_centers() const {
  std::vector<Point> out;
  for (const auto& c : components_) {
    if (c.weight > 0.0) out.push_back(c.center);
  }
  return out;
}

TargetDistribution parse_target_config(std::istream& in) {
  int dim = 0;
  std::string label = "custom";
  std::vector<Component> comps;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("target config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "dim") {
      dim = std::stoi(value);
    } else if (key == "label") {
      label = value;
    } else if (key == "component") {
      std::istringstream fields(value);
      Component c;
      std::string shape, center;
      if (!(fields >> c.weight >> shape >> center >> c.scale)) {
        throw std::invalid_argument("target config line " + std::to_string(line_no) +
                                    ": expected <weight> <shape> <center> <scale>");
      }
      if (shape == "uniform_ball") {
        c.shape = Shape::uniform_ball;
      } else if (shape == "gaussian") {
        c.shape = Shape::gaussian;
      } else {
        throw std::invalid_argument("target config line " + std::to_string(line_no) +
                                    ": unknown shape '" + shape + "'");
      }
      const auto coords = parse_number_list(center, ',');
      c.center = Eigen::Map<const Point>(coords.data(), static_cast<Eigen::Index>(coords.size()));
      comps.push_back(std::move(c));
    } else {
      throw std::invalid_argument("target config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  if (dim == 0 && !comps.empty()) dim = static_cast<int>(comps.front().center.size());
  return TargetDistribution(dim, std::move(comps), label);
}

TargetDistribution load_target_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open target config '" + path + "'");
  return parse_target_config(in);
}

std::string to_config(const TargetDistribution& target) {
  std::ostringstream out;
  out << "label = " << target.label() << "\n";
  out << "dim = " << target.dim() << "\n";
  for (const auto& c : target.components()) {
    out << "component = " << format_double(c.weight) << ' '
        << (c.shape == Shape::uniform_ball ? "uniform_ball" : "gaussian") << ' ';
    for (Eigen::Index i = 0; i < c.center.size(); ++i) {
      if (i) out << ',';
      out << format_double(c.center[i]);
    }
    out << ' ' << format_double(c.scale) << "\n";
  }
  return out.str();
}

TargetDistribution make_target(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::vector<double> args =
      colon == std::string::npos ? std::vector<double>{} : parse_number_list(spec.substr(colon + 1), ',');
  auto need = [&](std::size_t k) {
    if (args.size() != k) {
      throw std::invalid_argument("target preset '" + name + "' expects " + std::to_string(k) +
                                  " parameters");
    }
  };
  if (name == "dense_spike") {
    need(2);
    return TargetDistribution::dense_spike(args[0], args[1]);
  }
  if (name == "separated_bimodal") {
    need(2);
    return TargetDistribution::separated_bimodal(args[0], args[1]);
  }
  if (name == "gaussian") {
    if (args.empty()) return TargetDistribution::standard_gaussian(1);
    need(1);
    return TargetDistribution::standard_gaussian(static_cast<int>(args[0]));
  }
  if (std::filesystem::exists(spec)) return load_target_config(spec);
  throw std::invalid_argument("unknown target preset or missing config file: '" + spec + "'");
}

}  // namespace bilip
