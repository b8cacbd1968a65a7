#include "bilip/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bilip/specfun.hpp"

namespace bilip {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

void require_mass(double m) { require(m >= 0.0 && m <= 1.0, "bound: mass must lie in [0, 1]"); }

BoundReport make_report(TheoremId id, std::vector<BoundInput> inputs, double raw) {
  BoundReport r;
  r.id = id;
  r.inputs = std::move(inputs);
  r.raw_bound = raw;
  r.lower_bound_tv = std::min(raw, 1.0);
  r.valid = r.lower_bound_tv > 0.0;
  return r;
}

// P(d/2, R^2 / (2 l2^2)) with an underflow flag.
std::pair<double, bool> latent_ball_measure(double radius, double l2, int d) {
  const double x = radius * radius / (2.0 * l2 * l2);
  const double p = specfun::regularized_lower_gamma(0.5 * d, x).value;
  return {p, x > 0.0 && p < std::numeric_limits<double>::min()};
}

}  // namespace

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::T1: return "T1";
    case TheoremId::T2a: return "T2a";
    case TheoremId::T2b: return "T2b";
    case TheoremId::T3: return "T3";
    case TheoremId::COR1: return "COR1";
    case TheoremId::MIX: return "MIX";
    case TheoremId::PREC: return "PREC";
  }
  return "?";
}

TheoremId parse_theorem_id(const std::string& name) {
  for (TheoremId id : {TheoremId::T1, TheoremId::T2a, TheoremId::T2b, TheoremId::T3,
                       TheoremId::COR1, TheoremId::MIX, TheoremId::PREC}) {
    if (to_string(id) == name) return id;
  }
  throw std::invalid_argument("unknown theorem id: " + name);
}

BoundReport theorem1_bound(double vol_a, double mass_a, const BiLipschitzConstants& consts, int d) {
  require(vol_a > 0.0 && std::isfinite(vol_a), "theorem1_bound: vol_a must be positive");
  require_mass(mass_a);
  validate(consts);
  require(d >= 1, "theorem1_bound: d must be >= 1");
  const double base = consts.l1 / (4.0 * consts.l2 * std::sqrt(2.0 * std::numbers::pi));
  const double raw = mass_a - vol_a * std::pow(base, d);
  BoundReport r = make_report(TheoremId::T1,
                              {{"vol_a", vol_a}, {"mass_a", mass_a}, {"l1", consts.l1},
                               {"l2", consts.l2}, {"d", static_cast<double>(d)}},
                              raw);
  r.witness.volume = vol_a;
  return r;
}

BoundReport theorem2_bound_sqrt_pi(double mass_ball, double radius, double l1) {
  require_mass(mass_ball);
  require(radius > 0.0, "theorem2_bound_sqrt_pi: radius must be positive");
  require(l1 > 0.0, "theorem2_bound_sqrt_pi: l1 must be positive");
  const double raw = mass_ball - radius * l1 / std::sqrt(std::numbers::pi);
  BoundReport r = make_report(TheoremId::T2a,
                              {{"mass_ball", mass_ball}, {"radius", radius}, {"l1", l1}}, raw);
  r.witness.radius = radius;
  return r;
}

BoundReport theorem2_bound_ball93(double mass_ball, double radius, double l1, int d) {
  require_mass(mass_ball);
  require(radius > 0.0, "theorem2_bound_ball93: radius must be positive");
  require(l1 > 0.0, "theorem2_bound_ball93: l1 must be positive");
  require(d >= 2, "theorem2_bound_ball93: requires d >= 2");
  const double raw = mass_ball - 4.0 * std::pow(static_cast<double>(d), 0.25) * radius * l1;
  BoundReport r = make_report(TheoremId::T2b,
                              {{"mass_ball", mass_ball}, {"radius", radius}, {"l1", l1},
                               {"d", static_cast<double>(d)}},
                              raw);
  r.witness.radius = radius;
  r.strict = true;
  return r;
}

BoundReport theorem3_bound(double mass_ball_at_center, double radius, double l2, int d) {
  require_mass(mass_ball_at_center);
  require(radius >= 0.0 && std::isfinite(radius), "theorem3_bound: radius must be >= 0");
  require(l2 > 0.0, "theorem3_bound: l2 must be positive");
  require(d >= 1, "theorem3_bound: d must be >= 1");
  const auto [p, underflow] = latent_ball_measure(radius, l2, d);
  BoundReport r = make_report(TheoremId::T3,
                              {{"mass_ball_at_center", mass_ball_at_center}, {"radius", radius},
                               {"l2", l2}, {"d", static_cast<double>(d)}},
                              p - mass_ball_at_center);
  r.witness.radius = radius;
  r.underflow = underflow;
  return r;
}

BoundReport corollary_separated_modes(double distance, double l2, int d) {
  require(distance > 0.0 && std::isfinite(distance), "corollary_separated_modes: D must be positive");
  BoundReport t3 = theorem3_bound(0.0, distance, l2, d);
  BoundReport r = make_report(TheoremId::COR1,
                              {{"distance", distance}, {"l2", l2}, {"d", static_cast<double>(d)}},
                              t3.raw_bound);
  r.witness.radius = distance;
  r.underflow = t3.underflow;
  return r;
}

BoundReport mixture_bound(double mass_ball, double radius, double l1, int k, double sigma_term) {
  require_mass(mass_ball);
  require(radius > 0.0, "mixture_bound: radius must be positive");
  require(l1 > 0.0, "mixture_bound: l1 must be positive");
  require(k >= 1, "mixture_bound: k must be >= 1");
  require(sigma_term > 0.0, "mixture_bound: sigma_term must be positive");
  const double raw =
      mass_ball - radius * l1 / (static_cast<double>(k) * sigma_term * std::sqrt(std::numbers::pi));
  BoundReport r = make_report(TheoremId::MIX,
                              {{"mass_ball", mass_ball}, {"radius", radius}, {"l1", l1},
                               {"k", static_cast<double>(k)}, {"sigma_term", sigma_term}},
                              raw);
  r.witness.radius = radius;
  return r;
}

double precision_upper_bound(double distance, double l2, int d) {
  return std::clamp(1.0 - corollary_separated_modes(distance, l2, d).lower_bound_tv, 0.0, 1.0);
}

BoundReport precision_report(double distance, double l2, int d) {
  const BoundReport cor = corollary_separated_modes(distance, l2, d);
  BoundReport r = make_report(TheoremId::PREC,
                              {{"distance", distance}, {"l2", l2}, {"d", static_cast<double>(d)}},
                              std::clamp(1.0 - cor.lower_bound_tv, 0.0, 1.0));
  r.witness.radius = distance;
  r.underflow = cor.underflow;
  return r;
}

double tv_from_max_precision(double alpha_bar) {
  require(alpha_bar >= 0.0 && alpha_bar <= 1.0, "tv_from_max_precision: argument must lie in [0, 1]");
  return 1.0 - alpha_bar;
}

double tv_from_max_recall(double beta_bar) {
  require(beta_bar >= 0.0 && beta_bar <= 1.0, "tv_from_max_recall: argument must lie in [0, 1]");
  return 1.0 - beta_bar;
}

CsvRow bound_csv_header(TheoremId id) {
  static const std::vector<std::pair<TheoremId, std::vector<std::string>>> names = {
      {TheoremId::T1, {"vol_a", "mass_a", "l1", "l2", "d"}},
      {TheoremId::T2a, {"mass_ball", "radius", "l1"}},
      {TheoremId::T2b, {"mass_ball", "radius", "l1", "d"}},
      {TheoremId::T3, {"mass_ball_at_center", "radius", "l2", "d"}},
      {TheoremId::COR1, {"distance", "l2", "d"}},
      {TheoremId::MIX, {"mass_ball", "radius", "l1", "k", "sigma_term"}},
      {TheoremId::PREC, {"distance", "l2", "d"}},
  };
  CsvRow row{"theorem_id"};
  for (const auto& [tid, cols] : names) {
    if (tid == id) row.insert(row.end(), cols.begin(), cols.end());
  }
  row.push_back(id == TheoremId::PREC ? "max_precision_upper" : "lower_bound_tv");
  row.push_back("raw_bound");
  row.push_back("valid");
  return row;
}

CsvRow to_csv_row(const BoundReport& report) {
  CsvRow row{to_string(report.id)};
  for (const auto& in : report.inputs) row.push_back(format_double(in.value));
  row.push_back(format_double(report.lower_bound_tv));
  row.push_back(format_double(report.raw_bound));
  row.push_back(report.valid ? "true" : "false");
  return row;
}

BoundReport maximize_over_radius(const BallBoundFn& bound, std::span<const Point> centers,
                                 const RadiusSearch& search) {
  if (centers.empty()) throw std::invalid_argument("maximize_over_radius: no centers");
  require(search.r_min > 0.0 && search.r_max > search.r_min,
          "maximize_over_radius: need 0 < r_min < r_max");
  require(search.grid >= 2, "maximize_over_radius: grid must be >= 2");

  std::vector<double> radii;
  const double ratio = std::log(search.r_max / search.r_min);
  for (int i = 0; i < search.grid; ++i) {
    radii.push_back(search.r_min * std::exp(ratio * i / (search.grid - 1)));
  }
  for (double r : search.extra_radii) {
    if (r > 0.0 && std::isfinite(r)) radii.push_back(r);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  bool have_best = false;
  BoundReport best;
  const auto consider = [&](const BoundReport& r) {
    if (!have_best || r.raw_bound > best.raw_bound) {
      best = r;
      have_best = true;
    }
  };

  for (const Point& c : centers) {
    std::size_t best_i = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < radii.size(); ++i) {
      BoundReport r = bound(c, radii[i]);
      if (r.raw_bound > best_v) {
        best_v = r.raw_bound;
        best_i = i;
      }
      consider(r);
    }
    // Golden section between the grid neighbours of the best radius.
    double a = radii[best_i == 0 ? 0 : best_i - 1];
    double b = radii[std::min(best_i + 1, radii.size() - 1)];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    BoundReport r1 = bound(c, x1);
    BoundReport r2 = bound(c, x2);
    for (int it = 0; it < search.golden_iterations && b - a > 1e-15 * b; ++it) {
      if (r1.raw_bound >= r2.raw_bound) {
        b = x2;
        x2 = x1;
        r2 = r1;
        x1 = b - g * (b - a);
        r1 = bound(c, x1);
      } else {
        a = x1;
        x1 = x2;
        r1 = r2;
        x2 = a + g * (b - a);
        r2 = bound(c, x2);
      }
      consider(r1);
      consider(r2);
    }
  }
  return best;
}

RadiusSearch radius_search_for(const TargetDistribution& target, std::span<const Point> centers) {
  RadiusSearch s;
  if (target.dim() == 1) {
    const Interval range = target.effective_range_1d();
    double reach = 0.0;
    for (const Point& c : centers) {
      reach = std::max({reach, std::fabs(c[0] - range.lo), std::fabs(range.hi - c[0])});
    }
    s.r_max = std::max(reach, 2.0 * s.r_min);
    const auto breaks = target.breakpoints_1d();
    for (const Point& c : centers) {
      for (double b : breaks) s.extra_radii.push_back(std::fabs(b - c[0]));
    }
  } else {
    s.grid = 60;
    double reach = 0.0;
    for (const auto& comp : target.components()) {
      const double spread = comp.shape == Shape::gaussian ? 8.0 * comp.scale : comp.scale;
      for (const Point& c : centers) reach = std::max(reach, (comp.center - c).norm() + spread);
    }
    s.r_max = std::max(reach, 2.0 * s.r_min);
    for (const auto& comp : target.components()) {
      if (comp.shape != Shape::uniform_ball) continue;
      for (const Point& c : centers) {
        const double dist = (comp.center - c).norm();
        s.extra_radii.push_back(dist + comp.scale);
        s.extra_radii.push_back(std::fabs(dist - comp.scale));
      }
    }
  }
  return s;
}

std::vector<Point> search_centers(const TargetDistribution& target, std::span<const Point> extra) {
  std::vector<Point> centers = target.mode_centers();
  for (const Point& p : extra) {
    if (p.size() != target.dim()) throw std::invalid_argument("search_centers: dimension mismatch");
    centers.push_back(p);
  }
  return centers;
}

namespace {

template <class Fn>
BoundReport sup_ball_bound(const TargetDistribution& target, std::span<const Point> extra,
                           Fn&& make) {
  const std::vector<Point> centers = search_centers(target, extra);
  const RadiusSearch search = radius_search_for(target, centers);
  return maximize_over_radius(
      [&](const Point& c, double r) {
        const double mass = std::clamp(target.ball_mass(c, r).value, 0.0, 1.0);
        BoundReport rep = make(mass, r);
        rep.witness.center = c;
        return rep;
      },
      centers, search);
}

}  // namespace

BoundReport sup_theorem1(const TargetDistribution& target, const BiLipschitzConstants& consts,
                         std::span<const Point> extra_centers) {
  const int d = target.dim();
  return sup_ball_bound(target, extra_centers, [&](double mass, double r) {
    BoundReport rep = theorem1_bound(ball_volume(d, r), mass, consts, d);
    rep.witness.radius = r;
    return rep;
  });
}

BoundReport sup_theorem2_sqrt_pi(const TargetDistribution& target, double l1,
                                 std::span<const Point> extra_centers) {
  return sup_ball_bound(target, extra_centers,
                        [&](double mass, double r) { return theorem2_bound_sqrt_pi(mass, r, l1); });
}

BoundReport sup_theorem2_ball93(const TargetDistribution& target, double l1,
                                std::span<const Point> extra_centers) {
  const int d = target.dim();
  return sup_ball_bound(target, extra_centers, [&](double mass, double r) {
    return theorem2_bound_ball93(mass, r, l1, d);
  });
}

BoundReport sup_theorem3(const TargetDistribution& target, const Point& flow_preimage_of_origin,
                         double l2) {
  const std::vector<Point> centers{flow_preimage_of_origin};
  if (flow_preimage_of_origin.size() != target.dim()) {
    throw std::invalid_argument("sup_theorem3: dimension mismatch");
  }
  const int d = target.dim();
  RadiusSearch search = radius_search_for(target, centers);
  // The latent term saturates once R / l2 is a few multiples of sqrt(d).
  search.r_max = std::max(search.r_max, l2 * (std::sqrt(static_cast<double>(d)) + 10.0));
  return maximize_over_radius(
      [&](const Point& c, double r) {
        const double mass = std::clamp(target.ball_mass(c, r).value, 0.0, 1.0);
        BoundReport rep = theorem3_bound(mass, r, l2, d);
        rep.witness.center = c;
        return rep;
      },
      centers, search);
}

BoundReport sup_mixture(const TargetDistribution& target, double l1, int k, double sigma_term,
                        std::span<const Point> extra_centers) {
  return sup_ball_bound(target, extra_centers, [&](double mass, double r) {
    return mixture_bound(mass, r, l1, k, sigma_term);
  });
}

}  // namespace bilip
