// Acceptance checks. `acceptance` runs all criteria, `acceptance N` one of
// them. Each prints a single PASS/FAIL line; the exit code is nonzero if any
// selected criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bilip/bounds.hpp"
#include "bilip/csv.hpp"
#include "bilip/experiments.hpp"
#include "bilip/flows.hpp"
#include "bilip/gaussmeasure.hpp"
#include "bilip/specfun.hpp"
#include "bilip/targets.hpp"
#include "bilip/tvmetrics.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace bilip;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Point p1(double x) { return Point::Constant(1, x); }

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bilip_acceptance_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + BILIP_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome criterion1() {
  double worst_half = 0.0, worst_one = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = 40.0 * i / 999.0;
    worst_half = std::max(worst_half, std::fabs(specfun::regularized_lower_gamma(0.5, x).value - std::erf(std::sqrt(x))));
    worst_one = std::max(worst_one, std::fabs(specfun::regularized_lower_gamma(1.0, x).value - (1.0 - std::exp(-x))));
  }
  return {worst_half <= 1e-10 && worst_one <= 1e-12,
          fmt("max |P(1/2,x)-erf(sqrt x)| = %.3g, max |P(1,x)-(1-e^-x)| = %.3g", worst_half, worst_one)};
}

Outcome criterion2() {
  const int dims[] = {1, 2, 3, 10, 100, 784, 3072, 12288};
  int checked = 0, fail_sqrt_pi = 0, fail_ball93 = 0;
  std::string first;
  for (int d : dims) {
    for (int k = 1; k <= 200; ++k) {
      const double r = 20.0 * k / 200.0;
      const double q = gaussmeasure::gaussian_ball_measure_centered(d, r);
      ++checked;
      if (!(q < r / std::sqrt(std::numbers::pi))) {
        if (first.empty()) first = fmt("first: d=%d r=%.2f Q=%.6f r/sqrt(pi)=%.6f", d, r, q, r / std::sqrt(std::numbers::pi));
        ++fail_sqrt_pi;
      }
      if (d >= 2 && !(q < 4.0 * std::pow(d, 0.25) * r)) ++fail_ball93;
    }
  }
  return {fail_sqrt_pi == 0 && fail_ball93 == 0,
          fmt("%d (d, r) pairs, r/sqrt(pi) violations %d, 4 d^(1/4) r violations %d", checked, fail_sqrt_pi,
              fail_ball93) +
              (first.empty() ? "" : "; " + first)};
}

Outcome criterion3() {
  const auto dir = scratch_dir("fig3");
  if (run_cli("fig3 --format csv --out \"" + dir.string() + "\"") != 0) return {false, "bilip fig3 failed"};
  const CsvTable t = read_csv_file((dir / "fig3.csv").string());
  fs::remove_all(dir);
  const std::size_t cd = t.column("dim"), cr = t.column("ratio"), cm = t.column("measure");
  double worst = 0.0;
  int compared = 0, monotone_violations = 0;
  std::map<double, std::vector<std::pair<int, double>>> by_ratio;
  for (const auto& row : t.rows) {
    const int d = std::stoi(row[cd]);
    const double ratio = parse_double(row[cr]), m = parse_double(row[cm]);
    by_ratio[ratio].push_back({d, m});
    if (d == 1 || d == 2 || d == 10) {
      const double ref = static_cast<double>(oracle::gaussian_ball_polar(d, ratio, 2000));
      worst = std::max(worst, std::fabs(m - ref));
      ++compared;
    }
  }
  for (auto& [ratio, v] : by_ratio) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].second > v[i - 1].second) ++monotone_violations;
    }
  }
  return {compared > 0 && worst <= 1e-8 && monotone_violations == 0,
          fmt("%d rows vs polar quadrature, max error %.3g; dimension-monotonicity violations %d", compared, worst,
              monotone_violations)};
}

Outcome criterion4() {
  const auto t = TargetDistribution::dense_spike(0.9, 0.1);
  const auto sup = sup_theorem2_sqrt_pi(t, 1.0);
  const double expected = 0.9 - 0.05 / std::sqrt(std::numbers::pi);
  const auto r = experiments::run_verify(experiments::default_verify_config(experiments::Scenario::theorem2));
  const double tv = parse_double(r.table.rows.at(0).at(r.table.column("measured_tv")));
  const bool bound_ok = sup.lower_bound_tv >= expected;
  const bool sound = tv >= sup.lower_bound_tv - 1e-3;
  return {bound_ok && sound, fmt("sup bound %.6f (>= %.6f: %s, witness R=%.4f), fitted TV %.6f, gap %.6f",
                                 sup.lower_bound_tv, expected, bound_ok ? "yes" : "no", sup.witness.radius, tv,
                                 tv - sup.lower_bound_tv)};
}

Outcome criterion5() {
  const auto r = experiments::run_verify(experiments::default_verify_config(experiments::Scenario::corollary));
  const double bound = parse_double(r.table.rows.at(0).at(r.table.column("bound")));
  const double tv = parse_double(r.table.rows.at(0).at(r.table.column("measured_tv")));
  const double expected = std::erf(std::sqrt(2.0));
  const bool bound_ok = std::fabs(bound - expected) <= 1e-9;
  return {bound_ok && tv >= bound - 1e-3,
          fmt("bound %.10f (erf(sqrt 2) = %.10f), fitted TV %.10f", bound, expected, tv)};
}

Outcome criterion6() {
  const double big = 1e6;
  bool pass = true;
  std::string detail;
  for (const auto& t : {TargetDistribution::dense_spike(0.9, 0.1), TargetDistribution::separated_bimodal(2.0, 0.1)}) {
    const auto flow = clipped_quantile_flow(t, big, big, 2048);
    const double tv = tv_quadrature(t, flow).value;
    const Point x0 = p1(flow.inverse(0.0));
    std::vector<BoundReport> reports{sup_theorem1(t, {big, big}), sup_theorem2_sqrt_pi(t, big),
                                     sup_theorem3(t, x0, big), sup_mixture(t, big, 1, 1.0)};
    const double dist = t.distance_to_support(x0);
    if (dist > 0.0) reports.push_back(corollary_separated_modes(dist, big, 1));
    detail += fmt("%s: TV %.4g", t.label().c_str(), tv);
    pass = pass && tv < 0.05;
    for (const auto& rep : reports) {
      detail += fmt(", %s %.3g", to_string(rep.id).c_str(), rep.raw_bound);
      pass = pass && !rep.valid && rep.raw_bound <= 0.0;
    }
    detail += "; ";
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

PiecewiseLinearFlow1D random_pl_flow(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nk(2, 30);
  std::uniform_real_distribution<double> gap(0.01, 1.0), lslope(-3.0, 3.0), start(-5.0, 0.0);
  const int k = nk(rng);
  std::vector<double> xs{start(rng)}, zs{start(rng)};
  for (int i = 1; i < k; ++i) {
    xs.push_back(xs.back() + gap(rng));
    zs.push_back(zs.back() + std::exp(lslope(rng)) * (xs.back() - xs[xs.size() - 2]));
  }
  return PiecewiseLinearFlow1D(xs, zs, std::exp(lslope(rng)), std::exp(lslope(rng)));
}

Outcome criterion7() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ux(-10.0, 10.0);
  long long points = 0, violations = 0;
  for (int f = 0; f < 100; ++f) {
    const auto flow = random_pl_flow(rng);
    const auto c = certify_bilipschitz(flow);
    for (int i = 0; i < 10000; ++i, ++points) {
      const double j = flow.slope_at(ux(rng));
      if (j < 1.0 / c.l2 || j > c.l1) ++violations;
    }
  }
  // Affine flows have a constant Jacobian, so one check per flow covers all points.
  std::normal_distribution<double> n01;
  int affine = 0;
  for (int f = 0; f < 20; ++f, ++affine) {
    const int d = 2 + f % 7;
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d * d; ++i) m(i / d, i % d) = n01(rng);
    const AffineFlowD flow(m, Eigen::VectorXd::Zero(d));
    const auto c = certify_bilipschitz(flow);
    const double j = flow.abs_det();
    if (j < std::pow(1.0 / c.l2, d) * (1 - 1e-12) || j > std::pow(c.l1, d) * (1 + 1e-12)) ++violations;
  }
  return {violations == 0,
          fmt("%lld points on 100 piecewise-linear flows plus %d affine flows, %lld violations", points, affine,
              violations)};
}

std::vector<TargetDistribution> matrix_targets() {
  return {TargetDistribution::dense_spike(0.9, 0.1), TargetDistribution::dense_spike(0.95, 0.02),
          TargetDistribution::separated_bimodal(2.0, 0.1), TargetDistribution::separated_bimodal(0.5, 1.0),
          TargetDistribution::standard_gaussian(),
          TargetDistribution(1, {{0.3, Shape::gaussian, p1(-2.0), 0.5}, {0.7, Shape::uniform_ball, p1(1.0), 0.3}})};
}

Outcome criterion8() {
  int cells = 0, violations = 0;
  double worst = INFINITY;
  for (const auto& t : matrix_targets()) {
    std::vector<PiecewiseLinearFlow1D> flows{PiecewiseLinearFlow1D::identity(), PiecewiseLinearFlow1D::affine(0.5),
                                             PiecewiseLinearFlow1D::affine(3.0, 1.0)};
    for (auto [l1, l2] : {std::pair{1.0, 1e6}, std::pair{1e6, 1.0}, std::pair{4.0, 4.0}, std::pair{1e6, 1e6}}) {
      flows.push_back(clipped_quantile_flow(t, l1, l2, 256));
    }
    for (const auto& flow : flows) {
      const double margin = tv_quadrature(t, flow).value - (1.0 - max_precision(t, flow));
      worst = std::min(worst, margin);
      ++cells;
      if (margin < -1e-6) ++violations;
    }
  }
  return {violations == 0, fmt("%d target x flow cells, %d violations, min TV - (1 - alpha) = %.3g", cells,
                               violations, worst)};
}

Outcome criterion9() {
  const auto a = scratch_dir("verify_a"), b = scratch_dir("verify_b");
  bool same = true;
  std::string detail;
  for (const std::string scenario : {"theorem2", "corollary"}) {
    const std::string args = "verify --scenario " + scenario + " --seed 7 --jobs 4 --format csv --out ";
    const int ra = run_cli(args + "\"" + a.string() + "\"");
    const int rb = run_cli(args + "\"" + b.string() + "\"");
    const std::string file = "verify_" + scenario + ".csv";
    const std::string ca = slurp(a / file), cb = slurp(b / file);
    const bool eq = !ca.empty() && ca == cb && ra == rb && (ra == 0 || ra == 2);
    same = same && eq;
    detail += fmt("%s: %zu bytes, %s; ", scenario.c_str(), ca.size(), eq ? "identical" : "differ");
  }
  fs::remove_all(a);
  fs::remove_all(b);
  detail.resize(detail.size() - 2);
  return {same, detail};
}

Outcome criterion10() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int agree = 0;
  double worst_z = 0.0;
  for (int c = 0; c < 20; ++c) {
    TargetDistribution t = TargetDistribution::standard_gaussian();
    switch (c % 4) {
      case 0: t = TargetDistribution::dense_spike(0.5 + 0.45 * u01(rng), 0.02 + 0.3 * u01(rng)); break;
      case 1: t = TargetDistribution::separated_bimodal(0.2 + 3.0 * u01(rng), 0.05 + 0.5 * u01(rng)); break;
      case 2:
        t = TargetDistribution(1, {{0.4, Shape::gaussian, p1(-1.0 - u01(rng)), 0.2 + u01(rng)},
                                   {0.6, Shape::gaussian, p1(1.0 + u01(rng)), 0.2 + u01(rng)}});
        break;
      default: break;
    }
    PiecewiseLinearFlow1D flow = PiecewiseLinearFlow1D::identity();
    if (c % 2 == 0) {
      flow = clipped_quantile_flow(t, 1.0 + 5.0 * u01(rng), 1.0 + 5.0 * u01(rng), 64);
    } else {
      flow = PiecewiseLinearFlow1D::affine(0.3 + 3.0 * u01(rng), u01(rng) - 0.5);
    }
    const auto q = tv_quadrature(t, flow);
    const auto mc = tv_monte_carlo(t, flow, 100000, 1000 + c, 4);
    const double diff = std::fabs(mc.value - q.value);
    const double z = mc.std_error > 0.0 ? diff / mc.std_error : (diff < 1e-12 ? 0.0 : INFINITY);
    worst_z = std::max(worst_z, z);
    if (z <= 4.0) ++agree;
  }
  return {agree == 20, fmt("%d/20 cases within 4 stderr, max |MC - quad| / stderr = %.3g", agree, worst_z)};
}

struct Criterion {
  int id;
  const char* name;
  double max_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "special-function identities", 1.0, criterion1},
      {2, "ball measure caps", 5.0, criterion2},
      {3, "fig3 vs polar quadrature", 10.0, criterion3},
      {4, "dense spike soundness (T2)", 60.0, criterion4},
      {5, "separated modes soundness (COR1)", 60.0, criterion5},
      {6, "expressive-regime control", 30.0, criterion6},
      {7, "Jacobian determinant range", 0.0, criterion7},
      {8, "TV >= 1 - max precision", 0.0, criterion8},
      {9, "verify determinism", 0.0, criterion9},
      {10, "MC vs quadrature", 0.0, criterion10},
  };
  int selected = 0;
  if (argc > 1) selected = std::atoi(argv[1]);
  int failures = 0;
  for (const auto& c : all) {
    if (selected != 0 && c.id != selected) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.max_seconds > 0.0 && secs > c.max_seconds) {
      o.pass = false;
      o.detail += fmt("; runtime %.2f s exceeds %.0f s", secs, c.max_seconds);
    }
    std::printf("%s %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
