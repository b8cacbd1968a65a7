#include "bilip/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "bilip/gaussmeasure.hpp"
#include "bilip/parallel.hpp"

namespace bilip::experiments {

namespace {

std::string format_int(long long v) { return std::to_string(v); }

double parse_number(const std::string& s) { return parse_double(s); }

}  // namespace

// ---- fig3 ----

std::vector<int> default_fig3_dims() { return {1, 2, 10, 784, 3072, 12288}; }

std::vector<double> default_fig3_ratios() {
  std::vector<double> r{0.0};
  const int n = 200;
  const double lo = std::log(1e-2), hi = std::log(250.0);
  for (int i = 0; i < n; ++i) r.push_back(std::exp(lo + (hi - lo) * i / (n - 1)));
  r.back() = 250.0;
  return r;
}

CsvTable run_fig3(std::span<const int> dims, std::span<const double> ratios) {
  CsvTable table{{"dim", "ratio", "measure"}, {}};
  for (int d : dims) {
    for (double r : ratios) {
      table.rows.push_back({format_int(d), format_double(r),
                            format_double(gaussmeasure::gaussian_ball_measure_centered(d, r))});
    }
  }
  return table;
}

SvgPlot fig3_plot(const CsvTable& table) {
  SvgPlot plot;
  plot.title = "Gaussian measure of centered balls";
  plot.x_label = "R / L2";
  plot.y_label = "Q(B_R/L2)";
  plot.log_x = true;
  const std::size_t cd = table.column("dim"), cr = table.column("ratio"), cm = table.column("measure");
  for (const auto& row : table.rows) {
    if (plot.series.empty() || plot.series.back().name != "d = " + row[cd]) {
      plot.series.push_back({"d = " + row[cd], {}, {}});
    }
    plot.series.back().x.push_back(parse_number(row[cr]));
    plot.series.back().y.push_back(parse_number(row[cm]));
  }
  return plot;
}

// ---- bounds-eval ----

namespace {

struct Axis {
  std::string name;
  std::vector<double> values;
  bool integer = false;
};

std::vector<Axis> bound_axes(const BoundsEvalConfig& c) {
  const CsvRow header = bound_csv_header(c.theorem);
  const auto as_double = [](const std::vector<int>& v) {
    return std::vector<double>(v.begin(), v.end());
  };
  std::vector<Axis> axes;
  for (std::size_t i = 1; i + 3 < header.size(); ++i) {
    const std::string& n = header[i];
    Axis a{n, {}, false};
    if (n == "vol_a") a.values = c.vol;
    else if (n == "mass_a" || n == "mass_ball" || n == "mass_ball_at_center") a.values = c.mass;
    else if (n == "radius") a.values = c.radius;
    else if (n == "l1") a.values = c.l1;
    else if (n == "l2") a.values = c.l2;
    else if (n == "distance") a.values = c.distance;
    else if (n == "sigma_term") a.values = c.sigma_term;
    else if (n == "d") a = {n, as_double(c.dims), true};
    else if (n == "k") a = {n, as_double(c.k), true};
    else throw std::logic_error("bound_axes: unmapped input " + n);
    if (a.values.empty()) throw std::invalid_argument("bounds-eval: no values for " + n);
    axes.push_back(std::move(a));
  }
  return axes;
}

BoundReport evaluate_bound(TheoremId id, const std::vector<double>& v) {
  const auto i = [](double x) { return static_cast<int>(std::lround(x)); };
  switch (id) {
    case TheoremId::T1: return theorem1_bound(v[0], v[1], {v[2], v[3]}, i(v[4]));
    case TheoremId::T2a: return theorem2_bound_sqrt_pi(v[0], v[1], v[2]);
    case TheoremId::T2b: return theorem2_bound_ball93(v[0], v[1], v[2], i(v[3]));
    case TheoremId::T3: return theorem3_bound(v[0], v[1], v[2], i(v[3]));
    case TheoremId::COR1: return corollary_separated_modes(v[0], v[1], i(v[2]));
    case TheoremId::MIX: return mixture_bound(v[0], v[1], v[2], i(v[3]), v[4]);
    case TheoremId::PREC: return precision_report(v[0], v[1], i(v[2]));
  }
  throw std::logic_error("evaluate_bound: unknown theorem");
}

// Point on the sweep axis between a and b where the sign of the raw bound flips.
double locate_crossing(TheoremId id, std::vector<double> v, std::size_t axis, double a, double b,
                       bool integer) {
  const auto positive = [&](double x) {
    v[axis] = x;
    return evaluate_bound(id, v).raw_bound > 0.0;
  };
  const bool sa = positive(a);
  if (integer) {
    long long lo = std::llround(a), hi = std::llround(b);
    while (std::llabs(hi - lo) > 1) {
      const long long mid = lo + (hi - lo) / 2;
      (positive(static_cast<double>(mid)) == sa ? lo : hi) = mid;
    }
    return static_cast<double>(hi);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    (positive(mid) == sa ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

CsvTable run_bounds_eval(const BoundsEvalConfig& config) {
  std::vector<Axis> axes = bound_axes(config);
  std::size_t sweep = axes.size();
  if (!config.sweep.empty()) {
    for (std::size_t i = 0; i < axes.size(); ++i) {
      if (axes[i].name == config.sweep) sweep = i;
    }
    if (sweep == axes.size()) {
      throw std::invalid_argument("bounds-eval: " + to_string(config.theorem) +
                                  " has no input named " + config.sweep);
    }
  } else {
    for (std::size_t i = axes.size(); i-- > 0;) {
      if (axes[i].values.size() > 1) {
        sweep = i;
        break;
      }
    }
    if (sweep == axes.size()) sweep = axes.size() - 1;
  }

  // Odometer order: the non-sweep axes in header order, then the sweep axis.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (i != sweep) order.push_back(i);
  }
  order.push_back(sweep);

  CsvTable table{bound_csv_header(config.theorem), {}};
  table.header.push_back("sign_change");
  std::vector<std::size_t> idx(axes.size(), 0);
  std::vector<double> values(axes.size());
  std::vector<double> prev_values;
  bool prev_positive = false;
  while (true) {
    for (std::size_t i = 0; i < axes.size(); ++i) values[i] = axes[i].values[idx[i]];
    const BoundReport rep = evaluate_bound(config.theorem, values);
    CsvRow row = to_csv_row(rep);
    const bool positive = rep.raw_bound > 0.0;
    std::string crossing;
    if (idx[sweep] > 0 && positive != prev_positive) {
      crossing = format_double(locate_crossing(config.theorem, values, sweep, prev_values[sweep],
                                               values[sweep], axes[sweep].integer));
    }
    row.push_back(crossing);
    table.rows.push_back(std::move(row));
    prev_values = values;
    prev_positive = positive;

    std::size_t k = order.size();
    while (k-- > 0) {
      const std::size_t a = order[k];
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return table;
}

SvgPlot bounds_eval_plot(const CsvTable& table) {
  SvgPlot plot;
  if (table.rows.empty()) return plot;
  const std::size_t first_input = 1;
  const std::size_t value_col = table.header.size() - 4;
  // The sweep axis is the input column that changes between the first two
  // rows; with a single row any column will do.
  std::size_t sweep = value_col - 1;
  if (table.rows.size() > 1) {
    for (std::size_t c = first_input; c < value_col; ++c) {
      if (table.rows[0][c] != table.rows[1][c]) {
        sweep = c;
        break;
      }
    }
  }
  plot.title = table.rows[0][0] + " bound";
  plot.x_label = table.header[sweep];
  plot.y_label = table.header[value_col];
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const bool restart = r == 0 || parse_number(row[sweep]) <= parse_number(table.rows[r - 1][sweep]);
    if (restart) {
      std::string name;
      for (std::size_t c = first_input; c < value_col; ++c) {
        if (c == sweep) continue;
        bool varies = false;
        for (const auto& other : table.rows) varies = varies || other[c] != row[c];
        if (varies) name += (name.empty() ? "" : " ") + table.header[c] + "=" + row[c];
      }
      plot.series.push_back({name.empty() ? table.header[value_col] : name, {}, {}});
    }
    plot.series.back().x.push_back(parse_number(row[sweep]));
    plot.series.back().y.push_back(parse_number(row[value_col]));
  }
  const auto& xs = plot.series.front().x;
  plot.log_x = xs.size() > 2 && xs.front() > 0.0 && xs.back() / xs.front() > 100.0;
  return plot;
}

// ---- verify ----

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::theorem1: return "theorem1";
    case Scenario::theorem2: return "theorem2";
    case Scenario::theorem3: return "theorem3";
    case Scenario::corollary: return "corollary";
  }
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::theorem1, Scenario::theorem2, Scenario::theorem3, Scenario::corollary}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown scenario: " + name);
}

VerifyConfig default_verify_config(Scenario scenario) {
  VerifyConfig c;
  c.scenario = scenario;
  if (scenario == Scenario::theorem1 || scenario == Scenario::theorem2) {
    c.targets = {"dense_spike:0.9,0.1"};
    c.l1 = {1.0};
    c.l2 = {1e6};
  } else {
    c.targets = {"separated_bimodal:2,0.1"};
    c.l1 = {1e6};
    c.l2 = {1.0};
  }
  return c;
}

namespace {

CsvRow verify_header() {
  return {"scenario",      "target",         "l1_budget",    "l2_budget", "certified_l1",
          "certified_l2",  "bound",          "valid",        "witness_center",
          "witness_radius", "measured_tv",   "gap",          "status"};
}

CsvRow verify_cell(const VerifyConfig& c, const TargetDistribution& target, double l1, double l2,
                   bool& violation) {
  const std::string nan = "nan";
  CsvRow row{to_string(c.scenario), target.label(), format_double(l1), format_double(l2)};
  FitOptions opt;
  opt.l1_max = l1;
  opt.l2_max = l2;
  opt.knots = c.knots;
  opt.steps = c.steps;
  opt.step_size = c.step_size;
  opt.seed = c.seed;
  opt.objective = c.objective;

  std::optional<FitResult> fit;
  try {
    fit = fit_projected_gradient(target, opt);
  } catch (const std::exception&) {
    row.insert(row.end(), {nan, nan, nan, "false", nan, nan, nan, nan, "fit_failed"});
    return row;
  }
  const PiecewiseLinearFlow1D& flow = fit->flow;
  const BiLipschitzConstants cert = certify_bilipschitz(flow);
  const TvEstimate tv = tv_quadrature(target, flow, c.panels);

  const Point origin_preimage = Point::Constant(1, flow.inverse(0.0));
  BoundReport rep;
  bool applicable = true;
  switch (c.scenario) {
    case Scenario::theorem1: rep = sup_theorem1(target, {l1, l2}); break;
    case Scenario::theorem2: rep = sup_theorem2_sqrt_pi(target, l1); break;
    case Scenario::theorem3: rep = sup_theorem3(target, origin_preimage, l2); break;
    case Scenario::corollary: {
      const double dist = target.distance_to_support(origin_preimage);
      if (dist > 0.0) {
        rep = corollary_separated_modes(dist, l2, 1);
      } else {
        rep.id = TheoremId::COR1;
        rep.witness.radius = 0.0;
        applicable = false;
      }
      rep.witness.center = origin_preimage;
      break;
    }
  }
  const double gap = tv.value - rep.lower_bound_tv;
  const bool bad = gap < -c.tolerance;
  violation = violation || bad;
  row.insert(row.end(),
             {format_double(cert.l1), format_double(cert.l2), format_double(rep.lower_bound_tv),
              rep.valid ? "true" : "false",
              rep.witness.center.size() > 0 ? format_double(rep.witness.center[0]) : nan,
              format_double(rep.witness.radius), format_double(tv.value), format_double(gap),
              bad ? "violation" : (applicable ? "ok" : "not_applicable")});
  return row;
}

}  // namespace

VerifyResult run_verify(const VerifyConfig& config) {
  if (config.targets.empty() || config.l1.empty() || config.l2.empty()) {
    throw std::invalid_argument("verify: need at least one target and one budget");
  }
  std::vector<TargetDistribution> targets;
  for (const auto& spec : config.targets) {
    targets.push_back(make_target(spec));
    if (targets.back().dim() != 1) throw std::invalid_argument("verify: targets must be 1D: " + spec);
  }
  struct Cell {
    std::size_t target;
    double l1;
    double l2;
  };
  std::vector<Cell> cells;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (double l1 : config.l1) {
      for (double l2 : config.l2) cells.push_back({t, l1, l2});
    }
  }
  std::vector<CsvRow> rows(cells.size());
  std::vector<char> violations(cells.size(), 0);
  parallel_for(cells.size(), config.jobs, [&](std::size_t i) {
    bool v = false;
    rows[i] = verify_cell(config, targets[cells[i].target], cells[i].l1, cells[i].l2, v);
    violations[i] = v;
  });
  VerifyResult result{{verify_header(), std::move(rows)}, true};
  for (char v : violations) result.sound = result.sound && !v;
  return result;
}

SvgPlot verify_plot(const CsvTable& table) {
  SvgPlot plot;
  plot.title = table.rows.empty() ? "verify" : "verify: " + table.rows[0][table.column("scenario")];
  plot.x_label = "cell";
  plot.y_label = "TV";
  SvgSeries bound{"bound", {}, {}}, measured{"measured TV", {}, {}};
  const std::size_t cb = table.column("bound"), cm = table.column("measured_tv");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    bound.x.push_back(static_cast<double>(i));
    bound.y.push_back(parse_number(table.rows[i][cb]));
    measured.x.push_back(static_cast<double>(i));
    measured.y.push_back(parse_number(table.rows[i][cm]));
  }
  plot.series = {bound, measured};
  return plot;
}

// ---- fit1d ----

Fit1dResult run_fit1d(const Fit1dConfig& config) {
  const TargetDistribution target = make_target(config.target);
  if (target.dim() != 1) throw std::invalid_argument("fit1d: target must be 1D");
  FitOptions opt = config.fit;
  if (!opt.init) opt.init = clipped_quantile_flow(target, opt.l1_max, opt.l2_max, opt.knots);
  const TvEstimate initial = tv_quadrature(target, *opt.init, config.panels);
  FitResult fit = fit_projected_gradient(target, opt);
  const BiLipschitzConstants cert = certify_bilipschitz(fit.flow);
  const TvEstimate final_tv = tv_quadrature(target, fit.flow, config.panels);

  CsvTable summary{{"target", "l1_budget", "l2_budget", "knots", "objective", "steps",
                    "accepted_steps", "initial_tv", "final_tv", "certified_l1", "certified_l2",
                    "stalled"},
                   {}};
  summary.rows.push_back({target.label(), format_double(opt.l1_max), format_double(opt.l2_max),
                          format_int(static_cast<long long>(fit.flow.knots_x().size())),
                          to_string(opt.objective), format_int(opt.steps),
                          format_int(fit.accepted_steps), format_double(initial.value),
                          format_double(final_tv.value), format_double(cert.l1),
                          format_double(cert.l2), fit.stalled ? "true" : "false"});

  const Interval range = target.effective_range_1d(1e-6);
  const double lo = std::min(range.lo, fit.flow.inverse(-4.0));
  const double hi = std::max(range.hi, fit.flow.inverse(4.0));
  CsvTable densities{{"x", "p_star", "p_hat"}, {}};
  const int n = std::max(2, config.density_points);
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    densities.rows.push_back({format_double(x), format_double(target.density(x)),
                              format_double(fit.flow.model_density(x))});
  }
  return {std::move(fit), cert, initial, final_tv, std::move(summary), std::move(densities)};
}

SvgPlot density_plot(const CsvTable& densities, const std::string& title) {
  SvgPlot plot;
  plot.title = title;
  plot.x_label = "x";
  plot.y_label = "density";
  SvgSeries star{"target p*", {}, {}}, hat{"flow p_hat", {}, {}};
  const std::size_t cx = densities.column("x"), cs = densities.column("p_star"),
                    ch = densities.column("p_hat");
  for (const auto& row : densities.rows) {
    const double x = parse_number(row[cx]);
    star.x.push_back(x);
    star.y.push_back(parse_number(row[cs]));
    hat.x.push_back(x);
    hat.y.push_back(parse_number(row[ch]));
  }
  plot.series = {star, hat};
  return plot;
}

}  // namespace bilip::experiments
