// bilip: experiment runner for bi-Lipschitz flow TV bounds.
//
//   bilip fig3        Gaussian measure of centered balls vs R/L2
//   bilip bounds-eval bound formulas over a parameter grid
//   bilip verify      fitted flows vs. the bounds (exit 2 on a violation)
//   bilip fit1d       one constrained fit with diagnostics
//   bilip plot        re-render an SVG from a CSV written by the above
//
// Lists accept commas and inclusive ranges: "1,2,10" or "0.5:2:0.5".

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "bilip/experiments.hpp"

namespace fs = std::filesystem;
using namespace bilip;

namespace {

std::vector<double> parse_list(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& joined : items) {
    std::size_t start = 0;
    while (start <= joined.size()) {
      const std::size_t comma = std::min(joined.find(',', start), joined.size());
      const std::string tok = joined.substr(start, comma - start);
      start = comma + 1;
      if (tok.empty()) continue;
      const auto c1 = tok.find(':');
      if (c1 == std::string::npos) {
        out.push_back(parse_double(tok));
        continue;
      }
      const auto c2 = tok.find(':', c1 + 1);
      if (c2 == std::string::npos) throw CLI::ValidationError("range needs a:b:step, got " + tok);
      const double a = parse_double(tok.substr(0, c1));
      const double b = parse_double(tok.substr(c1 + 1, c2 - c1 - 1));
      const double step = parse_double(tok.substr(c2 + 1));
      if (!(step > 0.0) || b < a) throw CLI::ValidationError("bad range " + tok);
      const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
      for (long long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::vector<std::string>& items) {
  std::vector<int> out;
  for (double v : parse_list(items)) {
    if (v != std::round(v)) throw CLI::ValidationError("expected integers, got " + format_double(v));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

struct Output {
  std::string dir = ".";
  std::string format = "both";

  bool csv() const { return format != "svg"; }
  bool svg() const { return format != "csv"; }

  std::string path(const std::string& name) const {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
  }

  void emit(const std::string& stem, const CsvTable& table, const SvgPlot& plot) const {
    if (csv()) write_csv_file(path(stem + ".csv"), table);
    if (svg()) write_svg_file(path(stem + ".svg"), plot);
  }
};

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("--out", out.dir, "Output directory")->capture_default_str();
  cmd->add_option("--format", out.format, "csv, svg or both")
      ->check(CLI::IsMember({"csv", "svg", "both"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds on the TV distance reachable by bi-Lipschitz normalizing flows"};
  app.set_config("--config", "", "Key-value config file (same keys as the flags)");
  app.require_subcommand(1);

  // fig3
  Output fig3_out;
  std::vector<std::string> fig3_dims, fig3_ratios;
  auto* fig3 = app.add_subcommand("fig3", "Gaussian measure of centered balls vs R/L2");
  fig3->add_option("--dims", fig3_dims, "Dimensions (default 1,2,10,784,3072,12288)");
  fig3->add_option("--ratios", fig3_ratios, "R/L2 grid (default 0 plus 200 log-spaced in [1e-2, 250])");
  add_output(fig3, fig3_out);

  // bounds-eval
  Output be_out;
  std::string be_theorem = "T2a", be_sweep;
  std::vector<std::string> be_mass, be_radius, be_vol, be_l1, be_l2, be_dist, be_sigma, be_dims, be_k;
  auto* be = app.add_subcommand("bounds-eval", "Evaluate a bound over a parameter grid");
  be->add_option("--theorem", be_theorem, "T1, T2a, T2b, T3, COR1, MIX or PREC")
      ->check(CLI::IsMember({"T1", "T2a", "T2b", "T3", "COR1", "MIX", "PREC"}))
      ->capture_default_str();
  be->add_option("--mass", be_mass, "Target mass of the witness set");
  be->add_option("--radius", be_radius, "Witness ball radius");
  be->add_option("--vol", be_vol, "Witness set volume (T1)");
  be->add_option("--l1", be_l1, "Forward Lipschitz constants");
  be->add_option("--l2", be_l2, "Inverse Lipschitz constants");
  be->add_option("--distance", be_dist, "Mode separation D (COR1, PREC)");
  be->add_option("--sigma-term", be_sigma, "Mixture sigma product (MIX)");
  be->add_option("--dims", be_dims, "Dimensions");
  be->add_option("--k", be_k, "Mixture component count (MIX)");
  be->add_option("--sweep", be_sweep, "Input column to sweep (default: last multi-valued)");
  add_output(be, be_out);

  // verify
  Output v_out;
  std::string v_scenario = "theorem2", v_objective = "tv";
  std::vector<std::string> v_targets, v_l1, v_l2;
  experiments::VerifyConfig vc;
  auto* verify = app.add_subcommand("verify", "Fit budgeted flows and compare measured TV with the bound");
  verify->add_option("--scenario", v_scenario, "theorem1, theorem2, theorem3 or corollary")
      ->check(CLI::IsMember({"theorem1", "theorem2", "theorem3", "corollary"}))
      ->capture_default_str();
  verify->add_option("--target", v_targets,
                     "Target preset (dense_spike:M,W  separated_bimodal:D,W  gaussian) or config file");
  verify->add_option("--l1", v_l1, "L1 budgets");
  verify->add_option("--l2", v_l2, "L2 budgets");
  verify->add_option("--knots", vc.knots, "Initial quantile knots")->capture_default_str();
  verify->add_option("--steps", vc.steps, "Descent steps")->capture_default_str();
  verify->add_option("--step-size", vc.step_size, "Initial step in log-slope units")->capture_default_str();
  verify->add_option("--objective", v_objective, "tv or nll")
      ->check(CLI::IsMember({"tv", "nll"}))
      ->capture_default_str();
  verify->add_option("--seed", vc.seed, "Seed")->capture_default_str();
  verify->add_option("--jobs", vc.jobs, "Worker threads")->capture_default_str();
  verify->add_option("--tolerance", vc.tolerance, "Allowed negative gap")->capture_default_str();
  add_output(verify, v_out);

  // fit1d
  Output f_out;
  experiments::Fit1dConfig fc;
  std::string f_objective = "tv";
  auto* fit = app.add_subcommand("fit1d", "Fit one budgeted piecewise-linear flow");
  fit->add_option("--target", fc.target, "Target preset or config file")->capture_default_str();
  fit->add_option("--l1", fc.fit.l1_max, "L1 budget")->capture_default_str();
  fit->add_option("--l2", fc.fit.l2_max, "L2 budget")->capture_default_str();
  fit->add_option("--knots", fc.fit.knots, "Initial quantile knots")->capture_default_str();
  fit->add_option("--steps", fc.fit.steps, "Descent steps")->capture_default_str();
  fit->add_option("--step-size", fc.fit.step_size, "Initial step in log-slope units")->capture_default_str();
  fit->add_option("--objective", f_objective, "tv or nll")
      ->check(CLI::IsMember({"tv", "nll"}))
      ->capture_default_str();
  fit->add_option("--seed", fc.fit.seed, "Seed")->capture_default_str();
  add_output(fit, f_out);

  // plot
  std::string p_in, p_kind = "fig3", p_out;
  auto* plot = app.add_subcommand("plot", "Render an SVG from a CSV produced by another command");
  plot->add_option("--in", p_in, "Input CSV")->required();
  plot->add_option("--kind", p_kind, "fig3, bounds, verify or density")
      ->check(CLI::IsMember({"fig3", "bounds", "verify", "density"}))
      ->capture_default_str();
  plot->add_option("--out", p_out, "Output SVG")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fig3) {
      const auto dims = fig3_dims.empty() ? experiments::default_fig3_dims() : parse_int_list(fig3_dims);
      const auto ratios = fig3_ratios.empty() ? experiments::default_fig3_ratios() : parse_list(fig3_ratios);
      const CsvTable table = experiments::run_fig3(dims, ratios);
      fig3_out.emit("fig3", table, experiments::fig3_plot(table));
    } else if (*be) {
      experiments::BoundsEvalConfig c;
      c.theorem = parse_theorem_id(be_theorem);
      c.sweep = be_sweep;
      if (!be_mass.empty()) c.mass = parse_list(be_mass);
      if (!be_radius.empty()) c.radius = parse_list(be_radius);
      if (!be_vol.empty()) c.vol = parse_list(be_vol);
      if (!be_l1.empty()) c.l1 = parse_list(be_l1);
      if (!be_l2.empty()) c.l2 = parse_list(be_l2);
      if (!be_dist.empty()) c.distance = parse_list(be_dist);
      if (!be_sigma.empty()) c.sigma_term = parse_list(be_sigma);
      if (!be_dims.empty()) c.dims = parse_int_list(be_dims);
      if (!be_k.empty()) c.k = parse_int_list(be_k);
      if (c.theorem == TheoremId::T2b && be_dims.empty()) c.dims = {2};
      const CsvTable table = experiments::run_bounds_eval(c);
      be_out.emit("bounds_" + be_theorem, table, experiments::bounds_eval_plot(table));
    } else if (*verify) {
      const auto defaults = experiments::default_verify_config(experiments::parse_scenario(v_scenario));
      vc.scenario = defaults.scenario;
      vc.targets = v_targets.empty() ? defaults.targets : v_targets;
      vc.l1 = v_l1.empty() ? defaults.l1 : parse_list(v_l1);
      vc.l2 = v_l2.empty() ? defaults.l2 : parse_list(v_l2);
      vc.objective = parse_fit_objective(v_objective);
      const auto result = experiments::run_verify(vc);
      v_out.emit("verify_" + v_scenario, result.table, experiments::verify_plot(result.table));
      if (!v_out.csv()) write_csv(std::cout, result.table);
      if (!result.sound) {
        std::cerr << "verify: measured TV fell below the bound by more than " << vc.tolerance << "\n";
        return 2;
      }
    } else if (*fit) {
      fc.fit.objective = parse_fit_objective(f_objective);
      const auto r = experiments::run_fit1d(fc);
      if (f_out.csv()) {
        write_csv_file(f_out.path("fit1d_summary.csv"), r.summary);
        write_csv_file(f_out.path("fit1d_density.csv"), r.densities);
        save_flow_csv(f_out.path("fit1d_flow.csv"), r.fit.flow);
      }
      if (f_out.svg()) {
        write_svg_file(f_out.path("fit1d_density.svg"),
                       experiments::density_plot(r.densities, r.summary.rows[0][0]));
      }
      write_csv(std::cout, r.summary);
    } else if (*plot) {
      const CsvTable table = read_csv_file(p_in);
      SvgPlot svg;
      if (p_kind == "fig3") svg = experiments::fig3_plot(table);
      else if (p_kind == "bounds") svg = experiments::bounds_eval_plot(table);
      else if (p_kind == "verify") svg = experiments::verify_plot(table);
      else svg = experiments::density_plot(table, fs::path(p_in).stem().string());
      write_svg_file(p_out, svg);
    }
  } catch (const std::exception& e) {
    std::cerr << "bilip: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
