#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "ssbe/checkpoint.hpp"
#include "ssbe/config.hpp"
#include "ssbe/counterexample.hpp"
#include "ssbe/errors.hpp"
#include "ssbe/harness.hpp"
#include "ssbe/metrics.hpp"
#include "ssbe/problems.hpp"
#include "ssbe/theory_probe.hpp"
#include "ssbe/verify.hpp"

namespace {

/// Output stream for --out, or stdout when the path is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ssbe::Error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int run_train(const std::string& config_path, const std::string& out_dir, bool quiet) {
  ssbe::ExperimentConfig config = ssbe::load_config(config_path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  ssbe::RunOptions opts;
  opts.progress = quiet ? nullptr : &std::cerr;
  const ssbe::RunReport report = ssbe::run_experiment(config, opts);
  std::cout << "method,rel_l2,rel_h1,steps,wall_seconds\n";
  for (const auto& r : report.methods) {
    std::cout << ssbe::to_string(r.method) << "," << r.final_errors.l2 << "," << r.final_errors.h1
              << "," << r.steps << "," << r.wall_seconds << "\n";
  }
  std::cerr << "wrote " << report.output_dir << "\n";
  return 0;
}

int run_counterexample(int imax, const std::string& out) {
  const auto rows = ssbe::failure_demo(imax);
  Output o(out);
  auto& s = o.stream();
  s.precision(17);
  s << "i,pinn_objective,relative_h1_error\n";
  for (const auto& r : rows) s << r.i << "," << r.pinn_objective << "," << r.relative_h1_error << "\n";
  return 0;
}

int run_rademacher(const std::string& cls, double q, const std::vector<int>& ns, int d, int trials,
                   int restarts, std::uint64_t seed, const std::string& out) {
  const ssbe::FunctionClass c = ssbe::function_class_from_string(cls);
  Output o(out);
  auto& s = o.stream();
  s.precision(10);
  s << "n,estimate,std_error,bound\n";
  for (int n : ns) {
    const auto e = ssbe::empirical_rademacher(c, q, n, d, trials, restarts, seed);
    s << n << "," << e.estimate << "," << e.std_error << "," << e.bound << "\n";
  }
  return 0;
}

int run_approx(const std::vector<int>& ms, int n_mc, int reps, std::uint64_t seed, const std::string& out) {
  const ssbe::BarronPairSpec spec = ssbe::BarronPairSpec::example();
  Output o(out);
  auto& s = o.stream();
  s.precision(10);
  s << "m,mean_risk,std_error,reference_bound,mean_path_norm,path_norm_fraction\n";
  for (int m : ms) {
    const auto r = ssbe::approximation_probe(spec, m, n_mc, reps, seed);
    s << m << "," << r.mean_risk << "," << r.std_error << "," << r.reference_bound << ","
      << r.mean_path_norm << "," << r.path_norm_fraction << "\n";
  }
  return 0;
}

int run_verify(std::uint64_t seed, int nets) {
  const ssbe::AutodiffCheck c = ssbe::verify_autodiff(seed, nets);
  const bool ok = c.max_jet_error < 1e-6 && c.max_param_error < 1e-5;
  std::cout << "nets " << c.nets << "\nmax_jet_rel_error " << c.max_jet_error
            << "\nmax_param_rel_error " << c.max_param_error << "\n"
            << (ok ? "OK" : "FAILED") << "\n";
  return ok ? 0 : 1;
}

int run_eval(const std::string& checkpoint, const std::string& kind, int dim, double alpha,
             double beta, double gamma, int k, const std::string& grid_spec) {
  const ssbe::NetworkParams params = ssbe::load_checkpoint(checkpoint);
  ssbe::ProblemParams pp;
  pp.dim = dim;
  pp.coefficients = {alpha, beta, gamma, k};
  const ssbe::PdeProblem problem = ssbe::make_problem(ssbe::problem_kind_from_string(kind), pp);
  const ssbe::TestGrid grid = ssbe::make_grid(problem, grid_spec);
  const ssbe::RelativeErrors e = ssbe::relative_errors(params, problem, grid);
  std::cout << "grid " << grid.spec << "\nrel_l2 " << e.l2 << "\nrel_h1 " << e.h1 << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SSBE / PINN solver toolkit"};
  app.require_subcommand(1);

  std::string config_path, train_out;
  bool quiet = false;
  auto* train = app.add_subcommand("train", "Train PINN and/or SSBE networks from a JSON config");
  train->add_option("--config", config_path, "Experiment config (JSON)")->required();
  train->add_option("--out", train_out, "Output directory (overrides the config)");
  train->add_flag("--quiet", quiet, "Suppress progress lines");

  int imax = 20;
  std::string ce_out;
  auto* ce = app.add_subcommand("counterexample", "Tabulate the harmonic-perturbation failure sequence");
  ce->add_option("--imax", imax, "Largest perturbation index")->check(CLI::PositiveNumber);
  ce->add_option("--out", ce_out, "CSV path (stdout when omitted)");

  std::string cls = "F_Q", rad_out;
  double q = 1.0;
  std::vector<int> ns{64, 256, 1024, 4096};
  int d = 2, trials = 100, restarts = 16;
  std::uint64_t rad_seed = 0;
  auto* rad = app.add_subcommand("rademacher", "Monte Carlo Rademacher estimates against their bounds");
  rad->add_option("--class", cls, "F_Q, G_Q or DG_Q");
  rad->add_option("--q", q, "Path-norm radius Q")->check(CLI::NonNegativeNumber);
  rad->add_option("--n-list", ns, "Sample sizes")->delimiter(',');
  rad->add_option("--d", d, "Input dimension");
  rad->add_option("--trials", trials, "Sign vectors per estimate");
  rad->add_option("--restarts", restarts, "Ascent restarts per sign vector");
  rad->add_option("--seed", rad_seed, "Seed");
  rad->add_option("--out", rad_out, "CSV path (stdout when omitted)");

  std::vector<int> ms{8, 32, 128};
  int n_mc = 2000, reps = 200;
  std::uint64_t ap_seed = 0;
  std::string ap_out;
  auto* ap = app.add_subcommand("approx-probe", "Barron-pair approximation risk versus width");
  ap->add_option("--m-list", ms, "Widths")->delimiter(',');
  ap->add_option("--n-mc", n_mc, "Monte Carlo points per region");
  ap->add_option("--reps", reps, "Independent parameter draws per width");
  ap->add_option("--seed", ap_seed, "Seed");
  ap->add_option("--out", ap_out, "CSV path (stdout when omitted)");

  std::uint64_t va_seed = 0;
  int nets = 50;
  auto* va = app.add_subcommand("verify-autodiff", "Check jets and parameter gradients by finite differences");
  va->add_option("--seed", va_seed, "Seed");
  va->add_option("--nets", nets, "Number of random networks");

  std::string ckpt, kind = "poisson_disk", grid = "default";
  int dim = 10, k = 3;
  double alpha = 1.0, beta = 0.0, gamma = 1.0;
  auto* ev = app.add_subcommand("eval", "Relative errors of a checkpoint");
  ev->add_option("--checkpoint", ckpt, "Checkpoint file")->required();
  ev->add_option("--problem", kind, "poisson_disk, heat_square, nonlinear_elliptic or high_dim_poisson");
  ev->add_option("--grid", grid, "Grid spec: default, polar:NRxNT, tensor:N, spacetime:NTxN, mc:N[:SEED]");
  ev->add_option("--dim", dim, "Dimension for high_dim_poisson");
  ev->add_option("--alpha", alpha, "Diffusion coefficient");
  ev->add_option("--beta", beta, "Linear reaction coefficient");
  ev->add_option("--gamma", gamma, "Nonlinear reaction coefficient");
  ev->add_option("--k", k, "Nonlinear power");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(config_path, train_out, quiet);
    if (*ce) return run_counterexample(imax, ce_out);
    if (*rad) return run_rademacher(cls, q, ns, d, trials, restarts, rad_seed, rad_out);
    if (*ap) return run_approx(ms, n_mc, reps, ap_seed, ap_out);
    if (*va) return run_verify(va_seed, nets);
    if (*ev) return run_eval(ckpt, kind, dim, alpha, beta, gamma, k, grid);
  } catch (const ssbe::NonFiniteLoss& e) {
    std::cerr << "error: training diverged: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
