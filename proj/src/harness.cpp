#include "ssbe/harness.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "ssbe/checkpoint.hpp"
#include "ssbe/errors.hpp"
#include "ssbe/optimizer.hpp"
#include "ssbe/sampling.hpp"

namespace ssbe {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

nlohmann::json loss_json(const LossReport& r) {
  return {{"total", r.total},
          {"residual", r.residual},
          {"boundary_value", r.boundary_value},
          {"boundary_tangential", r.boundary_tangential},
          {"initial", r.initial},
          {"boundary_time", r.boundary_time}};
}

void check_finite(const LossReport& rep, long step) {
  if (auto term = rep.non_finite_term()) throw NonFiniteLoss(step, *term);
}

MethodResult train(const ExperimentConfig& config, const PdeProblem& problem,
                   const ChartSet& charts, const SampleSet& samples, const TestGrid& grid,
                   LossMethod method, std::ostream* progress) {
  const Clock::time_point start = Clock::now();
  LossOptions opt;
  opt.method = method;
  opt.weights = effective_weights(config, charts);
  opt.full_parabolic = config.full_parabolic;
  opt.metric_weighting = config.metric_weighting;
  const LossAssembler loss(problem, charts, samples, opt);

  MethodResult res;
  res.method = method;
  res.params = init_params(config.param_seed, config.layer_sizes, config.activation);
  res.initial_errors = relative_errors(res.params, problem, grid);

  AdamState adam(res.params.size(), config.schedule);
  adam.beta1 = config.beta1;
  adam.beta2 = config.beta2;
  adam.epsilon = config.epsilon;

  auto record = [&](long step, const LossReport& rep) {
    res.log.push_back({step, rep, lr_at(config.schedule, step)});
    if (progress) {
      *progress << to_string(method) << " step " << step << " loss " << rep.total << " (res "
                << rep.residual << ", bdry " << rep.boundary_value << ", tan "
                << rep.boundary_tangential << ")\n";
    }
  };

  ParamGradient grad;
  const long total = config.schedule.total_steps;
  for (long step = 0; step < total; ++step) {
    const LossReport rep = loss.evaluate_with_gradient(res.params, grad);
    check_finite(rep, step);
    if (step % config.log_every == 0) record(step, rep);
    adam_step(adam, res.params, grad);
  }
  const LossReport last = loss.evaluate(res.params);
  check_finite(last, total);
  record(total, last);
  res.steps = total;
  res.final_errors = relative_errors(res.params, problem, grid);
  res.wall_seconds = seconds_since(start);
  return res;
}

}  // namespace

const MethodResult& RunReport::result(LossMethod m) const {
  for (const MethodResult& r : methods) {
    if (r.method == m) return r;
  }
  throw InvalidArgument("report has no results for method " + to_string(m));
}

LossWeights effective_weights(const ExperimentConfig& config, const ChartSet& charts) {
  LossWeights w = config.weights;
  if (config.weights_preset == "chart_sum") w.boundary_l2 *= static_cast<double>(charts.size());
  return w;
}

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const Clock::time_point start = Clock::now();
  const PdeProblem problem = make_problem(config.problem, config.problem_params);
  const ChartSet charts = make_charts(problem.domain);
  const SampleSet samples = make_samples(problem, charts, config.samples, config.sampling_seed);
  TestGrid grid;
  try {
    grid = make_grid(problem, config.eval_grid);
  } catch (const InvalidArgument& e) {
    throw ConfigError("eval.grid", e.what());
  }

  RunReport report;
  report.config = config;
  report.grid_spec = grid.spec;
  report.output_dir = config.resolved_output_dir();

  std::vector<LossMethod> methods;
  if (config.method != MethodSelection::SSBE) methods.push_back(LossMethod::PINN);
  if (config.method != MethodSelection::PINN) methods.push_back(LossMethod::SSBE);
  for (LossMethod m : methods) {
    report.methods.push_back(train(config, problem, charts, samples, grid, m, options.progress));
  }
  report.wall_seconds = seconds_since(start);

  if (options.write_files) {
    const std::filesystem::path dir(report.output_dir);
    std::filesystem::create_directories(dir);
    for (const MethodResult& r : report.methods) {
      const std::string tag = to_string(r.method);
      write_curves_csv(r, (dir / ("curves_" + tag + ".csv")).string());
      if (config.write_checkpoint) save_checkpoint(r.params, (dir / ("checkpoint_" + tag + ".bin")).string());
      if (config.pointwise_csv) {
        write_pointwise_csv(r.params, problem, grid, (dir / ("pointwise_" + tag + ".csv")).string());
      }
    }
    std::ofstream out(dir / "report.json");
    if (!out) throw Error("cannot write report in " + dir.string());
    out << report_to_json(report) << "\n";
  }
  return report;
}

std::string report_to_json(const RunReport& report) {
  nlohmann::json methods = nlohmann::json::object();
  for (const MethodResult& r : report.methods) {
    nlohmann::json log = nlohmann::json::array();
    for (const LogEntry& e : r.log) {
      log.push_back({{"step", e.step}, {"lr", e.lr}, {"loss", loss_json(e.loss)}});
    }
    methods[to_string(r.method)] = {
        {"steps", r.steps},
        {"initial_errors", {{"l2", r.initial_errors.l2}, {"h1", r.initial_errors.h1}}},
        {"final_errors", {{"l2", r.final_errors.l2}, {"h1", r.final_errors.h1}}},
        {"wall_seconds", r.wall_seconds},
        {"log", log},
    };
  }
  const nlohmann::json j = {
      {"config", nlohmann::json::parse(config_to_json(report.config))},
      {"seeds", {{"params", report.config.param_seed}, {"sampling", report.config.sampling_seed}}},
      {"step_budget", report.config.schedule.total_steps},
      {"eval_grid", report.grid_spec},
      {"wall_seconds", report.wall_seconds},
      {"methods", methods},
  };
  return j.dump(2);
}

void write_curves_csv(const MethodResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.precision(17);
  out << "step,loss_total,loss_residual,loss_bdry_value,loss_bdry_tangential,loss_initial,lr\n";
  for (const LogEntry& e : result.log) {
    out << e.step << "," << e.loss.total << "," << e.loss.residual << "," << e.loss.boundary_value
        << "," << e.loss.boundary_tangential << "," << e.loss.initial << "," << e.lr << "\n";
  }
}

}  // namespace ssbe
