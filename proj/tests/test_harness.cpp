#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ssbe/checkpoint.hpp"
#include "ssbe/errors.hpp"
#include "ssbe/harness.hpp"

namespace ssbe {
namespace {

namespace fs = std::filesystem;

ExperimentConfig small_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.layer_sizes = {2, 8, 8, 1};
  c.samples = {64, 8, 0, 0};
  c.schedule = {1e-3, 1e-4, 40};
  c.eval_grid = "polar:20x20";
  c.log_every = 10;
  c.output_dir = (fs::temp_directory_path() / ("ssbe_harness_" + name)).string();
  return c;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

TEST(Harness, BothMethodsShareSamplesAndInitialisation) {
  const RunReport r = run_experiment(small_config("share"), {.write_files = false});
  ASSERT_EQ(r.methods.size(), 2u);
  const MethodResult& pinn = r.result(LossMethod::PINN);
  const MethodResult& ssbe = r.result(LossMethod::SSBE);
  ASSERT_FALSE(pinn.log.empty());
  ASSERT_FALSE(ssbe.log.empty());
  // Same parameters and samples at step 0 give the same residual and value terms.
  EXPECT_TRUE(same_bits(pinn.log[0].loss.residual, ssbe.log[0].loss.residual));
  EXPECT_TRUE(same_bits(pinn.log[0].loss.boundary_value, ssbe.log[0].loss.boundary_value));
  EXPECT_TRUE(same_bits(pinn.initial_errors.h1, ssbe.initial_errors.h1));
  EXPECT_EQ(r.grid_spec, "polar:20x20");
}

TEST(Harness, LogsAtCadenceAndFinalStep) {
  ExperimentConfig c = small_config("cadence");
  c.schedule.total_steps = 35;
  c.method = MethodSelection::SSBE;
  const RunReport r = run_experiment(c, {.write_files = false});
  std::vector<long> steps;
  for (const LogEntry& e : r.methods.at(0).log) steps.push_back(e.step);
  EXPECT_EQ(steps, (std::vector<long>{0, 10, 20, 30, 35}));
  EXPECT_EQ(r.methods.at(0).steps, 35);
  EXPECT_DOUBLE_EQ(r.methods.at(0).log[0].lr, 1e-3);
}

TEST(Harness, TrainingReducesLoss) {
  ExperimentConfig c = small_config("reduce");
  c.schedule = {1e-2, 1e-3, 200};
  const RunReport r = run_experiment(c, {.write_files = false});
  for (const MethodResult& m : r.methods) {
    EXPECT_LT(m.log.back().loss.total, 0.1 * m.log.front().loss.total);
    EXPECT_LT(m.final_errors.h1, m.initial_errors.h1);
    EXPECT_GE(m.final_errors.l2, 0.0);
  }
}

TEST(Harness, ZeroStepsReportsInitialErrorsOnly) {
  ExperimentConfig c = small_config("zero");
  c.schedule.total_steps = 0;
  const RunReport r = run_experiment(c, {.write_files = false});
  for (const MethodResult& m : r.methods) {
    EXPECT_EQ(m.steps, 0);
    EXPECT_EQ(m.log.size(), 1u);
    EXPECT_EQ(m.final_errors.l2, m.initial_errors.l2);
    EXPECT_EQ(m.final_errors.h1, m.initial_errors.h1);
  }
}

TEST(Harness, DeterministicTrajectories) {
  ExperimentConfig c = small_config("det");
  c.log_every = 1;
  c.schedule.total_steps = 120;
  const RunReport a = run_experiment(c, {.write_files = false});
  const RunReport b = run_experiment(c, {.write_files = false});
  for (std::size_t m = 0; m < a.methods.size(); ++m) {
    const auto& la = a.methods[m].log;
    const auto& lb = b.methods[m].log;
    ASSERT_EQ(la.size(), lb.size());
    for (std::size_t k = 0; k < la.size(); ++k)
      EXPECT_TRUE(same_bits(la[k].loss.total, lb[k].loss.total)) << m << " " << k << " " << la[k].loss.total << " " << lb[k].loss.total;
    EXPECT_TRUE(a.methods[m].params == b.methods[m].params);
  }
}

TEST(Harness, WritesReportCurvesAndCheckpoints) {
  ExperimentConfig c = small_config("files");
  c.pointwise_csv = true;
  fs::remove_all(c.output_dir);
  const RunReport r = run_experiment(c);
  const fs::path dir(c.output_dir);
  ASSERT_TRUE(fs::exists(dir / "report.json"));
  std::ifstream report(dir / "report.json");
  const nlohmann::json j = nlohmann::json::parse(report);
  EXPECT_EQ(j.at("config").at("name"), "files");
  EXPECT_EQ(j.at("config").at("optimizer").at("total_steps"), 40);
  for (const char* tag : {"pinn", "ssbe"}) {
    std::ifstream curves(dir / (std::string("curves_") + tag + ".csv"));
    std::string header;
    std::getline(curves, header);
    EXPECT_EQ(header, "step,loss_total,loss_residual,loss_bdry_value,loss_bdry_tangential,loss_initial,lr");
    int rows = 0;
    for (std::string line; std::getline(curves, line);) ++rows;
    EXPECT_EQ(rows, 5);
    EXPECT_TRUE(fs::exists(dir / (std::string("pointwise_") + tag + ".csv")));
  }
  const NetworkParams saved = load_checkpoint((dir / "checkpoint_ssbe.bin").string());
  EXPECT_TRUE(saved == r.result(LossMethod::SSBE).params);
  fs::remove_all(dir);
}

TEST(Harness, HeatRunWithParabolicTerms) {
  ExperimentConfig c = small_config("heat");
  c.problem = ProblemKind::HeatSquare;
  c.layer_sizes = {3, 8, 1};
  c.samples = {64, 8, 16, 3};
  c.full_parabolic = true;
  c.eval_grid = "spacetime:4x10";
  const RunReport r = run_experiment(c, {.write_files = false});
  EXPECT_GT(r.result(LossMethod::SSBE).log[0].loss.boundary_time, 0.0);
  EXPECT_EQ(r.result(LossMethod::PINN).log[0].loss.boundary_time, 0.0);
}

TEST(Harness, InvalidConfigurationsAreRejected) {
  ExperimentConfig c = small_config("bad");
  c.layer_sizes = {3, 8, 1};
  EXPECT_THROW(run_experiment(c, {.write_files = false}), ConfigError);
  c = small_config("bad_grid");
  c.eval_grid = "tensor:10";
  try {
    run_experiment(c, {.write_files = false});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "eval.grid");
  }
}

TEST(Harness, DivergenceRaisesNonFiniteLoss) {
  ExperimentConfig c = small_config("diverge");
  c.schedule = {1e300, 1e300, 10};
  c.method = MethodSelection::PINN;
  try {
    run_experiment(c, {.write_files = false});
    FAIL() << "expected NonFiniteLoss";
  } catch (const NonFiniteLoss& e) {
    EXPECT_GE(e.step(), 1);
    EXPECT_FALSE(e.term().empty());
  }
}

TEST(Harness, ChartSumPresetWeights) {
  ExperimentConfig c = small_config("preset");
  c.weights_preset = "chart_sum";
  const ChartSet charts = make_charts(Domain::disk());
  EXPECT_DOUBLE_EQ(effective_weights(c, charts).boundary_l2, 4.0);
  c.weights_preset = "none";
  EXPECT_DOUBLE_EQ(effective_weights(c, charts).boundary_l2, 1.0);
}

}  // namespace
}  // namespace ssbe
