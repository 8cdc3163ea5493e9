#pragma once

/// @file harness.hpp
/// @brief Training runs: shared samples, full-batch Adam, logging, reports.

#include <iosfwd>
#include <string>
#include <vector>

#include "ssbe/config.hpp"
#include "ssbe/diffnet.hpp"
#include "ssbe/losses.hpp"
#include "ssbe/metrics.hpp"

namespace ssbe {

struct LogEntry {
  long step = 0;
  LossReport loss;
  double lr = 0.0;
};

struct MethodResult {
  LossMethod method = LossMethod::SSBE;
  std::vector<LogEntry> log;
  RelativeErrors initial_errors;
  RelativeErrors final_errors;
  long steps = 0;
  double wall_seconds = 0.0;
  NetworkParams params{{1, 1}, Activation::Tanh};
};

struct RunReport {
  ExperimentConfig config;
  std::string grid_spec;
  std::string output_dir;
  std::vector<MethodResult> methods;
  double wall_seconds = 0.0;

  const MethodResult& result(LossMethod m) const;
};

struct RunOptions {
  /// Write report.json, curves and checkpoints under the output directory.
  bool write_files = true;
  /// Progress lines every log_every steps; null for silence.
  std::ostream* progress = nullptr;
};

/// Loss weights after applying the config preset.
LossWeights effective_weights(const ExperimentConfig& config, const ChartSet& charts);

/// Validates the config, samples once, trains every selected method from the
/// same initial parameters on the same samples and evaluates the final
/// errors on a fresh grid. Throws ConfigError or NonFiniteLoss.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string report_to_json(const RunReport& report);
/// Columns: step, loss_total, loss_residual, loss_bdry_value,
/// loss_bdry_tangential, loss_initial, lr.
void write_curves_csv(const MethodResult& result, const std::string& path);

}  // namespace ssbe
