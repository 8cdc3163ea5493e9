#pragma once

/// @file config.hpp
/// @brief Experiment configuration and its JSON form.
///
/// Schema (every key optional; defaults shown in README):
///
///   {
///     "name": "poisson",
///     "problem": {"kind": "poisson_disk", "alpha": 1, "beta": 0, "gamma": 1, "k": 3, "dim": 10},
///     "method": "both",
///     "architecture": {"layer_sizes": [2, 30, 30, 30, 1], "activation": "tanh"},
///     "samples": {"n_interior": 2500, "n_boundary_per_chart": 50, "n_initial": 0, "n_time": 0},
///     "weights": {"residual": 1, "initial": 1, "boundary_l2": 1, "boundary_h1": 1, "preset": "none"},
///     "loss": {"full_parabolic": false, "metric_weighting": null},
///     "optimizer": {"total_steps": 20000, "lr_start": 1e-3, "lr_end": 1e-6,
///                   "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-8},
///     "seeds": {"params": 0, "sampling": 0},
///     "eval": {"grid": "default", "pointwise_csv": false},
///     "output": {"dir": "", "log_every": 100, "checkpoint": true}
///   }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssbe/diffnet.hpp"
#include "ssbe/losses.hpp"
#include "ssbe/optimizer.hpp"
#include "ssbe/problems.hpp"
#include "ssbe/sampling.hpp"

namespace ssbe {

enum class MethodSelection { PINN, SSBE, Both };

std::string to_string(MethodSelection m);
std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct ExperimentConfig {
  std::string name = "experiment";
  ProblemKind problem = ProblemKind::PoissonDisk;
  ProblemParams problem_params;
  MethodSelection method = MethodSelection::Both;
  std::vector<int> layer_sizes{2, 30, 30, 30, 1};
  Activation activation = Activation::Tanh;
  SampleCounts samples{2500, 50, 0, 0};
  LossWeights weights;
  /// "none" or "chart_sum" (boundary_l2 scaled by the chart count).
  std::string weights_preset = "none";
  bool full_parabolic = false;
  std::optional<bool> metric_weighting;
  Schedule schedule;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t param_seed = 0;
  std::uint64_t sampling_seed = 0;
  std::string eval_grid = "default";
  bool pointwise_csv = false;
  /// Empty: $SSBE_OUTPUT_ROOT/<name>, or runs/<name> when unset.
  std::string output_dir;
  int log_every = 100;
  bool write_checkpoint = true;

  bool operator==(const ExperimentConfig&) const = default;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Network input dimension implied by the problem.
  int input_dim() const;
  std::string resolved_output_dir() const;
};

/// Parses JSON text; throws ConfigError with the field path on failure.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
/// Reads and parses a file; a missing file raises ConfigError("", "file not found: ...").
ExperimentConfig load_config(const std::string& path);

}  // namespace ssbe
