#pragma once

/// @file optimizer.hpp
/// @brief Adam with a geometric learning-rate decay.

#include <Eigen/Dense>

#include "ssbe/diffnet.hpp"

namespace ssbe {

struct Schedule {
  double lr_start = 1e-3;
  double lr_end = 1e-6;
  long total_steps = 20000;

  bool operator==(const Schedule&) const = default;
};

/// lr_start * (lr_end / lr_start)^(step / total_steps), clamped to the endpoints.
double lr_at(const Schedule& schedule, long step);

struct AdamState {
  long step = 0;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Schedule schedule;

  AdamState() = default;
  AdamState(std::size_t n_params, const Schedule& schedule);
};

/// One bias-corrected Adam update in place. The k-th update (1-based) uses
/// lr_at(schedule, k - 1). Returns the learning rate used.
double adam_step(AdamState& state, NetworkParams& params, const ParamGradient& grad);

/// Same update on a raw parameter vector.
double adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad);

}  // namespace ssbe
