#include "ssbe/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "ssbe/errors.hpp"

namespace ssbe {

double lr_at(const Schedule& s, long step) {
  if (step <= 0) return s.lr_start;
  if (step >= s.total_steps) return s.lr_end;
  const double frac = static_cast<double>(step) / static_cast<double>(s.total_steps);
  const double lr = s.lr_start * std::pow(s.lr_end / s.lr_start, frac);
  return std::clamp(lr, std::min(s.lr_start, s.lr_end), std::max(s.lr_start, s.lr_end));
}

AdamState::AdamState(std::size_t n_params, const Schedule& sched)
    : m(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params))),
      v(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_params))),
      schedule(sched) {}

double adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad) {
  if (params.size() != grad.size() || state.m.size() != grad.size() || state.v.size() != grad.size()) {
    throw DimensionMismatch("adam_step: parameter, gradient and moment lengths differ");
  }
  const double lr = lr_at(state.schedule, state.step);
  ++state.step;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  state.m = b1 * state.m + (1.0 - b1) * grad;
  state.v = b2 * state.v + (1.0 - b2) * grad.cwiseAbs2();
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.epsilon);
  return lr;
}

double adam_step(AdamState& state, NetworkParams& params, const ParamGradient& grad) {
  Eigen::Map<Eigen::VectorXd> theta(params.data().data(), static_cast<Eigen::Index>(params.size()));
  return adam_step(state, theta, grad.values);
}

}  // namespace ssbe
