#include "ssbe/problems.hpp"

#include <cmath>
#include <numbers>

#include "ssbe/errors.hpp"

namespace ssbe {

namespace {

using std::numbers::pi;

double int_pow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

PdeProblem poisson_disk() {
  PdeProblem p;
  p.kind = ProblemKind::PoissonDisk;
  p.name = "poisson_disk";
  p.domain = Domain::disk();
  p.op = {1.0, 0.0, 0.0, 1};
  p.forcing = [](const Eigen::VectorXd&) { return 4.0; };
  p.boundary_g = [](const Eigen::VectorXd&) { return 0.0; };
  p.boundary_g_gradient = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2); };
  p.exact = [](const Eigen::VectorXd& x) {
    Jet j;
    j.value = 1.0 - x.head(2).squaredNorm();
    j.gradient = -2.0 * x.head(2);
    j.laplacian = -4.0;
    return j;
  };
  return p;
}

PdeProblem heat_square() {
  PdeProblem p;
  p.kind = ProblemKind::HeatSquare;
  p.name = "heat_square";
  p.domain = Domain::box(2, 1.0);
  p.time_dependent = true;
  p.horizon = 1.0;
  p.op = {1.0, 0.0, 0.0, 1};
  p.forcing = [](const Eigen::VectorXd&) { return 0.0; };
  p.boundary_g = [](const Eigen::VectorXd&) { return 0.0; };
  p.boundary_g_gradient = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2); };
  p.time_derivative_g = [](const Eigen::VectorXd&) { return 0.0; };
  p.initial_nu = [](const Eigen::VectorXd& x) {
    return std::sin(pi * x(0)) * std::sin(pi * x(1));
  };
  p.exact = [](const Eigen::VectorXd& x) {
    const double sx = std::sin(pi * x(0)), cx = std::cos(pi * x(0));
    const double sy = std::sin(pi * x(1)), cy = std::cos(pi * x(1));
    const double decay = std::exp(-2.0 * pi * pi * x(2));
    Jet j;
    j.value = sx * sy * decay;
    j.gradient.resize(3);
    j.gradient << pi * cx * sy * decay, pi * sx * cy * decay, -2.0 * pi * pi * j.value;
    j.laplacian = -2.0 * pi * pi * j.value;
    return j;
  };
  return p;
}

PdeProblem nonlinear_elliptic(const OperatorCoefficients& c) {
  if (c.k_power < 1) throw InvalidArgument("k_power must be >= 1");
  PdeProblem p;
  p.kind = ProblemKind::NonlinearElliptic;
  p.name = "nonlinear_elliptic";
  p.domain = Domain::box(2, 1.0);
  p.op = c;
  // u = sin(pi x1) sin(pi x2) gives -alpha lap u = 2 alpha pi^2 u.
  p.forcing = [c](const Eigen::VectorXd& x) {
    const double u = std::sin(pi * x(0)) * std::sin(pi * x(1));
    return 2.0 * c.alpha * pi * pi * u + c.beta * u + c.gamma * int_pow(u, c.k_power);
  };
  p.boundary_g = [](const Eigen::VectorXd&) { return 0.0; };
  p.boundary_g_gradient = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2); };
  p.exact = [](const Eigen::VectorXd& x) {
    const double sx = std::sin(pi * x(0)), cx = std::cos(pi * x(0));
    const double sy = std::sin(pi * x(1)), cy = std::cos(pi * x(1));
    Jet j;
    j.value = sx * sy;
    j.gradient.resize(2);
    j.gradient << pi * cx * sy, pi * sx * cy;
    j.laplacian = -2.0 * pi * pi * j.value;
    return j;
  };
  return p;
}

PdeProblem high_dim_poisson(int d) {
  if (d < 2) throw InvalidArgument("high-dimensional Poisson needs d >= 2");
  PdeProblem p;
  p.kind = ProblemKind::HighDimPoisson;
  p.name = "high_dim_poisson";
  p.domain = Domain::box(d, 1.0);
  p.op = {1.0, 0.0, 0.0, 1};
  const double dd = d;
  p.forcing = [dd](const Eigen::VectorXd& x) {
    const double s = x.mean();
    return (std::sin(s) - 2.0) / dd;
  };
  p.boundary_g = [](const Eigen::VectorXd& x) {
    const double s = x.mean();
    return s * s + std::sin(s);
  };
  p.boundary_g_gradient = [d, dd](const Eigen::VectorXd& x) {
    const double s = x.head(d).sum() / dd;
    return Eigen::VectorXd::Constant(d, (2.0 * s + std::cos(s)) / dd);
  };
  p.exact = [d, dd](const Eigen::VectorXd& x) {
    const double s = x.head(d).sum() / dd;
    Jet j;
    j.value = s * s + std::sin(s);
    j.gradient = Eigen::VectorXd::Constant(d, (2.0 * s + std::cos(s)) / dd);
    j.laplacian = (2.0 - std::sin(s)) / dd;
    return j;
  };
  return p;
}

}  // namespace

std::vector<bool> PdeProblem::laplacian_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(input_dim()), true);
  if (time_dependent) mask.back() = false;
  return mask;
}

PdeProblem make_problem(ProblemKind kind, const ProblemParams& params) {
  switch (kind) {
    case ProblemKind::PoissonDisk:
      return poisson_disk();
    case ProblemKind::HeatSquare:
      return heat_square();
    case ProblemKind::NonlinearElliptic:
      return nonlinear_elliptic(params.coefficients);
    case ProblemKind::HighDimPoisson:
      return high_dim_poisson(params.dim);
  }
  throw InvalidArgument("unknown problem kind");
}

double apply_operator(const PdeProblem& problem, const Jet& jet, std::optional<double> u_t,
                      const Eigen::VectorXd& /*point*/) {
  if (problem.time_dependent != u_t.has_value()) {
    throw InvalidArgument(problem.time_dependent ? "time-dependent operator needs u_t"
                                                 : "u_t given for a stationary problem");
  }
  return operator_value(problem.op, jet.value, jet.laplacian, u_t.value_or(0.0));
}

double operator_value(const OperatorCoefficients& op, double u, double laplacian, double u_t) {
  double value = -op.alpha * laplacian + op.beta * u + u_t;
  if (op.gamma != 0.0) value += op.gamma * int_pow(u, op.k_power);
  return value;
}

double operator_value_du(const OperatorCoefficients& op, double u) {
  double d = op.beta;
  if (op.gamma != 0.0) d += op.gamma * op.k_power * int_pow(u, op.k_power - 1);
  return d;
}

Eigen::VectorXd boundary_input(const PdeProblem& problem, const Chart& chart,
                               const Eigen::VectorXd& xp, double time) {
  const Eigen::VectorXd x = chart_point(chart, xp);
  if (!problem.time_dependent) return x;
  Eigen::VectorXd xt(x.size() + 1);
  xt << x, time;
  return xt;
}

double boundary_g_tangential(const PdeProblem& problem, const Chart& chart,
                             const Eigen::VectorXd& xp, double time, int alpha) {
  const Eigen::VectorXd input = boundary_input(problem, chart, xp, time);
  return tangential_derivative(chart, xp, problem.boundary_g_gradient(input), alpha);
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::PoissonDisk:
      return "poisson_disk";
    case ProblemKind::HeatSquare:
      return "heat_square";
    case ProblemKind::NonlinearElliptic:
      return "nonlinear_elliptic";
    case ProblemKind::HighDimPoisson:
      return "high_dim_poisson";
  }
  return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  for (ProblemKind k : {ProblemKind::PoissonDisk, ProblemKind::HeatSquare,
                        ProblemKind::NonlinearElliptic, ProblemKind::HighDimPoisson}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown problem kind '" + name + "'");
}

}  // namespace ssbe
