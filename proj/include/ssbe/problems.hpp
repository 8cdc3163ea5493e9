#pragma once

/// @file problems.hpp
/// @brief Benchmark problems with closed-form solutions.
///
/// The operator is L u = (u_t) - alpha * lap(u) + beta * u + gamma * u^k with
/// constant coefficients. Exact solutions are hand-coded jets, independent of
/// the network engine, so they can serve as oracles.

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ssbe/diffnet.hpp"
#include "ssbe/geometry.hpp"

namespace ssbe {

enum class ProblemKind { PoissonDisk, HeatSquare, NonlinearElliptic, HighDimPoisson };

struct OperatorCoefficients {
  double alpha = 1.0;  // diffusion
  double beta = 0.0;   // linear reaction
  double gamma = 0.0;  // nonlinear reaction
  int k_power = 1;

  bool operator==(const OperatorCoefficients&) const = default;
};

/// Factory parameters; `coefficients` only matter for NonlinearElliptic and
/// `dim` only for HighDimPoisson.
struct ProblemParams {
  OperatorCoefficients coefficients{1.0, 0.0, 1.0, 3};
  int dim = 10;

  bool operator==(const ProblemParams&) const = default;
};

/// (alpha, beta, gamma, k) settings of the nonlinear benchmark.
inline constexpr std::array<OperatorCoefficients, 5> kNonlinearBenchmarkRows{{
    {1.0, 0.0, 1.0, 3},
    {1.0, 0.0, 1.0, 5},
    {1.0, 1.0, 1.0, 3},
    {1.0, 5.0, 5.0, 3},
    {0.1, 5.0, 5.0, 3},
}};

/// Scalar field on the network input space (space, or space-time with time last).
using ScalarField = std::function<double(const Eigen::VectorXd&)>;

struct PdeProblem {
  ProblemKind kind = ProblemKind::PoissonDisk;
  std::string name;
  Domain domain;
  bool time_dependent = false;
  double horizon = 0.0;
  OperatorCoefficients op;

  ScalarField forcing;
  /// Dirichlet data g on the boundary (space-time input when time-dependent).
  ScalarField boundary_g;
  /// Spatial gradient of a smooth extension of g; its tangential components
  /// are the exact tangential derivatives of the trace.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> boundary_g_gradient;
  /// g_t on the lateral boundary (time-dependent only).
  ScalarField time_derivative_g;
  /// Initial data on spatial points (time-dependent only).
  ScalarField initial_nu;
  /// Exact solution jet: value, gradient over all inputs, spatial Laplacian.
  std::function<Jet(const Eigen::VectorXd&)> exact;

  int spatial_dim() const { return domain.dim; }
  int input_dim() const { return domain.dim + (time_dependent ? 1 : 0); }
  /// Laplacian mask over network inputs: spatial coordinates only.
  std::vector<bool> laplacian_mask() const;
};

PdeProblem make_problem(ProblemKind kind, const ProblemParams& params = {});

/// -alpha * laplacian + beta * u + gamma * u^k + u_t.
double operator_value(const OperatorCoefficients& op, double u, double laplacian, double u_t = 0.0);
/// d(operator_value)/du.
double operator_value_du(const OperatorCoefficients& op, double u);

/// L-value of a jet: (u_t) - alpha * laplacian + beta * value + gamma * value^k.
/// Throws InvalidArgument when u_t presence does not match the problem.
double apply_operator(const PdeProblem& problem, const Jet& jet, std::optional<double> u_t,
                      const Eigen::VectorXd& point);

/// D_{x'_alpha}[g o chart] from the problem's closed-form boundary gradient.
/// `time` is appended to the chart point for time-dependent problems.
double boundary_g_tangential(const PdeProblem& problem, const Chart& chart,
                             const Eigen::VectorXd& xp, double time, int alpha);

/// Network-input point for chart parameter xp (and time, if any).
Eigen::VectorXd boundary_input(const PdeProblem& problem, const Chart& chart,
                               const Eigen::VectorXd& xp, double time);

std::string to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

}  // namespace ssbe
