#pragma once

/// @file counterexample.hpp
/// @brief Harmonic perturbations v_i = (1/i) sin(i theta) r^i of the disk
/// Poisson problem -lap u = 4, u = 0 on the circle, u = 1 - r^2.
///
/// Adding v_i / |v_i|_{H1} to u leaves the residual at exactly zero and
/// shrinks the boundary mismatch like 1/i, while the H1 error stays fixed.

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "ssbe/diffnet.hpp"

namespace ssbe {

/// Jet of v_i at a Cartesian point. With z = x + iy, v_i = Im(z^i) / i and
/// grad v_i = (Im z^(i-1), Re z^(i-1)); the Laplacian is exactly 0.
Jet perturbation_jet(int i, const Eigen::Vector2d& point);

struct PerturbationNorms {
  int i = 0;
  double bdry_l2_sq = 0.0;  // pi / i^2
  double dom_l2_sq = 0.0;   // quadrature
  double grad_sq = 0.0;     // pi / i
  double h1_sq = 0.0;       // dom_l2_sq + grad_sq
};

/// Closed-form boundary and gradient norms; domain L2 norm by quadrature.
PerturbationNorms analytic_norms(int i);

/// Closed form of the domain L2 norm with the polar Jacobian: pi / ((2i + 2) i^2).
double domain_l2_sq_closed_form(int i);

/// Integral of f over the unit disk: 64-point Gauss-Legendre in r times
/// the composite trapezoid rule in theta.
double disk_integral(const std::function<double(double x, double y)>& f, int n_theta = 10000);

/// Integral of f over the unit circle by the composite trapezoid rule.
double circle_integral(const std::function<double(double x, double y)>& f, int n_theta = 10000);

/// Norms of v_i computed entirely by quadrature.
PerturbationNorms quadrature_norms(int i, int n_theta = 10000);

/// |1 - r^2|^2_{H1(disk)} by quadrature (= pi/3 + 2 pi).
double base_solution_h1_sq();

struct FailureRow {
  int i = 0;
  /// Interior residual part of the objective (exactly 0).
  double residual = 0.0;
  /// residual / |disk| + |u_i - g|^2_{L2(circle)} / |circle|.
  double pinn_objective = 0.0;
  /// |u_i - u|_{H1} / |u|_{H1}.
  double relative_h1_error = 0.0;
};

/// Rows for i = 1..i_max. Throws InvalidArgument when i_max < 1.
std::vector<FailureRow> failure_demo(int i_max);

}  // namespace ssbe
