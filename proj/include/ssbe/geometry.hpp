#pragma once

/// @file geometry.hpp
/// @brief Boundary charts: each boundary patch is the graph of a height
/// function over a (d-1)-dimensional parameter box, seen in a rotated and
/// shifted coordinate frame.
///
/// In the chart frame X_r = frame * X + offset, the patch is
/// { (x', gamma(x')) : |x'|_inf <= kappa }. Traces and their tangential
/// derivatives are taken with respect to x'.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ssbe {

/// Computational domain. Disk2D is the unit disk; Box is [-h, h]^d.
struct Domain {
  enum class Kind { Disk2D, Box };
  Kind kind = Kind::Disk2D;
  int dim = 2;
  double half_width = 1.0;

  static Domain disk() { return {Kind::Disk2D, 2, 1.0}; }
  static Domain box(int dim, double half_width) { return {Kind::Box, dim, half_width}; }

  double volume() const;
  double boundary_measure() const;
  bool contains(const Eigen::VectorXd& x) const;  // open domain

  bool operator==(const Domain&) const = default;
};

struct Chart {
  std::string name;
  Eigen::MatrixXd frame;   // d x d, orthogonal, det +1
  Eigen::VectorXd offset;  // d
  std::function<double(const Eigen::VectorXd&)> gamma;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gamma_gradient;
  double kappa = 1.0;
  bool metric_weight = false;

  int dim() const { return static_cast<int>(frame.rows()); }
};

struct ChartSet {
  std::vector<Chart> charts;
  /// Set when coverage of the boundary has been checked by sampling.
  bool covers_boundary = false;

  std::size_t size() const { return charts.size(); }
  const Chart& operator[](std::size_t r) const { return charts[r]; }
};

/// Ambient point whose chart-frame coordinates are (xp, gamma(xp)).
/// Throws OutOfChart when |xp|_inf > kappa.
Eigen::VectorXd chart_point(const Chart& chart, const Eigen::VectorXd& xp);

/// d(chart_point)/d(x'_alpha), alpha in [0, d-1).
Eigen::VectorXd chart_tangent(const Chart& chart, const Eigen::VectorXd& xp, int alpha);

/// sqrt(1 + |grad gamma|^2).
double metric_factor(const Chart& chart, const Eigen::VectorXd& xp);

/// Tangential derivative D_{x'_alpha}[v o chart] at xp, given the ambient
/// gradient of v at chart_point(chart, xp). Extra trailing gradient entries
/// (e.g. a time component) are ignored. alpha is zero-based.
double tangential_derivative(const Chart& chart, const Eigen::VectorXd& xp,
                             const Eigen::VectorXd& ambient_gradient, int alpha);

/// Inverse of chart_point: the chart parameter of an ambient point, if the
/// point lies on this chart's patch within `tol`.
std::optional<Eigen::VectorXd> chart_parameter(const Chart& chart, const Eigen::VectorXd& point,
                                               double tol = 1e-9);

/// Built-in chart sets: 4 graph charts for the disk, 2d flat faces for a box
/// (ordered x_1 = -h, x_1 = +h, x_2 = -h, ...).
ChartSet make_charts(const Domain& domain);

/// Disk charts with an arbitrary parameter radius (overlapping when > sqrt(2)/2).
ChartSet make_disk_charts(double kappa, bool metric_weight = true);

/// Fraction of `n` deterministic boundary probes lying on some chart.
double boundary_coverage(const Domain& domain, const ChartSet& charts, int n, double tol = 1e-9);

}  // namespace ssbe
