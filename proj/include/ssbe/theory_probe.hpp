#pragma once

/// @file theory_probe.hpp
/// @brief Numerical probes of the two-layer ReLU^3/6 capacity theory: path
/// norms, Monte Carlo Rademacher estimates and a Barron-pair approximation
/// probe.
///
/// Coefficients are constant: A = I, b_hat = (1, ..., 1), c = 1.
///
/// Every neuron term is positively homogeneous of degree 3 in w, so for the
/// path-norm ball |theta|_P < Q
///
///   sup_theta (1/n) sum_i tau_i f(x_i, theta) = Q * max_{|u| = 1} |(1/n) sum_i tau_i phi(u, x_i)|.
///
/// The maximum over the unit sphere is found by random search followed by
/// projected gradient ascent, so the estimate approximates the Rademacher
/// complexity from below. It is compared against an upper bound.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "ssbe/geometry.hpp"

namespace ssbe {

struct TwoLayerParams {
  Eigen::VectorXd a;  // m
  Eigen::MatrixXd w;  // d x m

  TwoLayerParams(Eigen::VectorXd a, Eigen::MatrixXd w);
  int width() const { return static_cast<int>(a.size()); }
  int dim() const { return static_cast<int>(w.rows()); }
  /// Output sum_k a_k sigma(w_k . x), sigma = ReLU^3 / 6.
  double evaluate(const Eigen::VectorXd& x) const;
};

/// sum_k |a_k| |w_k|^3 with the Euclidean norm.
double path_norm(const TwoLayerParams& params);

enum class FunctionClass { F_Q, G_Q, DG_Q };

std::string to_string(FunctionClass c);
FunctionClass function_class_from_string(const std::string& name);

/// Upper bounds with M = 1: 4 M Q d^2 / sqrt(n) for F_Q, Q / (3 sqrt(n))
/// for G_Q, (M_tilde + 1) Q / sqrt(n) for DG_Q.
double rademacher_bound(FunctionClass c, double q, int n, int d);

/// Chart set used for G_Q / DG_Q samples: disk charts for d = 2, otherwise
/// the faces of the box [-h, h]^d with h = 1/sqrt(d), so |x| <= 1.
ChartSet probe_charts(int d);
/// sup |grad gamma| over the first probe chart.
double probe_m_tilde(int d);

struct RademacherEstimate {
  FunctionClass cls = FunctionClass::F_Q;
  double q = 0.0;
  int n = 0;
  int d = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
};

/// Mean over `trials` sign vectors of the approximate supremum. F_Q samples
/// lie in the unit ball; G_Q and DG_Q samples lie on the first probe chart
/// (DG_Q differentiates along its first parameter). Throws InvalidArgument
/// unless n, trials, restarts >= 1, d >= 2 and q >= 0.
RademacherEstimate empirical_rademacher(FunctionClass c, double q, int n, int d, int trials,
                                        int restarts, std::uint64_t seed);

/// Discrete distribution rho over (a, w) pairs in 2-D.
struct BarronAtom {
  double probability = 1.0;
  double a = 1.0;
  Eigen::Vector2d w = Eigen::Vector2d::Zero();
};

struct BarronPairSpec {
  std::vector<BarronAtom> atoms;
  /// Disk charts with kappa = sqrt(2)/2 when empty.
  ChartSet charts;

  /// Four-atom distribution used by the CLI and the acceptance checks.
  static BarronPairSpec example();
};

struct ApproximationResult {
  int m = 0;
  int repetitions = 0;
  double mean_risk = 0.0;
  double std_error = 0.0;
  /// E_rho a^2 |w|^6 for the given rho.
  double barron_norm_sq = 0.0;
  /// (12 M + 3 l d (M_tilde + 1)^2) / m * barron_norm_sq.
  double reference_bound = 0.0;
  double mean_path_norm = 0.0;
  /// Fraction of draws with path norm <= 2 * sqrt(barron_norm_sq).
  double path_norm_fraction = 0.0;
};

/// Draws theta = {a_k / m, w_k} with (a_k, w_k) i.i.d. from rho and averages
/// the risk over `repetitions` draws. The risk is the interior mean of
/// (f(x, theta) - f(x))^2 over n_mc points of the unit disk plus, per chart,
/// the mean of squared value and tangential-derivative mismatches over n_mc
/// chart parameters. Throws InvalidArgument for a zero-norm rho.
ApproximationResult approximation_probe(const BarronPairSpec& spec, int m, int n_mc,
                                        int repetitions, std::uint64_t seed);

}  // namespace ssbe
