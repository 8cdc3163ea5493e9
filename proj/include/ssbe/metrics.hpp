#pragma once

/// @file metrics.hpp
/// @brief Relative L2 / H1 errors on deterministic quadrature grids.

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "ssbe/diffnet.hpp"
#include "ssbe/losses.hpp"
#include "ssbe/problems.hpp"

namespace ssbe {

struct TestGrid {
  enum class Kind { Polar, Tensor, SpaceTime, MonteCarlo };
  Kind kind = Kind::Tensor;
  /// Network-input points, column-wise (space-time for the heat grid).
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;
  /// Canonical spec string, e.g. "polar:200x200".
  std::string spec;

  Eigen::Index size() const { return points.cols(); }
  double measure() const { return weights.sum(); }
};

/// Midpoint polar grid on the unit disk with weights r * dr * dtheta.
TestGrid polar_grid(int n_r, int n_theta);
/// Midpoint tensor grid on [-h, h]^d with n nodes per axis.
TestGrid tensor_grid(const Domain& domain, int n);
/// n_t midpoint times in (0, T) times an n x n midpoint grid on the box.
TestGrid space_time_grid(const Domain& domain, double horizon, int n_t, int n);
/// Uniform random points with equal weights |Omega| / n (times T when horizon > 0).
TestGrid monte_carlo_grid(const Domain& domain, int n, std::uint64_t seed, double horizon = 0.0);

/// Default grid per problem: polar 200x200 for the disk, spacetime 20x50 for
/// heat, tensor 200 for 2-D boxes, mc:20000:7 for boxes with d > 3
/// (tensor 32 for d = 3).
TestGrid default_grid(const PdeProblem& problem);

/// Parses "default", "polar:NRxNT", "tensor:N", "spacetime:NTxN" or
/// "mc:N[:SEED]". Throws InvalidArgument for malformed specs or a spec
/// that does not fit the problem's domain.
TestGrid make_grid(const PdeProblem& problem, const std::string& spec);

enum class Norm { L2, H1 };

struct RelativeErrors {
  double l2 = 0.0;
  double h1 = 0.0;
};

/// Both relative errors in one pass. H1 includes the L2 part and uses the
/// spatial gradient only. Throws InvalidArgument when the exact solution
/// has zero norm on the grid.
RelativeErrors relative_errors(const NetworkParams& params, const PdeProblem& problem,
                               const TestGrid& grid);
RelativeErrors relative_errors(const JetField& field, const PdeProblem& problem,
                               const TestGrid& grid);

double relative_error(const NetworkParams& params, const PdeProblem& problem,
                      const TestGrid& grid, Norm norm);
double relative_error(const JetField& field, const PdeProblem& problem, const TestGrid& grid,
                      Norm norm);

/// Writes coordinates, predicted, exact and absolute error per grid point.
void write_pointwise_csv(const NetworkParams& params, const PdeProblem& problem,
                         const TestGrid& grid, const std::string& path);

}  // namespace ssbe
