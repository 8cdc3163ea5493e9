#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "ssbe/geometry.hpp"

namespace ssbe {

struct PdeProblem;

/// Training samples. Points are stored column-wise.
struct SampleSet {
  /// Interior points; for time-dependent problems these are space-time
  /// points (x, t) with t in (0, T).
  Eigen::MatrixXd interior;
  /// Per chart: chart parameters, (d-1) x n_r.
  std::vector<Eigen::MatrixXd> per_chart;
  /// Per chart (time-dependent only): one time per chart sample.
  std::vector<Eigen::RowVectorXd> per_chart_time;
  /// Spatial points of the initial slice (time-dependent only).
  Eigen::MatrixXd initial;
  /// Time grid for the product-form boundary terms (time-dependent only).
  std::vector<double> time_values;
  std::uint64_t seed = 0;

  std::size_t boundary_count() const;
};

struct SampleCounts {
  int n_interior = 1000;
  int n_boundary_per_chart = 50;
  int n_initial = 0;
  int n_time = 0;

  bool operator==(const SampleCounts&) const = default;
};

/// Uniform points in the open domain: the disk via r = sqrt(U1), theta =
/// 2 pi U2; boxes via independent uniforms.
Eigen::MatrixXd sample_interior(const Domain& domain, int n, std::uint64_t seed);

/// Uniform chart parameters on [-kappa, kappa]^(d-1), one block per chart.
std::vector<Eigen::MatrixXd> sample_charts(const ChartSet& charts, int n_per_chart,
                                           std::uint64_t seed);

/// Full sample set for a problem. Every component uses its own stream
/// derived from `seed`, so changing one count leaves the other draws intact.
SampleSet make_samples(const PdeProblem& problem, const ChartSet& charts,
                       const SampleCounts& counts, std::uint64_t seed);

}  // namespace ssbe
