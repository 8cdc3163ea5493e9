#include "ssbe/sampling.hpp"

#include <cmath>
#include <numbers>

#include "ssbe/errors.hpp"
#include "ssbe/problems.hpp"
#include "ssbe/rng.hpp"

namespace ssbe {

namespace {

enum Stream : std::uint64_t {
  kInterior = 1,
  kCharts = 2,
  kInteriorTime = 3,
  kChartTime = 4,
  kInitial = 5,
  kTimeGrid = 6,
};

}  // namespace

std::size_t SampleSet::boundary_count() const {
  std::size_t n = 0;
  for (const auto& block : per_chart) n += static_cast<std::size_t>(block.cols());
  return n;
}

Eigen::MatrixXd sample_interior(const Domain& domain, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample count must be positive");
  Rng rng(seed);
  Eigen::MatrixXd pts(domain.dim, n);
  if (domain.kind == Domain::Kind::Disk2D) {
    for (int i = 0; i < n; ++i) {
      const double r = std::sqrt(rng.uniform01());
      const double theta = 2.0 * std::numbers::pi * rng.uniform01();
      pts(0, i) = r * std::cos(theta);
      pts(1, i) = r * std::sin(theta);
    }
  } else if (domain.kind == Domain::Kind::Box) {
    const double h = domain.half_width;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < domain.dim; ++j) pts(j, i) = rng.uniform(-h, h);
    }
  } else {
    throw InvalidArgument("unsupported domain kind");
  }
  return pts;
}

std::vector<Eigen::MatrixXd> sample_charts(const ChartSet& charts, int n_per_chart,
                                           std::uint64_t seed) {
  if (n_per_chart < 1) throw InvalidArgument("sample count must be positive");
  Rng rng(seed);
  std::vector<Eigen::MatrixXd> out;
  for (const Chart& c : charts.charts) {
    Eigen::MatrixXd block(c.dim() - 1, n_per_chart);
    for (int i = 0; i < n_per_chart; ++i) {
      for (Eigen::Index a = 0; a < block.rows(); ++a) block(a, i) = rng.uniform(-c.kappa, c.kappa);
    }
    out.push_back(std::move(block));
  }
  return out;
}

SampleSet make_samples(const PdeProblem& problem, const ChartSet& charts,
                       const SampleCounts& counts, std::uint64_t seed) {
  if (counts.n_interior < 1) throw InvalidArgument("n_interior must be positive");
  if (charts.size() == 0) throw InvalidArgument("no boundary charts");
  SampleSet s;
  s.seed = seed;
  const Eigen::MatrixXd spatial =
      sample_interior(problem.domain, counts.n_interior, Rng::derived(seed, kInterior).next_u64());
  s.per_chart = sample_charts(charts, counts.n_boundary_per_chart,
                              Rng::derived(seed, kCharts).next_u64());
  if (!problem.time_dependent) {
    s.interior = spatial;
    return s;
  }

  const double T = problem.horizon;
  const int d = problem.domain.dim;
  s.interior.resize(d + 1, counts.n_interior);
  s.interior.topRows(d) = spatial;
  Rng t_rng = Rng::derived(seed, kInteriorTime);
  for (int i = 0; i < counts.n_interior; ++i) s.interior(d, i) = t_rng.uniform(0.0, T);

  Rng ct_rng = Rng::derived(seed, kChartTime);
  for (const auto& block : s.per_chart) {
    Eigen::RowVectorXd times(block.cols());
    for (Eigen::Index i = 0; i < block.cols(); ++i) times(i) = ct_rng.uniform(0.0, T);
    s.per_chart_time.push_back(std::move(times));
  }
  if (counts.n_initial < 1) throw InvalidArgument("time-dependent problems need n_initial >= 1");
  s.initial = sample_interior(problem.domain, counts.n_initial,
                              Rng::derived(seed, kInitial).next_u64());
  Rng tg_rng = Rng::derived(seed, kTimeGrid);
  for (int j = 0; j < counts.n_time; ++j) s.time_values.push_back(tg_rng.uniform(0.0, T));
  return s;
}

}  // namespace ssbe
