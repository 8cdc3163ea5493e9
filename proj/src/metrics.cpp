#include "ssbe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>

#include "ssbe/errors.hpp"
#include "ssbe/rng.hpp"
#include "ssbe/sampling.hpp"

namespace ssbe {

namespace {

constexpr Eigen::Index kChunk = 4096;

void require_positive(int n, const char* what) {
  if (n < 1) throw InvalidArgument(std::string(what) + " must be >= 1");
}

int parse_int(const std::string& text, const std::string& spec) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || value < 1 || value > 100000000) {
    throw InvalidArgument("malformed grid spec '" + spec + "'");
  }
  return static_cast<int>(value);
}

std::pair<int, int> parse_pair(const std::string& text, const std::string& spec) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw InvalidArgument("malformed grid spec '" + spec + "'");
  return {parse_int(text.substr(0, x), spec), parse_int(text.substr(x + 1), spec)};
}

/// Predicted values (row) and input gradients (input_dim x n) for a chunk.
using ChunkEvaluator = std::function<void(const Eigen::MatrixXd&, Eigen::RowVectorXd&, Eigen::MatrixXd&)>;

RelativeErrors accumulate(const ChunkEvaluator& eval, const PdeProblem& problem,
                          const TestGrid& grid) {
  if (grid.points.rows() != problem.input_dim()) {
    throw DimensionMismatch("test grid does not match the problem input dimension");
  }
  const int d = problem.spatial_dim();
  double e0 = 0.0, e1 = 0.0, n0 = 0.0, n1 = 0.0;
  Eigen::RowVectorXd value;
  Eigen::MatrixXd gradient;
  for (Eigen::Index start = 0; start < grid.size(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, grid.size() - start);
    const Eigen::MatrixXd pts = grid.points.middleCols(start, len);
    eval(pts, value, gradient);
    for (Eigen::Index i = 0; i < len; ++i) {
      const Jet ex = problem.exact(pts.col(i));
      const double w = grid.weights(start + i);
      const double dv = value(i) - ex.value;
      const double dg = (gradient.col(i).head(d) - ex.gradient.head(d)).squaredNorm();
      e0 += w * dv * dv;
      e1 += w * dg;
      n0 += w * ex.value * ex.value;
      n1 += w * ex.gradient.head(d).squaredNorm();
    }
  }
  if (!(n0 > 0.0)) throw InvalidArgument("exact solution has zero norm on the test grid");
  return {std::sqrt(e0 / n0), std::sqrt((e0 + e1) / (n0 + n1))};
}

ChunkEvaluator network_evaluator(const NetworkParams& params, const PdeProblem& problem) {
  if (params.input_dim() != problem.input_dim()) {
    throw DimensionMismatch("network input dimension does not match the problem");
  }
  const std::vector<bool> mask = problem.laplacian_mask();
  return [&params, mask](const Eigen::MatrixXd& pts, Eigen::RowVectorXd& value, Eigen::MatrixXd& gradient) {
    const ForwardTape tape = forward_batch(params, pts, mask, JetOrder::Gradient);
    value = tape.jets().value;
    gradient = tape.jets().gradient;
  };
}

ChunkEvaluator field_evaluator(const JetField& field, const PdeProblem& problem) {
  const std::vector<bool> mask = problem.laplacian_mask();
  return [&field, mask](const Eigen::MatrixXd& pts, Eigen::RowVectorXd& value, Eigen::MatrixXd& gradient) {
    value.resize(pts.cols());
    gradient.resize(pts.rows(), pts.cols());
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
      const Jet j = field(pts.col(i), mask);
      value(i) = j.value;
      gradient.col(i) = j.gradient;
    }
  };
}

}  // namespace

TestGrid polar_grid(int n_r, int n_theta) {
  require_positive(n_r, "n_r");
  require_positive(n_theta, "n_theta");
  TestGrid g;
  g.kind = TestGrid::Kind::Polar;
  g.spec = "polar:" + std::to_string(n_r) + "x" + std::to_string(n_theta);
  const double dr = 1.0 / n_r;
  const double dt = 2.0 * std::numbers::pi / n_theta;
  g.points.resize(2, static_cast<Eigen::Index>(n_r) * n_theta);
  g.weights.resize(g.points.cols());
  Eigen::Index k = 0;
  for (int i = 0; i < n_r; ++i) {
    const double r = (i + 0.5) * dr;
    for (int j = 0; j < n_theta; ++j, ++k) {
      const double t = (j + 0.5) * dt;
      g.points(0, k) = r * std::cos(t);
      g.points(1, k) = r * std::sin(t);
      g.weights(k) = r * dr * dt;
    }
  }
  return g;
}

TestGrid tensor_grid(const Domain& domain, int n) {
  require_positive(n, "n");
  if (domain.kind != Domain::Kind::Box) throw InvalidArgument("tensor grids need a box domain");
  const int d = domain.dim;
  const double h = domain.half_width;
  const double cell = 2.0 * h / n;
  Eigen::Index total = 1;
  for (int a = 0; a < d; ++a) {
    total *= n;
    if (total > 50'000'000) throw InvalidArgument("tensor grid too large; use a Monte Carlo grid");
  }
  TestGrid g;
  g.kind = TestGrid::Kind::Tensor;
  g.spec = "tensor:" + std::to_string(n);
  g.points.resize(d, total);
  g.weights = Eigen::VectorXd::Constant(total, std::pow(cell, d));
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (Eigen::Index k = 0; k < total; ++k) {
    for (int a = 0; a < d; ++a) g.points(a, k) = -h + (idx[static_cast<std::size_t>(a)] + 0.5) * cell;
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[static_cast<std::size_t>(a)] < n) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
  }
  return g;
}

TestGrid space_time_grid(const Domain& domain, double horizon, int n_t, int n) {
  require_positive(n_t, "n_t");
  if (!(horizon > 0.0)) throw InvalidArgument("space-time grids need a positive horizon");
  const TestGrid space = tensor_grid(domain, n);
  const int d = domain.dim;
  const double dt = horizon / n_t;
  TestGrid g;
  g.kind = TestGrid::Kind::SpaceTime;
  g.spec = "spacetime:" + std::to_string(n_t) + "x" + std::to_string(n);
  g.points.resize(d + 1, space.size() * n_t);
  g.weights.resize(g.points.cols());
  Eigen::Index k = 0;
  for (int s = 0; s < n_t; ++s) {
    const double t = (s + 0.5) * dt;
    for (Eigen::Index i = 0; i < space.size(); ++i, ++k) {
      g.points.col(k).head(d) = space.points.col(i);
      g.points(d, k) = t;
      g.weights(k) = space.weights(i) * dt;
    }
  }
  return g;
}

TestGrid monte_carlo_grid(const Domain& domain, int n, std::uint64_t seed, double horizon) {
  require_positive(n, "n");
  TestGrid g;
  g.kind = TestGrid::Kind::MonteCarlo;
  g.spec = "mc:" + std::to_string(n) + ":" + std::to_string(seed);
  const Eigen::MatrixXd space = sample_interior(domain, n, seed);
  double measure = domain.volume();
  if (horizon > 0.0) {
    Rng rng = Rng::derived(seed, 0x7e57);
    g.points.resize(domain.dim + 1, n);
    g.points.topRows(domain.dim) = space;
    for (int i = 0; i < n; ++i) g.points(domain.dim, i) = rng.uniform(0.0, horizon);
    measure *= horizon;
  } else {
    g.points = space;
  }
  g.weights = Eigen::VectorXd::Constant(n, measure / n);
  return g;
}

TestGrid default_grid(const PdeProblem& problem) {
  if (problem.domain.kind == Domain::Kind::Disk2D) return polar_grid(200, 200);
  if (problem.time_dependent) return space_time_grid(problem.domain, problem.horizon, 20, 50);
  if (problem.domain.dim == 2) return tensor_grid(problem.domain, 200);
  if (problem.domain.dim == 3) return tensor_grid(problem.domain, 32);
  return monte_carlo_grid(problem.domain, 20000, 7);
}

TestGrid make_grid(const PdeProblem& problem, const std::string& spec) {
  if (spec.empty() || spec == "default") return default_grid(problem);
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InvalidArgument("malformed grid spec '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  const bool disk = problem.domain.kind == Domain::Kind::Disk2D;
  if (kind == "polar") {
    if (!disk || problem.time_dependent) throw InvalidArgument("polar grids need the disk domain");
    const auto [nr, nt] = parse_pair(rest, spec);
    return polar_grid(nr, nt);
  }
  if (kind == "tensor") {
    if (disk || problem.time_dependent) throw InvalidArgument("tensor grids need a stationary box problem");
    return tensor_grid(problem.domain, parse_int(rest, spec));
  }
  if (kind == "spacetime") {
    if (!problem.time_dependent) throw InvalidArgument("space-time grids need a time-dependent problem");
    const auto [nt, n] = parse_pair(rest, spec);
    return space_time_grid(problem.domain, problem.horizon, nt, n);
  }
  if (kind == "mc") {
    const auto c2 = rest.find(':');
    const int n = parse_int(rest.substr(0, c2), spec);
    std::uint64_t seed = 7;
    if (c2 != std::string::npos) {
      const std::string s = rest.substr(c2 + 1);
      std::size_t used = 0;
      try {
        seed = std::stoull(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != s.size()) throw InvalidArgument("malformed grid spec '" + spec + "'");
    }
    return monte_carlo_grid(problem.domain, n, seed, problem.time_dependent ? problem.horizon : 0.0);
  }
  throw InvalidArgument("unknown grid kind '" + kind + "'");
}

RelativeErrors relative_errors(const NetworkParams& params, const PdeProblem& problem,
                               const TestGrid& grid) {
  return accumulate(network_evaluator(params, problem), problem, grid);
}

RelativeErrors relative_errors(const JetField& field, const PdeProblem& problem,
                               const TestGrid& grid) {
  return accumulate(field_evaluator(field, problem), problem, grid);
}

double relative_error(const NetworkParams& params, const PdeProblem& problem,
                      const TestGrid& grid, Norm norm) {
  const RelativeErrors e = relative_errors(params, problem, grid);
  return norm == Norm::L2 ? e.l2 : e.h1;
}

double relative_error(const JetField& field, const PdeProblem& problem, const TestGrid& grid,
                      Norm norm) {
  const RelativeErrors e = relative_errors(field, problem, grid);
  return norm == Norm::L2 ? e.l2 : e.h1;
}

void write_pointwise_csv(const NetworkParams& params, const PdeProblem& problem,
                         const TestGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  const int d = problem.spatial_dim();
  for (int a = 0; a < d; ++a) out << "x" << (a + 1) << ",";
  if (problem.time_dependent) out << "t,";
  out << "predicted,exact,abs_error\n";
  out.precision(17);
  const ChunkEvaluator eval = network_evaluator(params, problem);
  Eigen::RowVectorXd value;
  Eigen::MatrixXd gradient;
  for (Eigen::Index start = 0; start < grid.size(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, grid.size() - start);
    const Eigen::MatrixXd pts = grid.points.middleCols(start, len);
    eval(pts, value, gradient);
    for (Eigen::Index i = 0; i < len; ++i) {
      for (Eigen::Index a = 0; a < pts.rows(); ++a) out << pts(a, i) << ",";
      const double ex = problem.exact(pts.col(i)).value;
      out << value(i) << "," << ex << "," << std::abs(value(i) - ex) << "\n";
    }
  }
}

}  // namespace ssbe
