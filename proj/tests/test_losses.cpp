#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "ssbe/errors.hpp"
#include "ssbe/losses.hpp"
#include "ssbe/problems.hpp"
#include "ssbe/sampling.hpp"
#include "support.hpp"

namespace ssbe {
namespace {

struct Fixture {
  PdeProblem problem;
  ChartSet charts;
  SampleSet samples;
};

Fixture setup(ProblemKind kind, SampleCounts counts, std::uint64_t seed = 1, int dim = 3) {
  ProblemParams params;
  params.dim = dim;
  Fixture s{make_problem(kind, params), {}, {}};
  s.charts = make_charts(s.problem.domain);
  s.samples = make_samples(s.problem, s.charts, counts, seed);
  return s;
}

SampleCounts small_counts(ProblemKind kind) {
  if (kind == ProblemKind::HeatSquare) return {24, 4, 8, 3};
  return {24, 4, 0, 0};
}

// Pointwise reference implementation of the (non-product) loss terms.
LossReport oracle(const NetworkParams& p, const Fixture& s, LossMethod method, const LossWeights& w) {
  const PdeProblem& prob = s.problem;
  const std::vector<bool> mask = prob.laplacian_mask();
  const int d = prob.spatial_dim();
  LossReport rep;
  const Eigen::MatrixXd& xi = s.samples.interior;
  for (Eigen::Index i = 0; i < xi.cols(); ++i) {
    const Eigen::VectorXd x = xi.col(i);
    const Jet j = forward_jet(p, x, mask);
    const std::optional<double> u_t =
        prob.time_dependent ? std::optional<double>(j.gradient(d)) : std::nullopt;
    const double r = apply_operator(prob, j, u_t, x) - prob.forcing(x);
    rep.residual += r * r / static_cast<double>(xi.cols());
  }
  const double l = static_cast<double>(s.charts.size());
  for (std::size_t c = 0; c < s.charts.size(); ++c) {
    const Chart& chart = s.charts[c];
    const Eigen::MatrixXd& params = s.samples.per_chart[c];
    const double n = static_cast<double>(params.cols());
    for (Eigen::Index i = 0; i < params.cols(); ++i) {
      const Eigen::VectorXd xp = params.col(i);
      const double t = prob.time_dependent ? s.samples.per_chart_time[c](i) : 0.0;
      const Eigen::VectorXd input = boundary_input(prob, chart, xp, t);
      const Jet j = forward_jet(p, input, mask);
      const double e = j.value - prob.boundary_g(input);
      rep.boundary_value += e * e / (n * l);
      if (method == LossMethod::SSBE) {
        const double m = chart.metric_weight ? metric_factor(chart, xp) : 1.0;
        for (int a = 0; a < d - 1; ++a) {
          const double diff = tangential_derivative(chart, xp, j.gradient, a) -
                              boundary_g_tangential(prob, chart, xp, t, a);
          rep.boundary_tangential += m * diff * diff / n;
        }
      }
    }
  }
  if (prob.time_dependent) {
    const Eigen::MatrixXd& x0 = s.samples.initial;
    for (Eigen::Index i = 0; i < x0.cols(); ++i) {
      Eigen::VectorXd input(d + 1);
      input << x0.col(i), 0.0;
      const double e = forward_jet(p, input, mask).value - prob.initial_nu(x0.col(i));
      rep.initial += e * e / static_cast<double>(x0.cols());
    }
  }
  rep.total = w.residual * rep.residual + w.initial * rep.initial + w.boundary_l2 * rep.boundary_value +
              w.boundary_h1 * rep.boundary_tangential;
  return rep;
}

LossAssembler assembler(const Fixture& s, LossMethod method, const LossWeights& w = {},
                        bool full_parabolic = false) {
  LossOptions o;
  o.method = method;
  o.weights = w;
  o.full_parabolic = full_parabolic;
  return LossAssembler(s.problem, s.charts, s.samples, o);
}

void expect_report_near(const LossReport& a, const LossReport& b, double tol) {
  const auto close = [tol](double x, double y) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(y)); };
  EXPECT_TRUE(close(a.residual, b.residual)) << a.residual << " vs " << b.residual;
  EXPECT_TRUE(close(a.boundary_value, b.boundary_value)) << a.boundary_value << " vs " << b.boundary_value;
  EXPECT_TRUE(close(a.boundary_tangential, b.boundary_tangential))
      << a.boundary_tangential << " vs " << b.boundary_tangential;
  EXPECT_TRUE(close(a.initial, b.initial)) << a.initial << " vs " << b.initial;
  EXPECT_TRUE(close(a.total, b.total)) << a.total << " vs " << b.total;
}

constexpr ProblemKind kAllKinds[] = {ProblemKind::PoissonDisk, ProblemKind::HeatSquare,
                                     ProblemKind::NonlinearElliptic, ProblemKind::HighDimPoisson};

TEST(Losses, ZeroNetworkPoissonDisk) {
  const Fixture s = setup(ProblemKind::PoissonDisk, {500, 50, 0, 0});
  const NetworkParams zero({2, 8, 8, 1}, Activation::Tanh);
  const LossReport pinn = pinn_loss(zero, s.problem, s.charts, s.samples);
  EXPECT_DOUBLE_EQ(pinn.residual, 16.0);
  EXPECT_EQ(pinn.boundary_value, 0.0);
  EXPECT_DOUBLE_EQ(pinn.total, 16.0);
  const LossReport ssbe = ssbe_loss(zero, s.problem, s.charts, s.samples);
  EXPECT_DOUBLE_EQ(ssbe.residual, 16.0);
  EXPECT_EQ(ssbe.boundary_tangential, 0.0);
  EXPECT_DOUBLE_EQ(ssbe.total, 16.0);
}

TEST(Losses, ExactSolutionJetsGiveZeroLoss) {
  for (ProblemKind kind : kAllKinds) {
    const Fixture s = setup(kind, kind == ProblemKind::HeatSquare ? SampleCounts{200, 20, 50, 5}
                                                                : SampleCounts{200, 20, 0, 0});
    const JetField exact = [&](const Eigen::VectorXd& x, const std::vector<bool>&) {
      return s.problem.exact(x);
    };
    for (LossMethod m : {LossMethod::PINN, LossMethod::SSBE}) {
      const LossReport r = assembler(s, m, {}, kind == ProblemKind::HeatSquare).evaluate(exact);
      EXPECT_LT(r.total, 1e-20) << to_string(kind) << " " << to_string(m);
    }
  }
}

TEST(Losses, MatchesPointwiseOracle) {
  for (ProblemKind kind : kAllKinds) {
    const Fixture s = setup(kind, kind == ProblemKind::HeatSquare ? SampleCounts{700, 30, 40, 0}
                                                                : SampleCounts{700, 30, 0, 0});
    const NetworkParams p =
        test::random_params(3, {s.problem.input_dim(), 12, 12, 1}, Activation::Tanh, 1.5);
    for (LossMethod m : {LossMethod::PINN, LossMethod::SSBE}) {
      const LossWeights w{0.7, 1.3, 2.0, 0.4};
      const LossReport got = assembler(s, m, w).evaluate(p);
      expect_report_near(got, oracle(p, s, m, w), 1e-12);
    }
  }
}

TEST(Losses, UnweightedMetricOverride) {
  const Fixture s = setup(ProblemKind::PoissonDisk, {50, 30, 0, 0});
  const NetworkParams p = test::random_params(4, {2, 10, 1}, Activation::Tanh, 1.5);
  LossOptions o;
  o.metric_weighting = false;
  const LossReport unweighted = LossAssembler(s.problem, s.charts, s.samples, o).evaluate(p);
  Fixture flat = s;
  for (Chart& c : flat.charts.charts) c.metric_weight = false;
  const LossReport expected = oracle(p, flat, LossMethod::SSBE, {});
  expect_report_near(unweighted, expected, 1e-12);
  const LossReport weighted = assembler(s, LossMethod::SSBE).evaluate(p);
  EXPECT_GT(weighted.boundary_tangential, unweighted.boundary_tangential);
}

TEST(Losses, PinnAndSsbeAgreeWithoutTangentialWeight) {
  for (ProblemKind kind : kAllKinds) {
    const Fixture s = setup(kind, kind == ProblemKind::HeatSquare ? SampleCounts{100, 20, 30, 0}
                                                                : SampleCounts{100, 20, 0, 0});
    const NetworkParams p =
        test::random_params(8, {s.problem.input_dim(), 10, 10, 1}, Activation::Tanh, 1.5);
    const LossWeights w{1.0, 1.0, 1.0, 0.0};
    const double pinn = assembler(s, LossMethod::PINN, w).evaluate(p).total;
    const double ssbe = assembler(s, LossMethod::SSBE, w).evaluate(p).total;
    EXPECT_NEAR(pinn, ssbe, 1e-12 * std::max(1.0, std::abs(pinn))) << to_string(kind);
  }
}

TEST(Losses, TermsAreNonnegative) {
  Rng rng(12);
  for (ProblemKind kind : kAllKinds) {
    const Fixture s = setup(kind, small_counts(kind), rng.next_u64());
    for (int trial = 0; trial < 5; ++trial) {
      const NetworkParams p = test::random_params(rng.next_u64(), {s.problem.input_dim(), 6, 1},
                                                  trial % 2 ? Activation::Relu3Sixth : Activation::Tanh, 2.0);
      const LossReport r = assembler(s, LossMethod::SSBE, {}, kind == ProblemKind::HeatSquare).evaluate(p);
      for (double v : {r.residual, r.boundary_value, r.boundary_tangential, r.initial, r.boundary_time, r.total})
        EXPECT_GE(v, 0.0);
    }
  }
}

// Central differences of the scalar loss over every parameter.
Eigen::VectorXd fd_loss_gradient(const LossAssembler& la, NetworkParams p) {
  return test::fd_param_gradient(p.data(), [&] { return la.evaluate(p).total; }, 1e-6);
}

TEST(LossGradient, MatchesFiniteDifferencesAllProblems) {
  for (ProblemKind kind : kAllKinds) {
    const Fixture s = setup(kind, small_counts(kind), 5);
    const NetworkParams p =
        test::random_params(6, {s.problem.input_dim(), 8, 1}, Activation::Tanh, 1.5);
    for (LossMethod m : {LossMethod::PINN, LossMethod::SSBE}) {
      const LossAssembler la = assembler(s, m, {1.0, 1.5, 0.5, 2.0});
      ParamGradient g;
      const LossReport rep = la.evaluate_with_gradient(p, g);
      EXPECT_DOUBLE_EQ(rep.total, la.evaluate(p).total);
      EXPECT_LT(test::rel_error(g.values, fd_loss_gradient(la, p)), 1e-5)
          << to_string(kind) << " " << to_string(m);
    }
  }
}

TEST(LossGradient, DiskExamplesWithSixteenSamples) {
  const Fixture s = setup(ProblemKind::PoissonDisk, {16, 4, 0, 0}, 2);
  const NetworkParams p = test::random_params(1, {2, 8, 1}, Activation::Tanh, 1.5);
  for (LossMethod m : {LossMethod::PINN, LossMethod::SSBE}) {
    const ParamGradient g = loss_gradient(p, s.problem, s.charts, s.samples, m);
    EXPECT_LT(test::rel_error(g.values, fd_loss_gradient(assembler(s, m), p)), 1e-5);
  }
}

TEST(LossGradient, ParabolicProductFormAndRelu) {
  const Fixture s = setup(ProblemKind::HeatSquare, {20, 4, 6, 3}, 9);
  for (Activation act : {Activation::Tanh, Activation::Relu3Sixth}) {
    const NetworkParams p = test::random_params(2, {3, 7, 7, 1}, act, act == Activation::Tanh ? 1.5 : 3.0);
    const LossAssembler la = assembler(s, LossMethod::SSBE, {}, true);
    ParamGradient g;
    const LossReport r = la.evaluate_with_gradient(p, g);
    EXPECT_GT(r.boundary_time, 0.0);
    EXPECT_LT(test::rel_error(g.values, fd_loss_gradient(la, p)), 1e-5);
  }
}

TEST(LossGradient, DeepNetworkOverManyTiles) {
  const Fixture s = setup(ProblemKind::NonlinearElliptic, {300, 6, 0, 0}, 4);
  const NetworkParams p = test::random_params(5, {2, 6, 6, 6, 1}, Activation::Tanh, 1.5);
  const LossAssembler la = assembler(s, LossMethod::SSBE);
  ParamGradient g;
  la.evaluate_with_gradient(p, g);
  EXPECT_LT(test::rel_error(g.values, fd_loss_gradient(la, p)), 1e-5);
}

TEST(LossGradient, ZeroAtAZeroLossConfiguration) {
  // A problem whose exact solution is the network itself.
  const NetworkParams net = test::random_params(13, {2, 9, 9, 1}, Activation::Tanh, 1.5);
  const std::vector<bool> mask{true, true};
  PdeProblem prob = make_problem(ProblemKind::PoissonDisk);
  prob.forcing = [&](const Eigen::VectorXd& x) { return -forward_jet(net, x, mask).laplacian; };
  prob.boundary_g = [&](const Eigen::VectorXd& x) { return forward_jet(net, x, mask).value; };
  prob.boundary_g_gradient = [&](const Eigen::VectorXd& x) { return forward_jet(net, x, mask).gradient; };
  const ChartSet charts = make_charts(prob.domain);
  const SampleSet samples = make_samples(prob, charts, {64, 16, 0, 0}, 3);
  for (LossMethod m : {LossMethod::PINN, LossMethod::SSBE}) {
    LossOptions o;
    o.method = m;
    ParamGradient g;
    const LossReport r = LossAssembler(prob, charts, samples, o).evaluate_with_gradient(net, g);
    EXPECT_LT(r.total, 1e-28);
    EXPECT_LT(g.values.norm(), 1e-13);
  }
}

TEST(Losses, BitIdenticalAcrossEvaluations) {
  const Fixture s = setup(ProblemKind::PoissonDisk, {1000, 50, 0, 0});
  const NetworkParams p = init_params(3, {2, 20, 20, 1}, Activation::Tanh);
  const LossAssembler a = assembler(s, LossMethod::SSBE);
  const LossAssembler b = assembler(s, LossMethod::SSBE);
  ParamGradient ga, gb;
  const double first = a.evaluate_with_gradient(p, ga).total;
  const double second = a.evaluate_with_gradient(p, ga).total;
  const double other = b.evaluate_with_gradient(p, gb).total;
  EXPECT_EQ(std::bit_cast<std::uint64_t>(first), std::bit_cast<std::uint64_t>(second));
  EXPECT_EQ(std::bit_cast<std::uint64_t>(first), std::bit_cast<std::uint64_t>(other));
  EXPECT_TRUE(ga.values == gb.values);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.evaluate(p).total), std::bit_cast<std::uint64_t>(first));
}

TEST(Losses, ChartSumPresetScalesBoundaryValue) {
  const Fixture s = setup(ProblemKind::PoissonDisk, {40, 10, 0, 0});
  const LossWeights w = LossWeights::chart_sum(s.charts);
  EXPECT_DOUBLE_EQ(w.boundary_l2, 4.0);
  EXPECT_DOUBLE_EQ(w.boundary_h1, 1.0);
  const NetworkParams p = test::random_params(2, {2, 6, 1}, Activation::Tanh);
  const LossReport r = assembler(s, LossMethod::SSBE, w).evaluate(p);
  EXPECT_NEAR(r.total, r.residual + 4.0 * r.boundary_value + r.boundary_tangential, 1e-14);
}

TEST(Losses, RejectsInvalidInputs) {
  Fixture s = setup(ProblemKind::PoissonDisk, {10, 4, 0, 0});
  Fixture empty = s;
  empty.samples.interior.resize(2, 0);
  EXPECT_THROW(assembler(empty, LossMethod::PINN), InvalidArgument);
  Fixture no_charts = s;
  no_charts.charts.charts.clear();
  no_charts.samples.per_chart.clear();
  EXPECT_THROW(assembler(no_charts, LossMethod::SSBE), InvalidArgument);
  const NetworkParams wrong = init_params(1, {3, 4, 1}, Activation::Tanh);
  EXPECT_THROW(assembler(s, LossMethod::SSBE).evaluate(wrong), DimensionMismatch);
  LossWeights negative;
  negative.residual = -1.0;
  EXPECT_THROW(negative.validate(), InvalidArgument);
}

TEST(Losses, NonFiniteTermIsReported) {
  LossReport r;
  EXPECT_FALSE(r.non_finite_term().has_value());
  r.boundary_tangential = std::nan("");
  ASSERT_TRUE(r.non_finite_term().has_value());
}

}  // namespace
}  // namespace ssbe
