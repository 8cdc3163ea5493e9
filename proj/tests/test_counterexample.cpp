#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ssbe/counterexample.hpp"
#include "ssbe/errors.hpp"
#include "support.hpp"

namespace ssbe {
namespace {

using std::numbers::pi;

// Polar form (1/i) sin(i theta) r^i, independent of the complex-power closed form.
double v_polar(int i, double x, double y) {
  const double r = std::hypot(x, y);
  return std::sin(i * std::atan2(y, x)) * std::pow(r, i) / i;
}

TEST(PerturbationJet, Examples) {
  const Jet a = perturbation_jet(2, Eigen::Vector2d(1.0, 0.0));
  EXPECT_NEAR(a.value, 0.0, 1e-15);
  const Jet b = perturbation_jet(1, Eigen::Vector2d(0.0, 1.0));
  EXPECT_NEAR(b.value, 1.0, 1e-15);
  EXPECT_NEAR(b.gradient(0), 0.0, 1e-15);
  EXPECT_NEAR(b.gradient(1), 1.0, 1e-15);
  for (int i = 1; i <= 12; ++i) EXPECT_EQ(perturbation_jet(i, Eigen::Vector2d(0.3, -0.2)).laplacian, 0.0);
  for (int i = 2; i <= 5; ++i) EXPECT_EQ(perturbation_jet(i, Eigen::Vector2d::Zero()).gradient.norm(), 0.0);
}

TEST(PerturbationJet, AgreesWithPolarFormAndDifferences) {
  Rng rng(3);
  for (int i : {1, 3, 7, 12}) {
    for (int k = 0; k < 10; ++k) {
      const double r = std::sqrt(rng.uniform01()), t = 2.0 * pi * rng.uniform01();
      const Eigen::Vector2d x(r * std::cos(t), r * std::sin(t));
      const Jet j = perturbation_jet(i, x);
      EXPECT_NEAR(j.value, v_polar(i, x(0), x(1)), 1e-14);
      const auto f = [i](const Eigen::VectorXd& y) { return v_polar(i, y(0), y(1)); };
      EXPECT_LT((test::fd_gradient(f, x, 1e-5) - j.gradient).norm(), 1e-7);
    }
  }
}

TEST(PerturbationJet, HarmonicByDifferences) {
  for (int i = 1; i <= 10; ++i) {
    const double h = 1e-5;
    const double lap_abs = disk_integral(
        [i, h](double x, double y) {
          const Eigen::Vector2d p(x, y);
          const double dxx = (perturbation_jet(i, p + Eigen::Vector2d(h, 0)).gradient(0) -
                              perturbation_jet(i, p - Eigen::Vector2d(h, 0)).gradient(0)) / (2 * h);
          const double dyy = (perturbation_jet(i, p + Eigen::Vector2d(0, h)).gradient(1) -
                              perturbation_jet(i, p - Eigen::Vector2d(0, h)).gradient(1)) / (2 * h);
          return std::abs(dxx + dyy);
        },
        400);
    EXPECT_LT(lap_abs, 1e-5) << "i = " << i;
  }
}

TEST(Norms, AnalyticValues) {
  EXPECT_DOUBLE_EQ(analytic_norms(1).bdry_l2_sq, pi);
  EXPECT_DOUBLE_EQ(analytic_norms(4).grad_sq, pi / 4.0);
  EXPECT_DOUBLE_EQ(analytic_norms(3).bdry_l2_sq, pi / 9.0);
}

TEST(Norms, DomainNormAgainstIndependentQuadrature) {
  // Tensor midpoint rule in (r, theta) with the r Jacobian.
  const int n = 2000;
  double sum = 0.0;
  for (int a = 0; a < n; ++a) {
    const double r = (a + 0.5) / n;
    for (int b = 0; b < 256; ++b) {
      const double t = 2.0 * pi * (b + 0.5) / 256;
      const double v = v_polar(2, r * std::cos(t), r * std::sin(t));
      sum += v * v * r;
    }
  }
  sum *= (1.0 / n) * (2.0 * pi / 256);
  EXPECT_NEAR(analytic_norms(2).dom_l2_sq, sum, 1e-6);
  EXPECT_NEAR(quadrature_norms(2).dom_l2_sq, domain_l2_sq_closed_form(2), 1e-8);
}

TEST(Norms, QuadratureMatchesClosedForms) {
  for (int i = 1; i <= 10; ++i) {
    const PerturbationNorms q = quadrature_norms(i);
    EXPECT_NEAR(q.bdry_l2_sq, pi / (i * i), 1e-8) << i;
    EXPECT_NEAR(q.grad_sq, pi / i, 1e-8) << i;
    EXPECT_NEAR(q.h1_sq, q.dom_l2_sq + q.grad_sq, 1e-14);
  }
}

TEST(Norms, BaseSolution) {
  EXPECT_NEAR(base_solution_h1_sq(), pi / 3.0 + 2.0 * pi, 1e-10);
}

TEST(FailureDemo, ResidualZeroObjectiveDecreasingErrorConstant) {
  const std::vector<FailureRow> rows = failure_demo(20);
  ASSERT_EQ(rows.size(), 20u);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].i, static_cast<int>(k) + 1);
    EXPECT_EQ(rows[k].residual, 0.0);
    EXPECT_NEAR(rows[k].relative_h1_error, rows[0].relative_h1_error, 1e-10);
    if (k > 0) EXPECT_LT(rows[k].pinn_objective, rows[k - 1].pinn_objective);
  }
  // O(1/i) objective.
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double scaled = rows[k].i * rows[k].pinn_objective;
    EXPECT_GT(scaled, 0.5 * 2 * rows[1].pinn_objective);
    EXPECT_LT(scaled, 2.0 * 2 * rows[1].pinn_objective);
  }
  // |v_i / |v_i|_{H1}|_{H1} / |u|_{H1} = 1 / sqrt(pi/3 + 2 pi).
  EXPECT_NEAR(rows[0].relative_h1_error, 1.0 / std::sqrt(pi / 3.0 + 2.0 * pi), 1e-10);
}

TEST(FailureDemo, ObjectiveAgainstIndependentFormula) {
  // Boundary mismatch of v_i / |v_i|_{H1}: (pi / i^2) / h1_sq, averaged over the circle length.
  for (const FailureRow& row : failure_demo(6)) {
    const int i = row.i;
    const double h1_sq = domain_l2_sq_closed_form(i) + pi / i;
    EXPECT_NEAR(row.pinn_objective, (pi / (i * i)) / h1_sq / (2.0 * pi), 1e-10);
  }
}

TEST(FailureDemo, RejectsNonPositiveCount) { EXPECT_THROW(failure_demo(0), InvalidArgument); }

}  // namespace
}  // namespace ssbe
