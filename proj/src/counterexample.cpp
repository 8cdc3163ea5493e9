#include "ssbe/counterexample.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "ssbe/errors.hpp"

namespace ssbe {

namespace {

constexpr double kPi = std::numbers::pi;

void require_index(int i) {
  if (i < 1) throw InvalidArgument("perturbation index must be >= 1");
}

}  // namespace

Jet perturbation_jet(int i, const Eigen::Vector2d& point) {
  require_index(i);
  const std::complex<double> z(point.x(), point.y());
  std::complex<double> zk(1.0, 0.0);  // z^(i-1)
  for (int k = 1; k < i; ++k) zk *= z;
  Jet jet;
  jet.value = (zk * z).imag() / i;
  jet.gradient = Eigen::Vector2d(zk.imag(), zk.real());
  jet.laplacian = 0.0;
  return jet;
}

double domain_l2_sq_closed_form(int i) {
  require_index(i);
  return kPi / ((2.0 * i + 2.0) * i * i);
}

double circle_integral(const std::function<double(double, double)>& f, int n_theta) {
  if (n_theta < 1) throw InvalidArgument("n_theta must be >= 1");
  const double h = 2.0 * kPi / n_theta;
  double sum = 0.0;
  for (int k = 0; k < n_theta; ++k) {
    const double t = k * h;
    sum += f(std::cos(t), std::sin(t));
  }
  return sum * h;
}

double disk_integral(const std::function<double(double, double)>& f, int n_theta) {
  auto ring = [&](double r) {
    return r * circle_integral([&](double c, double s) { return f(r * c, r * s); }, n_theta);
  };
  return boost::math::quadrature::gauss<double, 64>::integrate(ring, 0.0, 1.0);
}

PerturbationNorms quadrature_norms(int i, int n_theta) {
  require_index(i);
  PerturbationNorms n;
  n.i = i;
  n.bdry_l2_sq = circle_integral(
      [i](double x, double y) { return std::pow(perturbation_jet(i, {x, y}).value, 2); }, n_theta);
  n.dom_l2_sq = disk_integral(
      [i](double x, double y) { return std::pow(perturbation_jet(i, {x, y}).value, 2); }, n_theta);
  n.grad_sq = disk_integral(
      [i](double x, double y) { return perturbation_jet(i, {x, y}).gradient.squaredNorm(); }, n_theta);
  n.h1_sq = n.dom_l2_sq + n.grad_sq;
  return n;
}

PerturbationNorms analytic_norms(int i) {
  require_index(i);
  PerturbationNorms n;
  n.i = i;
  n.bdry_l2_sq = kPi / (static_cast<double>(i) * i);
  n.grad_sq = kPi / i;
  n.dom_l2_sq = disk_integral(
      [i](double x, double y) { return std::pow(perturbation_jet(i, {x, y}).value, 2); });
  n.h1_sq = n.dom_l2_sq + n.grad_sq;
  return n;
}

double base_solution_h1_sq() {
  return disk_integral([](double x, double y) {
    const double u = 1.0 - x * x - y * y;
    return u * u + 4.0 * (x * x + y * y);
  });
}

std::vector<FailureRow> failure_demo(int i_max) {
  if (i_max < 1) throw InvalidArgument("i_max must be >= 1");
  const double u_h1 = std::sqrt(base_solution_h1_sq());
  const double area = kPi;
  const double circumference = 2.0 * kPi;
  std::vector<FailureRow> rows;
  for (int i = 1; i <= i_max; ++i) {
    const PerturbationNorms norms = analytic_norms(i);
    const double scale = 1.0 / std::sqrt(norms.h1_sq);
    FailureRow row;
    row.i = i;
    // -lap(u_i) - 4 = -scale * lap(v_i), identically zero.
    row.residual = disk_integral([&](double x, double y) {
      return std::pow(scale * perturbation_jet(i, {x, y}).laplacian, 2);
    });
    // u vanishes on the circle, so u_i - g = scale * v_i there.
    const double boundary = circle_integral([&](double x, double y) {
      return std::pow(scale * perturbation_jet(i, {x, y}).value, 2);
    });
    row.pinn_objective = row.residual / area + boundary / circumference;
    const double diff_h1_sq = disk_integral([&](double x, double y) {
      const Jet v = perturbation_jet(i, {x, y});
      return scale * scale * (v.value * v.value + v.gradient.squaredNorm());
    });
    row.relative_h1_error = std::sqrt(diff_h1_sq) / u_h1;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ssbe
