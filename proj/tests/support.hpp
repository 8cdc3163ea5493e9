#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ssbe/diffnet.hpp"
#include "ssbe/rng.hpp"

namespace ssbe::test {

/// Network with N(0, scale^2) weights and 0.1 N(0, 1) biases.
inline NetworkParams random_params(std::uint64_t seed, const std::vector<int>& sizes,
                                   Activation act, double scale = 1.0) {
  NetworkParams p(sizes, act);
  Rng rng(seed);
  for (int l = 0; l < p.num_layers(); ++l) {
    auto w = p.weights(l);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = scale * rng.normal() / std::sqrt(w.cols());
    auto b = p.biases(l);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = 0.1 * rng.normal();
  }
  return p;
}

inline Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

/// |a - b| / max(|b|, floor), normwise.
inline double rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-8) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

inline double rel_error(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max(std::abs(b), floor);
}

/// Central-difference gradient of a scalar function.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    g(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// Central-difference gradient of f over every entry of `theta`, perturbed in place.
inline Eigen::VectorXd fd_param_gradient(std::span<double> theta, const std::function<double()>& f,
                                         double h) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(theta.size()));
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double saved = theta[k];
    theta[k] = saved + h;
    const double fp = f();
    theta[k] = saved - h;
    const double fm = f();
    theta[k] = saved;
    g(static_cast<Eigen::Index>(k)) = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace ssbe::test
