#include "ssbe/verify.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "ssbe/diffnet.hpp"
#include "ssbe/errors.hpp"
#include "ssbe/rng.hpp"

namespace ssbe {

namespace {

double rel_error(const Eigen::VectorXd& approx, const Eigen::VectorXd& exact) {
  return (approx - exact).norm() / std::max(exact.norm(), 1e-8);
}

double weighted(const Jet& j, const JetAdjoint& adj) {
  return adj.value_bar * j.value + adj.gradient_bar.dot(j.gradient) + adj.laplacian_bar * j.laplacian;
}

}  // namespace

AutodiffCheck verify_autodiff(std::uint64_t seed, int n_nets) {
  if (n_nets < 1) throw InvalidArgument("n_nets must be >= 1");
  constexpr int kDims[] = {1, 2, 5, 10};
  AutodiffCheck out;
  out.nets = n_nets;
  for (int net = 0; net < n_nets; ++net) {
    Rng rng = Rng::derived(seed, static_cast<std::uint64_t>(net));
    // Central differences carry a roundoff of about eps * |u| / h, so draws
    // whose gradient is tiny next to the value are redrawn.
    int d = 0;
    Activation act = Activation::Tanh;
    NetworkParams p({1, 1}, act);
    Eigen::VectorXd x;
    std::vector<bool> mask;
    Jet jet;
    for (int attempt = 0;; ++attempt) {
      d = kDims[rng.below(4)];
      const int hidden = 1 + static_cast<int>(rng.below(3));
      std::vector<int> sizes{d};
      for (int h = 0; h < hidden; ++h) sizes.push_back(1 + static_cast<int>(rng.below(32)));
      sizes.push_back(1);
      act = net % 2 == 0 ? Activation::Tanh : Activation::Relu3Sixth;
      p = init_params(rng.next_u64(), sizes, act);
      // ReLU^3/6 shrinks small inputs cubically; larger weights keep deep
      // nets away from the flat regime.
      const double scale = act == Activation::Relu3Sixth ? 3.0 : 1.0;
      for (int l = 0; l < p.num_layers(); ++l) {
        p.weights(l) *= scale;
        for (Eigen::Index i = 0; i < p.biases(l).size(); ++i) p.biases(l)(i) = 0.1 * rng.normal();
      }
      x.resize(d);
      for (int a = 0; a < d; ++a) x(a) = rng.uniform(-1.0, 1.0);
      mask.assign(static_cast<std::size_t>(d), true);
      jet = forward_jet(p, x, mask);
      if (jet.gradient.norm() >= 1e-3 * std::max(1.0, std::abs(jet.value)) || attempt >= 100) break;
    }

    // Input derivatives.
    const double h = 1e-5;
    Eigen::VectorXd fd_grad(d);
    double fd_lap = 0.0;
    for (int a = 0; a < d; ++a) {
      Eigen::VectorXd xp = x, xm = x;
      xp(a) += h;
      xm(a) -= h;
      const Jet jp = forward_jet(p, xp, mask);
      const Jet jm = forward_jet(p, xm, mask);
      fd_grad(a) = (jp.value - jm.value) / (2 * h);
      fd_lap += (jp.gradient(a) - jm.gradient(a)) / (2 * h);
    }
    Eigen::VectorXd exact(d + 1), approx(d + 1);
    exact << jet.gradient, jet.laplacian;
    approx << fd_grad, fd_lap;
    out.max_jet_error = std::max(out.max_jet_error, rel_error(approx, exact));

    // Parameter derivatives of a random adjoint combination.
    JetAdjoint adj;
    adj.value_bar = rng.normal();
    adj.gradient_bar = Eigen::VectorXd(d);
    for (int a = 0; a < d; ++a) adj.gradient_bar(a) = rng.normal();
    adj.laplacian_bar = rng.normal();
    const ParamGradient g = pullback(p, x, mask, adj);
    Eigen::VectorXd fd(static_cast<Eigen::Index>(p.size()));
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double saved = p.data()[k];
      p.data()[k] = saved + h;
      const double sp = weighted(forward_jet(p, x, mask), adj);
      p.data()[k] = saved - h;
      const double sm = weighted(forward_jet(p, x, mask), adj);
      p.data()[k] = saved;
      fd(static_cast<Eigen::Index>(k)) = (sp - sm) / (2 * h);
    }
    out.max_param_error = std::max(out.max_param_error, rel_error(fd, g.values));
  }
  return out;
}

}  // namespace ssbe
