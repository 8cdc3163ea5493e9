#include "ssbe/theory_probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssbe/diffnet.hpp"
#include "ssbe/errors.hpp"
#include "ssbe/rng.hpp"
#include "ssbe/sampling.hpp"

namespace ssbe {

namespace {

constexpr int kAscentIterations = 40;

ActivationDerivs relu3(double z) { return activate(Activation::Relu3Sixth, z); }

/// Interior feature |w|^2 s''(w.x) + (1.w) s'(w.x) + s(w.x).
double interior_feature(const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
  const ActivationDerivs s = relu3(w.dot(x));
  return w.squaredNorm() * s.d2 + w.sum() * s.d1 + s.value;
}

Eigen::VectorXd unit_ball_point(Rng& rng, int d) {
  Eigen::VectorXd v(d);
  for (int a = 0; a < d; ++a) v(a) = rng.normal();
  return v.normalized() * std::pow(rng.uniform01(), 1.0 / d);
}

Eigen::VectorXd unit_sphere_point(Rng& rng, int d) {
  Eigen::VectorXd v(d);
  do {
    for (int a = 0; a < d; ++a) v(a) = rng.normal();
  } while (v.norm() < 1e-12);
  return v.normalized();
}

/// Sample data for one Rademacher problem: points p_i and, for DG_Q, tangents t_i.
struct ProbeSample {
  FunctionClass cls;
  Eigen::MatrixXd points;
  Eigen::MatrixXd tangents;
};

/// S(u) = (1/n) sum_i tau_i phi(u, x_i) and its gradient in u.
double correlation(const ProbeSample& s, const Eigen::VectorXd& tau, const Eigen::VectorXd& u,
                   Eigen::VectorXd* grad) {
  const Eigen::Index n = s.points.cols();
  const Eigen::RowVectorXd z = u.transpose() * s.points;
  double value = 0.0;
  if (grad) grad->setZero(u.size());
  const double usq = u.squaredNorm();
  const double usum = u.sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (z(i) <= 0.0) continue;  // every feature vanishes with its derivatives
    const ActivationDerivs sd = relu3(z(i));
    const auto x = s.points.col(i);
    switch (s.cls) {
      case FunctionClass::F_Q: {
        value += tau(i) * (usq * sd.d2 + usum * sd.d1 + sd.value);
        if (grad) {
          *grad += tau(i) * (2.0 * sd.d2 * u + Eigen::VectorXd::Constant(u.size(), sd.d1) +
                             (usq * sd.d3 + usum * sd.d2 + sd.d1) * x);
        }
        break;
      }
      case FunctionClass::G_Q:
        value += tau(i) * sd.value;
        if (grad) *grad += tau(i) * sd.d1 * x;
        break;
      case FunctionClass::DG_Q: {
        const auto t = s.tangents.col(i);
        const double ut = u.dot(t);
        value += tau(i) * sd.d1 * ut;
        if (grad) *grad += tau(i) * (sd.d2 * ut * x + sd.d1 * t);
        break;
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  if (grad) *grad *= inv_n;
  return value * inv_n;
}

/// max over the unit sphere of |S(u)|, from below.
double sphere_max(const ProbeSample& s, const Eigen::VectorXd& tau, int restarts, Rng& rng) {
  const int d = static_cast<int>(s.points.rows());
  double best = 0.0;
  Eigen::VectorXd g(d), g_try(d);
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd u = unit_sphere_point(rng, d);
    double val = correlation(s, tau, u, &g);
    double sign = val >= 0.0 ? 1.0 : -1.0;
    double step = 0.5;
    for (int it = 0; it < kAscentIterations && step > 1e-6; ++it) {
      Eigen::VectorXd tangent = sign * g;
      tangent -= tangent.dot(u) * u;
      const double tnorm = tangent.norm();
      if (tnorm < 1e-14) break;
      const Eigen::VectorXd u_try = (u + (step / tnorm) * tangent).normalized();
      const double val_try = correlation(s, tau, u_try, &g_try);
      if (std::abs(val_try) > std::abs(val)) {
        u = u_try;
        val = val_try;
        g = g_try;
        sign = val >= 0.0 ? 1.0 : -1.0;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    best = std::max(best, std::abs(val));
  }
  return best;
}

}  // namespace

TwoLayerParams::TwoLayerParams(Eigen::VectorXd a_in, Eigen::MatrixXd w_in)
    : a(std::move(a_in)), w(std::move(w_in)) {
  if (a.size() < 1 || w.cols() != a.size() || w.rows() < 1) {
    throw InvalidArgument("two-layer parameters need m >= 1 and w of shape d x m");
  }
  if (!a.allFinite() || !w.allFinite()) throw InvalidArgument("two-layer parameters must be finite");
}

double TwoLayerParams::evaluate(const Eigen::VectorXd& x) const {
  double out = 0.0;
  for (int k = 0; k < width(); ++k) out += a(k) * relu3(w.col(k).dot(x)).value;
  return out;
}

double path_norm(const TwoLayerParams& p) {
  double total = 0.0;
  for (int k = 0; k < p.width(); ++k) total += std::abs(p.a(k)) * std::pow(p.w.col(k).norm(), 3);
  return total;
}

std::string to_string(FunctionClass c) {
  switch (c) {
    case FunctionClass::F_Q: return "F_Q";
    case FunctionClass::G_Q: return "G_Q";
    case FunctionClass::DG_Q: return "DG_Q";
  }
  return "?";
}

FunctionClass function_class_from_string(const std::string& name) {
  if (name == "F_Q") return FunctionClass::F_Q;
  if (name == "G_Q") return FunctionClass::G_Q;
  if (name == "DG_Q") return FunctionClass::DG_Q;
  throw InvalidArgument("unknown function class '" + name + "' (expected F_Q, G_Q or DG_Q)");
}

ChartSet probe_charts(int d) {
  if (d < 2) throw InvalidArgument("probe dimension must be >= 2");
  if (d == 2) return make_disk_charts(std::sqrt(0.5), false);
  return make_charts(Domain::box(d, 1.0 / std::sqrt(static_cast<double>(d))));
}

double probe_m_tilde(int d) {
  // Disk charts with kappa = sqrt(2)/2 have |gamma'| <= 1; box faces are flat.
  return d == 2 ? 1.0 : 0.0;
}

double rademacher_bound(FunctionClass c, double q, int n, int d) {
  const double root_n = std::sqrt(static_cast<double>(n));
  switch (c) {
    case FunctionClass::F_Q: return 4.0 * q * d * d / root_n;
    case FunctionClass::G_Q: return q / (3.0 * root_n);
    case FunctionClass::DG_Q: return (probe_m_tilde(d) + 1.0) * q / root_n;
  }
  return 0.0;
}

RademacherEstimate empirical_rademacher(FunctionClass c, double q, int n, int d, int trials,
                                        int restarts, std::uint64_t seed) {
  if (n < 1 || trials < 1 || restarts < 1) throw InvalidArgument("n, trials and restarts must be >= 1");
  if (d < 2) throw InvalidArgument("dimension must be >= 2");
  if (!(q >= 0.0)) throw InvalidArgument("Q must be >= 0");

  ProbeSample sample{c, Eigen::MatrixXd(d, n), Eigen::MatrixXd()};
  Rng point_rng = Rng::derived(seed, 0);
  if (c == FunctionClass::F_Q) {
    for (int i = 0; i < n; ++i) sample.points.col(i) = unit_ball_point(point_rng, d);
  } else {
    const ChartSet charts = probe_charts(d);
    const Chart& chart = charts[0];
    if (c == FunctionClass::DG_Q) sample.tangents.resize(d, n);
    Eigen::VectorXd xp(d - 1);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < d - 1; ++a) xp(a) = point_rng.uniform(-chart.kappa, chart.kappa);
      sample.points.col(i) = chart_point(chart, xp);
      if (c == FunctionClass::DG_Q) sample.tangents.col(i) = chart_tangent(chart, xp, 0);
    }
  }

  std::vector<double> sups(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::derived(seed, static_cast<std::uint64_t>(t) + 1);
    Eigen::VectorXd tau(n);
    for (int i = 0; i < n; ++i) tau(i) = rng.rademacher();
    sups[static_cast<std::size_t>(t)] = q * sphere_max(sample, tau, restarts, rng);
  }
  RademacherEstimate est;
  est.cls = c;
  est.q = q;
  est.n = n;
  est.d = d;
  est.bound = rademacher_bound(c, q, n, d);
  est.estimate = std::accumulate(sups.begin(), sups.end(), 0.0) / trials;
  if (trials > 1) {
    double var = 0.0;
    for (double s : sups) var += (s - est.estimate) * (s - est.estimate);
    est.std_error = std::sqrt(var / (trials - 1) / trials);
  }
  return est;
}

BarronPairSpec BarronPairSpec::example() {
  BarronPairSpec spec;
  spec.atoms = {
      {0.4, 1.0, Eigen::Vector2d(1.0, 0.5)},
      {0.3, -0.8, Eigen::Vector2d(-0.6, 1.2)},
      {0.2, 1.5, Eigen::Vector2d(0.3, -1.0)},
      {0.1, -2.0, Eigen::Vector2d(-1.1, -0.4)},
  };
  return spec;
}

ApproximationResult approximation_probe(const BarronPairSpec& spec, int m, int n_mc,
                                        int repetitions, std::uint64_t seed) {
  if (m < 1 || n_mc < 1 || repetitions < 1) {
    throw InvalidArgument("m, n_mc and repetitions must be >= 1");
  }
  const std::size_t n_atoms = spec.atoms.size();
  if (n_atoms == 0) throw InvalidArgument("rho has no atoms");
  double total_prob = 0.0;
  double norm_sq = 0.0;
  for (const BarronAtom& atom : spec.atoms) {
    if (!(atom.probability >= 0.0) || !std::isfinite(atom.a) || !atom.w.allFinite()) {
      throw InvalidArgument("rho atoms must have finite entries and nonnegative probability");
    }
    total_prob += atom.probability;
    norm_sq += atom.probability * atom.a * atom.a * std::pow(atom.w.norm(), 6);
  }
  if (!(total_prob > 0.0)) throw InvalidArgument("rho has zero total probability");
  norm_sq /= total_prob;
  if (!(norm_sq > 0.0)) throw InvalidArgument("rho has zero Barron norm");

  const ChartSet charts = spec.charts.size() > 0 ? spec.charts : make_disk_charts(std::sqrt(0.5), false);
  const int d = 2;

  // Per-atom features (already multiplied by a_j) on fixed evaluation points.
  const Eigen::MatrixXd interior = sample_interior(Domain::disk(), n_mc, splitmix64(seed ^ 0x51));
  const std::vector<Eigen::MatrixXd> chart_params = sample_charts(charts, n_mc, splitmix64(seed ^ 0x52));
  const Eigen::Index n_a = static_cast<Eigen::Index>(n_atoms);
  Eigen::MatrixXd f_feat(n_a, n_mc);
  std::vector<Eigen::MatrixXd> g_feat(charts.size()), dg_feat(charts.size() * (d - 1));
  for (Eigen::Index j = 0; j < n_a; ++j) {
    const BarronAtom& atom = spec.atoms[static_cast<std::size_t>(j)];
    for (int i = 0; i < n_mc; ++i) f_feat(j, i) = atom.a * interior_feature(atom.w, interior.col(i));
  }
  for (std::size_t r = 0; r < charts.size(); ++r) {
    g_feat[r].resize(n_a, n_mc);
    for (int a = 0; a < d - 1; ++a) dg_feat[r * (d - 1) + a].resize(n_a, n_mc);
    for (int i = 0; i < n_mc; ++i) {
      const Eigen::VectorXd xp = chart_params[r].col(i);
      const Eigen::VectorXd x = chart_point(charts[r], xp);
      for (Eigen::Index j = 0; j < n_a; ++j) {
        const BarronAtom& atom = spec.atoms[static_cast<std::size_t>(j)];
        const ActivationDerivs s = relu3(atom.w.dot(x));
        g_feat[r](j, i) = atom.a * s.value;
        for (int a = 0; a < d - 1; ++a) {
          dg_feat[r * (d - 1) + a](j, i) = atom.a * s.d1 * atom.w.dot(chart_tangent(charts[r], xp, a));
        }
      }
    }
  }
  Eigen::RowVectorXd probs(n_a);
  for (Eigen::Index j = 0; j < n_a; ++j) probs(j) = spec.atoms[static_cast<std::size_t>(j)].probability / total_prob;

  auto mismatch = [&](const Eigen::MatrixXd& feat, const Eigen::RowVectorXd& coeff) {
    return ((coeff - probs) * feat).squaredNorm() / static_cast<double>(feat.cols());
  };

  std::vector<double> cumulative(n_atoms);
  std::partial_sum(probs.data(), probs.data() + n_a, cumulative.begin());
  const double bnorm = std::sqrt(norm_sq);
  std::vector<double> risks(static_cast<std::size_t>(repetitions));
  double path_sum = 0.0;
  int path_hits = 0;
  for (int rep = 0; rep < repetitions; ++rep) {
    Rng rng = Rng::derived(seed, static_cast<std::uint64_t>(rep) + 1);
    Eigen::RowVectorXd coeff = Eigen::RowVectorXd::Zero(n_a);
    double path = 0.0;
    for (int k = 0; k < m; ++k) {
      const double u = rng.uniform01();
      const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
      const auto j = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(), n_a - 1));
      coeff(static_cast<Eigen::Index>(j)) += 1.0 / m;
      path += std::abs(spec.atoms[j].a) / m * std::pow(spec.atoms[j].w.norm(), 3);
    }
    double risk = mismatch(f_feat, coeff);
    for (std::size_t r = 0; r < charts.size(); ++r) {
      risk += mismatch(g_feat[r], coeff);
      for (int a = 0; a < d - 1; ++a) risk += mismatch(dg_feat[r * (d - 1) + a], coeff);
    }
    risks[static_cast<std::size_t>(rep)] = risk;
    path_sum += path;
    if (path <= 2.0 * bnorm) ++path_hits;
  }

  ApproximationResult res;
  res.m = m;
  res.repetitions = repetitions;
  res.barron_norm_sq = norm_sq;
  res.mean_risk = std::accumulate(risks.begin(), risks.end(), 0.0) / repetitions;
  if (repetitions > 1) {
    double var = 0.0;
    for (double v : risks) var += (v - res.mean_risk) * (v - res.mean_risk);
    res.std_error = std::sqrt(var / (repetitions - 1) / repetitions);
  }
  // M bounds |w^T A w| / |w|^2, |b_hat| and |c| for A = I, b_hat = (1, 1), c = 1.
  const double big_m = std::sqrt(2.0);
  const double m_tilde = 1.0;
  const double l = static_cast<double>(charts.size());
  res.reference_bound = (12.0 * big_m + 3.0 * l * d * (m_tilde + 1.0) * (m_tilde + 1.0)) / m * norm_sq;
  res.mean_path_norm = path_sum / repetitions;
  res.path_norm_fraction = static_cast<double>(path_hits) / repetitions;
  return res;
}

}  // namespace ssbe
