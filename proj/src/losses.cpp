#include "ssbe/losses.hpp"

#include <algorithm>
#include <cmath>

#include "ssbe/errors.hpp"

namespace ssbe {

std::string to_string(LossMethod m) { return m == LossMethod::PINN ? "pinn" : "ssbe"; }

LossMethod loss_method_from_string(const std::string& name) {
  if (name == "pinn") return LossMethod::PINN;
  if (name == "ssbe") return LossMethod::SSBE;
  throw InvalidArgument("unknown loss method '" + name + "'");
}

LossWeights LossWeights::chart_sum(const ChartSet& charts) {
  LossWeights w;
  w.boundary_l2 = static_cast<double>(charts.size());
  return w;
}

void LossWeights::validate() const {
  for (double w : {residual, initial, boundary_l2, boundary_h1}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("loss weights must be finite and >= 0");
  }
}

std::optional<std::string> LossReport::non_finite_term() const {
  const std::pair<const char*, double> terms[] = {
      {"residual", residual},         {"boundary_value", boundary_value},
      {"boundary_tangential", boundary_tangential}, {"initial", initial},
      {"boundary_time", boundary_time}, {"total", total}};
  for (const auto& [name, v] : terms) {
    if (!std::isfinite(v)) return std::string(name);
  }
  return std::nullopt;
}

LossAssembler::LossAssembler(const PdeProblem& problem, const ChartSet& charts,
                             const SampleSet& samples, const LossOptions& options)
    : options_(options),
      op_(problem.op),
      time_dependent_(problem.time_dependent),
      spatial_dim_(problem.spatial_dim()),
      input_dim_(problem.input_dim()),
      mask_(problem.laplacian_mask()) {
  options_.weights.validate();
  if (samples.interior.cols() == 0) throw InvalidArgument("empty interior sample set");
  if (samples.interior.rows() != input_dim_) {
    throw DimensionMismatch("interior samples do not match the problem input dimension");
  }
  if (charts.size() == 0) throw InvalidArgument("no boundary charts");
  if (samples.per_chart.size() != charts.size()) {
    throw InvalidArgument("sample set and chart set disagree on the number of charts");
  }
  const bool ssbe = options_.method == LossMethod::SSBE;
  const bool product = ssbe && options_.full_parabolic && time_dependent_;
  if (time_dependent_) {
    if (samples.initial.cols() == 0) throw InvalidArgument("time-dependent problem needs initial samples");
    if (samples.per_chart_time.size() != charts.size()) {
      throw InvalidArgument("time-dependent problem needs per-chart sample times");
    }
    if (product && samples.time_values.empty()) {
      throw InvalidArgument("product-form parabolic loss needs a time grid");
    }
  }

  // Interior.
  Block& interior = blocks_[kInteriorBlock];
  interior.points = samples.interior;
  interior.order = JetOrder::Laplacian;
  interior.active = true;
  forcing_.resize(interior.points.cols());
  for (Eigen::Index i = 0; i < interior.points.cols(); ++i) {
    forcing_(i) = problem.forcing(interior.points.col(i));
  }
  for (Eigen::Index begin = 0; begin < interior.points.cols(); begin += kInteriorTile) {
    const Eigen::Index len = std::min(kInteriorTile, interior.points.cols() - begin);
    interior_tiles_.push_back(interior.points.middleCols(begin, len));
    tile_offsets_.push_back(begin);
  }

  // Boundary, chart by chart.
  const int d = spatial_dim_;
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> gv, gt, metric;
  std::vector<Eigen::VectorXd> gtan;
  Eigen::Index start = 0;
  for (std::size_t r = 0; r < charts.size(); ++r) {
    const Chart& chart = charts[r];
    const Eigen::MatrixXd& params = samples.per_chart[r];
    if (params.rows() != d - 1) throw DimensionMismatch("chart samples have the wrong dimension");
    const bool weighted = options_.metric_weighting.value_or(chart.metric_weight);
    auto add = [&](const Eigen::VectorXd& xp, double t) {
      const Eigen::VectorXd input = boundary_input(problem, chart, xp, t);
      pts.push_back(input);
      gv.push_back(problem.boundary_g(input));
      gt.push_back(time_dependent_ && problem.time_derivative_g ? problem.time_derivative_g(input) : 0.0);
      metric.push_back(weighted ? metric_factor(chart, xp) : 1.0);
      Eigen::MatrixXd tangent(d, d - 1);
      Eigen::VectorXd g_tan(d - 1);
      const Eigen::VectorXd g_grad = problem.boundary_g_gradient(input);
      for (int a = 0; a < d - 1; ++a) {
        tangent.col(a) = chart_tangent(chart, xp, a);
        g_tan(a) = g_grad.head(d).dot(tangent.col(a));
      }
      tangents_.push_back(std::move(tangent));
      gtan.push_back(std::move(g_tan));
    };
    for (Eigen::Index i = 0; i < params.cols(); ++i) {
      const Eigen::VectorXd xp = params.col(i);
      if (!time_dependent_) {
        add(xp, 0.0);
      } else if (product) {
        for (double t : samples.time_values) add(xp, t);
      } else {
        add(xp, samples.per_chart_time[r](i));
      }
    }
    const auto end = static_cast<Eigen::Index>(pts.size());
    if (end == start) throw InvalidArgument("chart " + chart.name + " has no samples");
    chart_ranges_.emplace_back(start, end);
    start = end;
  }
  const auto nb = static_cast<Eigen::Index>(pts.size());
  Block& boundary = blocks_[kBoundaryBlock];
  boundary.points.resize(input_dim_, nb);
  g_value_.resize(nb);
  g_time_.resize(nb);
  metric_.resize(nb);
  g_tangential_.resize(d - 1, nb);
  for (Eigen::Index i = 0; i < nb; ++i) {
    boundary.points.col(i) = pts[i];
    g_value_(i) = gv[i];
    g_time_(i) = gt[i];
    metric_(i) = metric[i];
    g_tangential_.col(i) = gtan[i];
  }
  boundary.active = true;
  boundary.order = (ssbe || product) ? JetOrder::Gradient : JetOrder::Value;

  // Initial slice.
  if (time_dependent_) {
    Block& initial = blocks_[kInitialBlock];
    const Eigen::Index n0 = samples.initial.cols();
    initial.points.resize(input_dim_, n0);
    initial.points.topRows(d) = samples.initial;
    initial.points.row(d).setZero();
    initial.order = JetOrder::Value;
    initial.active = true;
    nu_.resize(n0);
    for (Eigen::Index i = 0; i < n0; ++i) nu_(i) = problem.initial_nu(samples.initial.col(i));
  }
}

namespace {

void reset_seed(JetAdjointBatch& seed, int input_dim, Eigen::Index n) {
  seed.value_bar.setZero(n);
  seed.gradient_bar.setZero(input_dim, n);
  seed.laplacian_bar.setZero(n);
}

}  // namespace

void LossAssembler::residual_terms(const JetBatch& jb, Eigen::Index offset, JetAdjointBatch* seed,
                                   double& sum) const {
  const double w = options_.weights.residual;
  const double inv_n = 1.0 / static_cast<double>(blocks_[kInteriorBlock].points.cols());
  const int t_index = spatial_dim_;
  if (seed) reset_seed(*seed, input_dim_, jb.size());
  for (Eigen::Index i = 0; i < jb.size(); ++i) {
    const double u = jb.value(i);
    const double u_t = time_dependent_ ? jb.gradient(t_index, i) : 0.0;
    const double r = operator_value(op_, u, jb.laplacian(i), u_t) - forcing_(offset + i);
    sum += r * r;
    if (seed) {
      const double c = w * 2.0 * r * inv_n;
      seed->value_bar(i) = c * operator_value_du(op_, u);
      seed->laplacian_bar(i) = -op_.alpha * c;
      if (time_dependent_) seed->gradient_bar(t_index, i) = c;
    }
  }
}

void LossAssembler::boundary_terms(const JetBatch& jb, JetAdjointBatch* seed,
                                   LossReport& rep) const {
  const LossWeights& w = options_.weights;
  const bool ssbe = options_.method == LossMethod::SSBE;
  const bool product = ssbe && options_.full_parabolic && time_dependent_;
  const int d = spatial_dim_;
  const int t_index = spatial_dim_;
  if (seed) reset_seed(*seed, input_dim_, jb.size());

  const double inv_l = 1.0 / static_cast<double>(chart_ranges_.size());
  double value_sum = 0.0;
  double tangential_sum = 0.0;
  for (const auto& [begin, end] : chart_ranges_) {
    const double inv_nr = 1.0 / static_cast<double>(end - begin);
    double chart_value = 0.0;
    double chart_tangential = 0.0;
    for (Eigen::Index i = begin; i < end; ++i) {
      const double e = jb.value(i) - g_value_(i);
      chart_value += e * e;
      if (seed) seed->value_bar(i) = w.boundary_l2 * inv_l * 2.0 * e * inv_nr;
      if (!ssbe) continue;
      const Eigen::MatrixXd& tangent = tangents_[static_cast<std::size_t>(i)];
      double sq = 0.0;
      for (int a = 0; a < d - 1; ++a) {
        const double diff = jb.gradient.col(i).head(d).dot(tangent.col(a)) - g_tangential_(a, i);
        sq += diff * diff;
        if (seed) {
          seed->gradient_bar.col(i).head(d) +=
              (w.boundary_h1 * 2.0 * metric_(i) * diff * inv_nr) * tangent.col(a);
        }
      }
      chart_tangential += metric_(i) * sq;
    }
    value_sum += chart_value * inv_nr;
    tangential_sum += chart_tangential * inv_nr;
  }
  rep.boundary_value = value_sum * inv_l;
  rep.boundary_tangential = tangential_sum;

  if (product) {
    const Eigen::Index nb = jb.size();
    const double inv_nb = 1.0 / static_cast<double>(nb);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < nb; ++i) {
      const double e = jb.gradient(t_index, i) - g_time_(i);
      sum += e * e;
      if (seed) seed->gradient_bar(t_index, i) += w.boundary_h1 * 2.0 * e * inv_nb;
    }
    rep.boundary_time = sum * inv_nb;
  }
}

void LossAssembler::initial_terms(const JetBatch& jb, JetAdjointBatch* seed,
                                  LossReport& rep) const {
  const Eigen::Index n = jb.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  if (seed) reset_seed(*seed, input_dim_, n);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = jb.value(i) - nu_(i);
    sum += e * e;
    if (seed) seed->value_bar(i) = options_.weights.initial * 2.0 * e * inv_n;
  }
  rep.initial = sum * inv_n;
}

void LossAssembler::finish(double residual_sum, LossReport& rep) const {
  const LossWeights& w = options_.weights;
  rep.residual = residual_sum / static_cast<double>(blocks_[kInteriorBlock].points.cols());
  rep.total = w.residual * rep.residual + w.initial * rep.initial +
              w.boundary_l2 * rep.boundary_value +
              w.boundary_h1 * (rep.boundary_tangential + rep.boundary_time);
}

LossReport LossAssembler::evaluate(const NetworkParams& params) const {
  if (params.input_dim() != input_dim_) throw DimensionMismatch("network input dimension mismatch");
  LossReport rep;
  double residual_sum = 0.0;
  for (std::size_t t = 0; t < interior_tiles_.size(); ++t) {
    forward_batch_into(params, interior_tiles_[t], mask_, JetOrder::Laplacian,
                       tapes_[kInteriorBlock]);
    residual_terms(tapes_[kInteriorBlock].jets(), tile_offsets_[t], nullptr, residual_sum);
  }
  forward_batch_into(params, blocks_[kBoundaryBlock].points, mask_, blocks_[kBoundaryBlock].order,
                     tapes_[kBoundaryBlock]);
  boundary_terms(tapes_[kBoundaryBlock].jets(), nullptr, rep);
  if (time_dependent_) {
    forward_batch_into(params, blocks_[kInitialBlock].points, mask_, JetOrder::Value,
                       tapes_[kInitialBlock]);
    initial_terms(tapes_[kInitialBlock].jets(), nullptr, rep);
  }
  finish(residual_sum, rep);
  return rep;
}

LossReport LossAssembler::evaluate(const JetField& field) const {
  auto jets_of = [&](const Eigen::MatrixXd& pts) {
    JetBatch jb;
    jb.value.resize(pts.cols());
    jb.gradient.resize(input_dim_, pts.cols());
    jb.laplacian.resize(pts.cols());
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
      const Jet jet = field(pts.col(i), mask_);
      jb.value(i) = jet.value;
      jb.gradient.col(i) = jet.gradient;
      jb.laplacian(i) = jet.laplacian;
    }
    return jb;
  };
  LossReport rep;
  double residual_sum = 0.0;
  residual_terms(jets_of(blocks_[kInteriorBlock].points), 0, nullptr, residual_sum);
  boundary_terms(jets_of(blocks_[kBoundaryBlock].points), nullptr, rep);
  if (time_dependent_) initial_terms(jets_of(blocks_[kInitialBlock].points), nullptr, rep);
  finish(residual_sum, rep);
  return rep;
}

LossReport LossAssembler::evaluate_with_gradient(const NetworkParams& params,
                                                 ParamGradient& grad) const {
  if (params.input_dim() != input_dim_) throw DimensionMismatch("network input dimension mismatch");
  if (grad.size() != params.size()) {
    grad = ParamGradient(params.size());
  } else {
    grad.values.setZero();
  }
  LossReport rep;
  double residual_sum = 0.0;
  // Interleaving forward and backward per tile keeps the working set in cache.
  for (std::size_t t = 0; t < interior_tiles_.size(); ++t) {
    ForwardTape& tape = tapes_[kInteriorBlock];
    forward_batch_into(params, interior_tiles_[t], mask_, JetOrder::Laplacian, tape);
    residual_terms(tape.jets(), tile_offsets_[t], &seeds_[kInteriorBlock], residual_sum);
    pullback_batch_into(params, tape, seeds_[kInteriorBlock], grad);
  }
  {
    ForwardTape& tape = tapes_[kBoundaryBlock];
    forward_batch_into(params, blocks_[kBoundaryBlock].points, mask_,
                       blocks_[kBoundaryBlock].order, tape);
    boundary_terms(tape.jets(), &seeds_[kBoundaryBlock], rep);
    pullback_batch_into(params, tape, seeds_[kBoundaryBlock], grad);
  }
  if (time_dependent_) {
    ForwardTape& tape = tapes_[kInitialBlock];
    forward_batch_into(params, blocks_[kInitialBlock].points, mask_, JetOrder::Value, tape);
    initial_terms(tape.jets(), &seeds_[kInitialBlock], rep);
    pullback_batch_into(params, tape, seeds_[kInitialBlock], grad);
  }
  finish(residual_sum, rep);
  return rep;
}

LossReport pinn_loss(const NetworkParams& params, const PdeProblem& problem,
                     const ChartSet& charts, const SampleSet& samples,
                     const LossWeights& weights) {
  LossOptions opt;
  opt.method = LossMethod::PINN;
  opt.weights = weights;
  return LossAssembler(problem, charts, samples, opt).evaluate(params);
}

LossReport ssbe_loss(const NetworkParams& params, const PdeProblem& problem,
                     const ChartSet& charts, const SampleSet& samples,
                     const LossWeights& weights, bool full_parabolic) {
  LossOptions opt;
  opt.method = LossMethod::SSBE;
  opt.weights = weights;
  opt.full_parabolic = full_parabolic;
  return LossAssembler(problem, charts, samples, opt).evaluate(params);
}

ParamGradient loss_gradient(const NetworkParams& params, const PdeProblem& problem,
                            const ChartSet& charts, const SampleSet& samples, LossMethod method,
                            const LossWeights& weights) {
  LossOptions opt;
  opt.method = method;
  opt.weights = weights;
  ParamGradient grad;
  LossAssembler(problem, charts, samples, opt).evaluate_with_gradient(params, grad);
  return grad;
}

}  // namespace ssbe
