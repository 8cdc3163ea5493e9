#include "ssbe/diffnet.hpp"

#include <cmath>
#include <string>

#include "ssbe/errors.hpp"
#include "ssbe/rng.hpp"

namespace ssbe {

namespace {

constexpr std::uint64_t kInitStream = 0x1d1f;

void validate_architecture(const std::vector<int>& sizes) {
  if (sizes.size() < 2) {
    throw InvalidArchitecture("layer_sizes needs at least an input and an output entry");
  }
  for (int s : sizes) {
    if (s <= 0) throw InvalidArchitecture("layer_sizes entries must be positive");
  }
  if (sizes.back() != 1) throw InvalidArchitecture("the output layer must have width 1");
}

int num_blocks(int d_in, JetOrder order) {
  int blocks = 1;
  if (order != JetOrder::Value) blocks += d_in;
  if (order == JetOrder::Laplacian) blocks += 1;
  return blocks;
}

}  // namespace

ActivationDerivs activate(Activation act, double z) {
  if (act == Activation::Tanh) {
    const double t = std::tanh(z);
    const double d1 = 1.0 - t * t;
    return {t, d1, -2.0 * t * d1, (6.0 * t * t - 2.0) * d1};
  }
  if (z <= 0.0) return {0.0, 0.0, 0.0, 0.0};
  return {z * z * z / 6.0, 0.5 * z * z, z, 1.0};
}

std::size_t parameter_count(const std::vector<int>& sizes) {
  validate_architecture(sizes);
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    n += static_cast<std::size_t>(sizes[l + 1]) * static_cast<std::size_t>(sizes[l]) +
         static_cast<std::size_t>(sizes[l + 1]);
  }
  return n;
}

NetworkParams::NetworkParams(std::vector<int> layer_sizes, Activation activation)
    : layer_sizes_(std::move(layer_sizes)), activation_(activation) {
  validate_architecture(layer_sizes_);
  std::size_t offset = 0;
  for (int l = 0; l < num_layers(); ++l) {
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(layer_sizes_[l + 1]) * (layer_sizes_[l] + 1);
  }
  data_.assign(offset, 0.0);
}

std::size_t NetworkParams::bias_offset(int layer) const {
  return offsets_[layer] +
         static_cast<std::size_t>(layer_sizes_[layer + 1]) * layer_sizes_[layer];
}

Eigen::Map<RowMajorMatrix> NetworkParams::weights(int layer) {
  return {data_.data() + offsets_[layer], layer_sizes_[layer + 1], layer_sizes_[layer]};
}

Eigen::Map<const RowMajorMatrix> NetworkParams::weights(int layer) const {
  return {data_.data() + offsets_[layer], layer_sizes_[layer + 1], layer_sizes_[layer]};
}

Eigen::Map<Eigen::VectorXd> NetworkParams::biases(int layer) {
  return {data_.data() + bias_offset(layer), layer_sizes_[layer + 1]};
}

Eigen::Map<const Eigen::VectorXd> NetworkParams::biases(int layer) const {
  return {data_.data() + bias_offset(layer), layer_sizes_[layer + 1]};
}

NetworkParams init_params(std::uint64_t seed, const std::vector<int>& layer_sizes,
                          Activation activation) {
  NetworkParams params(layer_sizes, activation);
  Rng rng = Rng::derived(seed, kInitStream);
  for (int l = 0; l < params.num_layers(); ++l) {
    const double fan_in = layer_sizes[l];
    const double fan_out = layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    auto w = params.weights(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
    }
  }
  return params;
}

ParamGradient& ParamGradient::operator+=(const ParamGradient& other) {
  if (other.values.size() != values.size()) {
    throw DimensionMismatch("ParamGradient sizes differ");
  }
  values += other.values;
  return *this;
}

ParamGradient& ParamGradient::operator*=(double s) {
  values *= s;
  return *this;
}

Jet JetBatch::at(Eigen::Index i) const {
  Jet jet;
  jet.value = value(i);
  jet.gradient = gradient.size() ? Eigen::VectorXd(gradient.col(i)) : Eigen::VectorXd();
  jet.laplacian = laplacian.size() ? laplacian(i) : 0.0;
  return jet;
}

JetAdjointBatch JetAdjointBatch::zeros(Eigen::Index d_in, Eigen::Index n) {
  return {Eigen::RowVectorXd::Zero(n), Eigen::MatrixXd::Zero(d_in, n),
          Eigen::RowVectorXd::Zero(n)};
}

void forward_batch_into(const NetworkParams& params, const Eigen::MatrixXd& points,
                        const std::vector<bool>& lap_mask, JetOrder order, ForwardTape& tape) {
  const int d = params.input_dim();
  if (points.rows() != d) {
    throw DimensionMismatch("points have " + std::to_string(points.rows()) +
                            " rows, network expects " + std::to_string(d));
  }
  if (static_cast<int>(lap_mask.size()) != d) {
    throw DimensionMismatch("laplacian mask length differs from input dimension");
  }
  const Eigen::Index n = points.cols();
  const int blocks = num_blocks(d, order);
  const bool grad = order != JetOrder::Value;
  const bool lap = order == JetOrder::Laplacian;
  const int layers = params.num_layers();
  const bool tanh_act = params.activation() == Activation::Tanh;

  tape.order_ = order;
  tape.n_ = n;
  tape.mask_ = lap_mask;
  tape.inputs_.resize(static_cast<std::size_t>(layers));
  tape.pre_.resize(static_cast<std::size_t>(layers - 1));
  tape.d1_.resize(static_cast<std::size_t>(layers - 1));
  tape.d2_.resize(static_cast<std::size_t>(layers - 1));
  tape.d3_.resize(static_cast<std::size_t>(layers - 1));

  Eigen::MatrixXd& input = tape.inputs_[0];
  input.setZero(d, n * blocks);
  input.leftCols(n) = points;
  if (grad) {
    for (int j = 0; j < d; ++j) input.block(j, (1 + j) * n, 1, n).setOnes();
  }

  Eigen::MatrixXd z_out;
  for (int l = 0; l < layers; ++l) {
    const auto w = params.weights(l);
    const Eigen::Index m = w.rows();
    const bool hidden = l < layers - 1;
    Eigen::MatrixXd& z = hidden ? tape.pre_[static_cast<std::size_t>(l)] : z_out;
    z.resize(m, n * blocks);
    z.noalias() = w * tape.inputs_[static_cast<std::size_t>(l)];
    z.leftCols(n).colwise() += params.biases(l);

    if (!hidden) {
      JetBatch& jets = tape.jets_;
      jets.value = z.leftCols(n);
      if (grad) {
        jets.gradient.resize(d, n);
        for (int j = 0; j < d; ++j) jets.gradient.row(j) = z.middleCols((1 + j) * n, n);
      } else {
        jets.gradient.resize(0, 0);
      }
      if (lap) {
        jets.laplacian = z.rightCols(n);
      } else {
        jets.laplacian.setZero(n);
      }
      break;
    }

    Eigen::ArrayXXd& d1 = tape.d1_[static_cast<std::size_t>(l)];
    Eigen::ArrayXXd& d2 = tape.d2_[static_cast<std::size_t>(l)];
    Eigen::ArrayXXd& d3 = tape.d3_[static_cast<std::size_t>(l)];
    d1.resize(m, n);
    d2.resize(m, n);
    if (lap) d3.resize(m, n);
    Eigen::MatrixXd& next = tape.inputs_[static_cast<std::size_t>(l + 1)];
    next.resize(m, n * blocks);

    // Values and derivative tables.
    const auto z0 = z.leftCols(n).array();
    if (tanh_act) {
      // Eigen's double tanh is scalar; exp vectorizes.
      next.leftCols(n).array() = 1.0 - 2.0 / ((2.0 * z0).exp() + 1.0);
      const auto t = next.leftCols(n).array();
      d1 = 1.0 - t.square();
      d2 = -2.0 * t * d1;
      if (lap) d3 = (6.0 * t.square() - 2.0) * d1;
    } else {
      const auto zp = z0.max(0.0);
      next.leftCols(n).array() = zp.cube() * (1.0 / 6.0);
      d1 = 0.5 * zp.square();
      d2 = zp;
      if (lap) d3 = (z0 > 0.0).cast<double>();
    }
    if (!grad) continue;

    // Gradient and Laplacian blocks, one point column at a time.
    for (Eigen::Index c = 0; c < n; ++c) {
      const double* d1c = d1.data() + c * m;
      const double* d2c = d2.data() + c * m;
      double* lap_out = lap ? next.data() + ((1 + d) * n + c) * m : nullptr;
      const double* lap_in = lap ? z.data() + ((1 + d) * n + c) * m : nullptr;
      if (lap) {
        for (Eigen::Index r = 0; r < m; ++r) lap_out[r] = d1c[r] * lap_in[r];
      }
      for (int j = 0; j < d; ++j) {
        const double* gz = z.data() + ((1 + j) * n + c) * m;
        double* g_out = next.data() + ((1 + j) * n + c) * m;
        for (Eigen::Index r = 0; r < m; ++r) g_out[r] = d1c[r] * gz[r];
        if (lap && lap_mask[static_cast<std::size_t>(j)]) {
          for (Eigen::Index r = 0; r < m; ++r) lap_out[r] += d2c[r] * gz[r] * gz[r];
        }
      }
    }
  }
}

ForwardTape forward_batch(const NetworkParams& params, const Eigen::MatrixXd& points,
                          const std::vector<bool>& lap_mask, JetOrder order) {
  ForwardTape tape;
  forward_batch_into(params, points, lap_mask, order, tape);
  return tape;
}

void pullback_batch_into(const NetworkParams& params, const ForwardTape& tape,
                         const JetAdjointBatch& adjoint, ParamGradient& grad_out) {
  const int d = params.input_dim();
  const Eigen::Index n = tape.n_;
  const JetOrder order = tape.order_;
  const bool grad = order != JetOrder::Value;
  const bool lap = order == JetOrder::Laplacian;
  const int blocks = num_blocks(d, order);
  if (adjoint.value_bar.size() != n ||
      (grad && (adjoint.gradient_bar.rows() != d || adjoint.gradient_bar.cols() != n)) ||
      (lap && adjoint.laplacian_bar.size() != n)) {
    throw DimensionMismatch("adjoint batch shape does not match the forward tape");
  }
  if (grad_out.size() != params.size()) {
    throw DimensionMismatch("gradient accumulator has the wrong length");
  }

  const int layers = params.num_layers();
  Eigen::MatrixXd& zbar = tape.zbar_;
  Eigen::MatrixXd& sbar = tape.sbar_;
  zbar.resize(1, n * blocks);
  zbar.leftCols(n) = adjoint.value_bar;
  if (grad) {
    for (int j = 0; j < d; ++j) zbar.middleCols((1 + j) * n, n) = adjoint.gradient_bar.row(j);
  }
  if (lap) zbar.rightCols(n) = adjoint.laplacian_bar;

  for (int l = layers - 1; l >= 0; --l) {
    const auto w = params.weights(l);
    Eigen::Map<RowMajorMatrix> dw(grad_out.values.data() + params.weight_offset(l), w.rows(),
                                  w.cols());
    Eigen::Map<Eigen::VectorXd> db(grad_out.values.data() + params.bias_offset(l), w.rows());
    dw.noalias() += zbar * tape.inputs_[static_cast<std::size_t>(l)].transpose();
    db += zbar.leftCols(n).rowwise().sum();
    if (l == 0) break;

    // Adjoints of hidden layer l-1's outputs, then back through its
    // activation, in place: sbar becomes the pre-activation adjoint.
    sbar.resize(w.cols(), n * blocks);
    sbar.noalias() = w.transpose() * zbar;
    const std::size_t h = static_cast<std::size_t>(l - 1);
    const Eigen::MatrixXd& z = tape.pre_[h];
    const Eigen::Index m = z.rows();
    if (grad) {
      for (Eigen::Index c = 0; c < n; ++c) {
        const double* d1c = tape.d1_[h].data() + c * m;
        const double* d2c = tape.d2_[h].data() + c * m;
        double* hb = sbar.data() + c * m;
        double* lb = lap ? sbar.data() + ((1 + d) * n + c) * m : nullptr;
        // Value adjoint: s' * hbar + s'' * sum_j gz_j * gbar_j (+ Laplacian terms).
        double* acc = hb;
        for (Eigen::Index r = 0; r < m; ++r) acc[r] *= d1c[r];
        if (lap) {
          const double* d3c = tape.d3_[h].data() + c * m;
          const double* lz = z.data() + ((1 + d) * n + c) * m;
          for (Eigen::Index r = 0; r < m; ++r) acc[r] += lb[r] * d2c[r] * lz[r];
          for (int j = 0; j < d; ++j) {
            if (!tape.mask_[static_cast<std::size_t>(j)]) continue;
            const double* gz = z.data() + ((1 + j) * n + c) * m;
            for (Eigen::Index r = 0; r < m; ++r) acc[r] += lb[r] * d3c[r] * gz[r] * gz[r];
          }
        }
        for (int j = 0; j < d; ++j) {
          const double* gz = z.data() + ((1 + j) * n + c) * m;
          double* gb = sbar.data() + ((1 + j) * n + c) * m;
          for (Eigen::Index r = 0; r < m; ++r) acc[r] += d2c[r] * gz[r] * gb[r];
          for (Eigen::Index r = 0; r < m; ++r) gb[r] *= d1c[r];
          if (lap && tape.mask_[static_cast<std::size_t>(j)]) {
            for (Eigen::Index r = 0; r < m; ++r) gb[r] += 2.0 * d2c[r] * gz[r] * lb[r];
          }
        }
        if (lap) {
          for (Eigen::Index r = 0; r < m; ++r) lb[r] *= d1c[r];
        }
      }
    } else {
      sbar.array() *= tape.d1_[h];
    }
    zbar.swap(sbar);
  }
}

ParamGradient pullback_batch(const NetworkParams& params, const ForwardTape& tape,
                             const JetAdjointBatch& adjoint) {
  ParamGradient g(params.size());
  pullback_batch_into(params, tape, adjoint, g);
  return g;
}

Jet forward_jet(const NetworkParams& params, std::span<const double> x,
                const std::vector<bool>& lap_mask) {
  if (static_cast<int>(x.size()) != params.input_dim()) {
    throw DimensionMismatch("input point has the wrong dimension");
  }
  const Eigen::MatrixXd point =
      Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  return forward_batch(params, point, lap_mask, JetOrder::Laplacian).jets().at(0);
}

ParamGradient pullback(const NetworkParams& params, std::span<const double> x,
                       const std::vector<bool>& lap_mask, const JetAdjoint& adjoint) {
  if (static_cast<int>(x.size()) != params.input_dim()) {
    throw DimensionMismatch("input point has the wrong dimension");
  }
  if (adjoint.gradient_bar.size() != params.input_dim()) {
    throw DimensionMismatch("gradient_bar has the wrong dimension");
  }
  const Eigen::MatrixXd point =
      Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  const ForwardTape tape = forward_batch(params, point, lap_mask, JetOrder::Laplacian);
  JetAdjointBatch seed;
  seed.value_bar = Eigen::RowVectorXd::Constant(1, adjoint.value_bar);
  seed.gradient_bar = adjoint.gradient_bar;
  seed.laplacian_bar = Eigen::RowVectorXd::Constant(1, adjoint.laplacian_bar);
  return pullback_batch(params, tape, seed);
}

}  // namespace ssbe
