#pragma once

/// @file diffnet.hpp
/// @brief Dense MLPs with exact propagation of value, input gradient and
/// masked input Laplacian, plus exact parameter gradients of any
/// adjoint-weighted combination of those quantities.
///
/// The forward pass carries, for every hidden unit, the triple
/// (h, dh/dx_j for all j, sum_{j in mask} d2h/dx_j^2). An affine layer maps
/// the three parts linearly; an elementwise activation maps
///
///   lap_out = s'(z) * lap_in + s''(z) * sum_{j in mask} (dz/dx_j)^2.
///
/// All sample points of a batch are stacked column-wise so that every layer
/// is a single matrix product over [values | gradients | laplacians].

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace ssbe {

enum class Activation { Tanh, Relu3Sixth };

/// Activation value and its first three derivatives at one point.
struct ActivationDerivs {
  double value;
  double d1;
  double d2;
  double d3;
};

ActivationDerivs activate(Activation act, double z);

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Weights and biases of a fully connected network stored in one flat
/// vector: layer by layer, weights row-major followed by biases.
class NetworkParams {
 public:
  NetworkParams(std::vector<int> layer_sizes, Activation activation);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  Activation activation() const { return activation_; }
  int input_dim() const { return layer_sizes_.front(); }
  /// Number of affine layers (hidden layers + output layer).
  int num_layers() const { return static_cast<int>(layer_sizes_.size()) - 1; }
  std::size_t size() const { return data_.size(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Eigen::Map<RowMajorMatrix> weights(int layer);
  Eigen::Map<const RowMajorMatrix> weights(int layer) const;
  Eigen::Map<Eigen::VectorXd> biases(int layer);
  Eigen::Map<const Eigen::VectorXd> biases(int layer) const;

  /// Offset of layer `layer`'s weights inside data().
  std::size_t weight_offset(int layer) const { return offsets_[layer]; }
  std::size_t bias_offset(int layer) const;

  bool operator==(const NetworkParams&) const = default;

 private:
  std::vector<int> layer_sizes_;
  Activation activation_;
  std::vector<std::size_t> offsets_;
  std::vector<double, Eigen::aligned_allocator<double>> data_;
};

/// Total parameter count for an architecture.
std::size_t parameter_count(const std::vector<int>& layer_sizes);

/// Glorot-uniform weights, zero biases. Deterministic in `seed`.
NetworkParams init_params(std::uint64_t seed, const std::vector<int>& layer_sizes,
                          Activation activation);

/// Value, input gradient and masked Laplacian of a scalar field at a point.
struct Jet {
  double value = 0.0;
  Eigen::VectorXd gradient;
  double laplacian = 0.0;
};

/// Adjoint seeds for the components of a Jet.
struct JetAdjoint {
  double value_bar = 0.0;
  Eigen::VectorXd gradient_bar;
  double laplacian_bar = 0.0;
};

/// d(loss)/d(theta), aligned one-to-one with NetworkParams::data().
struct ParamGradient {
  Eigen::VectorXd values;

  ParamGradient() = default;
  explicit ParamGradient(std::size_t n) : values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  ParamGradient& operator+=(const ParamGradient& other);
  ParamGradient& operator*=(double s);
  friend ParamGradient operator+(ParamGradient a, const ParamGradient& b) { return a += b; }
  friend ParamGradient operator*(double s, ParamGradient a) { return a *= s; }
};

Jet forward_jet(const NetworkParams& params, std::span<const double> x,
                const std::vector<bool>& lap_mask);

ParamGradient pullback(const NetworkParams& params, std::span<const double> x,
                       const std::vector<bool>& lap_mask, const JetAdjoint& adjoint);

inline Jet forward_jet(const NetworkParams& params, const Eigen::VectorXd& x,
                       const std::vector<bool>& lap_mask) {
  return forward_jet(params, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), lap_mask);
}

inline ParamGradient pullback(const NetworkParams& params, const Eigen::VectorXd& x,
                              const std::vector<bool>& lap_mask, const JetAdjoint& adjoint) {
  return pullback(params, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), lap_mask,
                  adjoint);
}

// ---------------------------------------------------------------------------
// Batched interface
// ---------------------------------------------------------------------------

/// How much of the jet a batch evaluation needs.
enum class JetOrder { Value = 0, Gradient = 1, Laplacian = 2 };

/// Jets of N points. gradient is d_in x N.
struct JetBatch {
  Eigen::RowVectorXd value;
  Eigen::MatrixXd gradient;
  Eigen::RowVectorXd laplacian;

  Eigen::Index size() const { return value.size(); }
  Jet at(Eigen::Index i) const;
};

/// Adjoints of N jets, same shapes as JetBatch. Components not computed by
/// the matching forward order are ignored.
struct JetAdjointBatch {
  Eigen::RowVectorXd value_bar;
  Eigen::MatrixXd gradient_bar;
  Eigen::RowVectorXd laplacian_bar;

  static JetAdjointBatch zeros(Eigen::Index d_in, Eigen::Index n);
};

/// Intermediate state of a batched forward pass, kept for pullback_batch.
class ForwardTape {
 public:
  const JetBatch& jets() const { return jets_; }
  JetOrder order() const { return order_; }
  Eigen::Index batch_size() const { return n_; }

 private:
  friend void forward_batch_into(const NetworkParams&, const Eigen::MatrixXd&,
                                 const std::vector<bool>&, JetOrder, ForwardTape&);
  friend void pullback_batch_into(const NetworkParams&, const ForwardTape&,
                                  const JetAdjointBatch&, ParamGradient&);

  JetOrder order_ = JetOrder::Value;
  Eigen::Index n_ = 0;
  std::vector<bool> mask_;
  // Per affine layer: stacked input [h | g_1..g_d | lap] (in x N*blocks).
  std::vector<Eigen::MatrixXd> inputs_;
  // Per hidden layer: stacked pre-activation and activation derivatives.
  std::vector<Eigen::MatrixXd> pre_;
  std::vector<Eigen::ArrayXXd> d1_, d2_, d3_;
  JetBatch jets_;
  // Backward scratch, reused across pullbacks of this tape.
  mutable Eigen::MatrixXd zbar_, sbar_;
};

/// Forward pass over the columns of `points` (d_in x N).
ForwardTape forward_batch(const NetworkParams& params, const Eigen::MatrixXd& points,
                          const std::vector<bool>& lap_mask, JetOrder order);

/// Same, reusing the storage of an existing tape (no reallocation when the
/// shapes repeat, as in a training loop).
void forward_batch_into(const NetworkParams& params, const Eigen::MatrixXd& points,
                        const std::vector<bool>& lap_mask, JetOrder order, ForwardTape& tape);

/// Accumulates d/dtheta of sum_i <adjoint_i, jet_i> into `grad`.
void pullback_batch_into(const NetworkParams& params, const ForwardTape& tape,
                         const JetAdjointBatch& adjoint, ParamGradient& grad);

ParamGradient pullback_batch(const NetworkParams& params, const ForwardTape& tape,
                             const JetAdjointBatch& adjoint);

}  // namespace ssbe
