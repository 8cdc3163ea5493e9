#pragma once

/// @file losses.hpp
/// @brief PINN and SSBE empirical losses with exact parameter gradients.
///
/// Both losses share the residual, initial and boundary-value terms:
///
///   residual       = mean_i (L u(x_i) - f(x_i))^2
///   initial        = mean_i (u(x_i, 0) - nu(x_i))^2
///   boundary_value = (1/l) sum_r mean_{i in chart r} (u - g)^2
///
/// With equal per-chart counts boundary_value is the plain mean over all
/// boundary samples. SSBE adds
///
///   boundary_tangential = sum_r mean_{i in chart r} m_i sum_alpha (D_alpha[u - g])^2
///
/// where D_alpha differentiates along chart parameter alpha and m_i is the
/// chart metric factor (1 when metric weighting is off). The optional
/// product-form parabolic variant further adds
///
///   boundary_time = mean over (chart sample x time grid) of (u_t - g_t)^2
///
/// and evaluates the boundary terms on the chart-sample x time-grid product.
/// total = residual * w_res + initial * w_init + boundary_value * w_l2
///       + (boundary_tangential + boundary_time) * w_h1.

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "ssbe/diffnet.hpp"
#include "ssbe/geometry.hpp"
#include "ssbe/problems.hpp"
#include "ssbe/sampling.hpp"

namespace ssbe {

enum class LossMethod { PINN, SSBE };

std::string to_string(LossMethod m);
LossMethod loss_method_from_string(const std::string& name);

struct LossWeights {
  double residual = 1.0;
  double initial = 1.0;
  double boundary_l2 = 1.0;
  double boundary_h1 = 1.0;

  /// Weights reproducing the chart-sum normalization used in the analysis,
  /// sum_r mean_r (value^2 + tangential^2): the value term is scaled by the
  /// number of charts.
  static LossWeights chart_sum(const ChartSet& charts);

  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

struct LossOptions {
  LossMethod method = LossMethod::SSBE;
  LossWeights weights;
  /// Product-form parabolic boundary terms including u_t - g_t.
  bool full_parabolic = false;
  /// Overrides every chart's metric_weight flag when set.
  std::optional<bool> metric_weighting;
};

struct LossReport {
  double residual = 0.0;
  double boundary_value = 0.0;
  double boundary_tangential = 0.0;
  double initial = 0.0;
  double boundary_time = 0.0;
  double total = 0.0;

  /// Name of the first non-finite term, if any.
  std::optional<std::string> non_finite_term() const;
};

/// Pointwise field used in place of a network, e.g. an exact-solution oracle.
using JetField = std::function<Jet(const Eigen::VectorXd& x, const std::vector<bool>& mask)>;

/// Precomputes sample points and data values once; evaluates the loss for
/// many parameter vectors. Summation is sequential in sample order, so a
/// fixed sample set gives bit-identical results. Evaluation reuses internal
/// scratch buffers, so one assembler must not be used from two threads at
/// once.
class LossAssembler {
 public:
  LossAssembler(const PdeProblem& problem, const ChartSet& charts, const SampleSet& samples,
                const LossOptions& options);

  LossReport evaluate(const NetworkParams& params) const;
  LossReport evaluate(const JetField& field) const;
  /// Loss and its exact gradient; `grad` is overwritten.
  LossReport evaluate_with_gradient(const NetworkParams& params, ParamGradient& grad) const;

  const LossOptions& options() const { return options_; }

 private:
  enum BlockId { kInteriorBlock = 0, kBoundaryBlock = 1, kInitialBlock = 2, kBlockCount = 3 };
  struct Block {
    Eigen::MatrixXd points;
    JetOrder order = JetOrder::Value;
    bool active = false;
  };

  static constexpr Eigen::Index kInteriorTile = 128;

  void residual_terms(const JetBatch& jb, Eigen::Index offset, JetAdjointBatch* seed,
                      double& sum) const;
  void boundary_terms(const JetBatch& jb, JetAdjointBatch* seed, LossReport& rep) const;
  void initial_terms(const JetBatch& jb, JetAdjointBatch* seed, LossReport& rep) const;
  void finish(double residual_sum, LossReport& rep) const;

  LossOptions options_;
  OperatorCoefficients op_;
  bool time_dependent_;
  int spatial_dim_;
  int input_dim_;
  std::vector<bool> mask_;
  std::array<Block, kBlockCount> blocks_;
  std::vector<Eigen::MatrixXd> interior_tiles_;
  std::vector<Eigen::Index> tile_offsets_;

  Eigen::RowVectorXd forcing_;
  Eigen::RowVectorXd g_value_;
  Eigen::RowVectorXd g_time_;
  Eigen::MatrixXd g_tangential_;  // (d-1) x N_b
  std::vector<Eigen::MatrixXd> tangents_;  // per boundary sample: d x (d-1)
  Eigen::RowVectorXd metric_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> chart_ranges_;
  Eigen::RowVectorXd nu_;

  mutable std::array<ForwardTape, kBlockCount> tapes_;
  mutable std::array<JetAdjointBatch, kBlockCount> seeds_;
};

LossReport pinn_loss(const NetworkParams& params, const PdeProblem& problem,
                     const ChartSet& charts, const SampleSet& samples,
                     const LossWeights& weights = {});

LossReport ssbe_loss(const NetworkParams& params, const PdeProblem& problem,
                     const ChartSet& charts, const SampleSet& samples,
                     const LossWeights& weights = {}, bool full_parabolic = false);

ParamGradient loss_gradient(const NetworkParams& params, const PdeProblem& problem,
                            const ChartSet& charts, const SampleSet& samples, LossMethod method,
                            const LossWeights& weights = {});

}  // namespace ssbe
