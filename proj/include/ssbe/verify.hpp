#pragma once

/// @file verify.hpp
/// @brief Finite-difference self-check of the jet engine on random networks.

#include <cstdint>

namespace ssbe {

struct AutodiffCheck {
  int nets = 0;
  /// Max normwise relative error of gradient and Laplacian against central
  /// differences (the Laplacian is differenced from the exact gradient).
  double max_jet_error = 0.0;
  /// Max normwise relative error of pullback against central differences of
  /// the adjoint-weighted jet.
  double max_param_error = 0.0;
};

/// Random nets: both activations, 1-3 hidden layers of width 1-32, input
/// dimension from {1, 2, 5, 10}.
AutodiffCheck verify_autodiff(std::uint64_t seed, int n_nets = 50);

}  // namespace ssbe
