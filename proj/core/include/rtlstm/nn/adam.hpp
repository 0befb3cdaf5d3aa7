#pragma once

#include <cstdint>

#include "rtlstm/nn/model.hpp"

namespace rtlstm {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moment estimates, shaped like the parameters.
struct AdamState {
  ModelParams first_moment;
  ModelParams second_moment;
  std::uint64_t step = 0;

  static AdamState zeros_like(const ModelParams& params);
};

/// One bias-corrected Adam update of every parameter:
///   m = b1 m + (1-b1) g,  v = b2 v + (1-b2) g^2,
///   p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps).
/// Throws ShapeMismatch when params, grads and state disagree.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const AdamConfig& config);

}  // namespace rtlstm
