#include "rtlstm/nn/adam.hpp"

#include <cmath>

#include "rtlstm/error.hpp"

namespace rtlstm {

AdamState AdamState::zeros_like(const ModelParams& params) {
  AdamState state;
  state.first_moment = params;
  state.second_moment = params;
  for (auto values : tensor_data(state.first_moment)) std::fill(values.begin(), values.end(), 0.0);
  for (auto values : tensor_data(state.second_moment)) std::fill(values.begin(), values.end(), 0.0);
  return state;
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const AdamConfig& config) {
  if (!same_shapes(params, grads) || !same_shapes(params, state.first_moment) ||
      !same_shapes(params, state.second_moment)) {
    throw Error(ErrorCode::ShapeMismatch, "adam_step: parameter, gradient and state shapes differ");
  }
  ++state.step;
  const auto t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);

  const auto p = tensor_data(params);
  const auto g = tensor_data(grads);
  const auto m = tensor_data(state.first_moment);
  const auto v = tensor_data(state.second_moment);
  for (std::size_t k = 0; k < kTensorCount; ++k) {
    for (std::size_t i = 0; i < p[k].size(); ++i) {
      const double grad = g[k][i];
      m[k][i] = config.beta1 * m[k][i] + (1.0 - config.beta1) * grad;
      v[k][i] = config.beta2 * v[k][i] + (1.0 - config.beta2) * grad * grad;
      const double m_hat = m[k][i] / correction1;
      const double v_hat = v[k][i] / correction2;
      p[k][i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace rtlstm
