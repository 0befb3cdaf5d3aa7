#pragma once

// Independent reference checks shared by the unit and acceptance suites.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtlstm/blocks.hpp"
#include "rtlstm/nn/model.hpp"
#include "rtlstm/nn/network.hpp"
#include "rtlstm/rng.hpp"
#include "rtlstm/trace.hpp"

namespace oracle {

inline bool ends_block(std::string_view opcode) {
  return (!opcode.empty() && opcode.front() == 'j') || opcode == "call" || opcode == "ret" ||
         opcode == "retn" || opcode == "retf";
}

/// Empty string when all block invariants hold, otherwise the first failure.
inline std::string check_segmentation(std::span<const rtlstm::Instruction> input,
                                      std::span<const rtlstm::BasicBlock> blocks) {
  std::vector<rtlstm::Instruction> joined;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& ins = blocks[b].instructions;
    if (ins.empty()) return "empty block " + std::to_string(b);
    for (std::size_t k = 0; k + 1 < ins.size(); ++k) {
      if (ends_block(ins[k].opcode)) return "terminator inside block " + std::to_string(b);
    }
    if (b + 1 < blocks.size() && !ends_block(ins.back().opcode)) {
      return "block " + std::to_string(b) + " does not end in a terminator";
    }
    joined.insert(joined.end(), ins.begin(), ins.end());
  }
  if (joined.size() != input.size() || !std::equal(joined.begin(), joined.end(), input.begin())) {
    return "concatenation differs from input";
  }
  std::size_t terminators = 0;
  for (const auto& ins : input) terminators += ends_block(ins.opcode) ? 1 : 0;
  const std::size_t expected =
      terminators + ((!input.empty() && !ends_block(input.back().opcode)) ? 1 : 0);
  if (blocks.size() != expected) {
    return "block count " + std::to_string(blocks.size()) + " != " + std::to_string(expected);
  }
  return {};
}

inline double relative_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale < 1e-7) return std::abs(analytic - numeric) <= 1e-9 ? 0.0 : 1.0;
  return std::abs(analytic - numeric) / scale;
}

struct GradCheckResult {
  std::array<double, rtlstm::kTensorCount> max_error{};
  std::size_t checked = 0;
  double worst() const { return *std::max_element(max_error.begin(), max_error.end()); }
};

inline rtlstm::ModelConfig toy_config(std::uint64_t seed) {
  rtlstm::ModelConfig c;
  c.vocab_size = 10;
  c.embed_dim = 4;
  c.hidden = 3;
  c.maxlen = 5;
  c.dense_hidden = 6;
  c.dropout_rate = 0.2;
  c.seed = seed;
  return c;
}

/// Central differences (step h) on every parameter of the toy model against
/// backward(), with a fixed dropout mask and a batch of 4 random sequences.
inline GradCheckResult gradient_check(std::uint64_t seed, double h = 1e-4) {
  using namespace rtlstm;
  const ModelConfig config = toy_config(seed);
  ModelParams params = init_params(config);
  Rng rng(derive_seed(seed, 99));
  // Spread biases away from zero so every gate and unit is exercised.
  for (auto* bias : {&params.forward.bias, &params.backward.bias, &params.dense1_bias,
                     &params.dense2_bias}) {
    for (Eigen::Index j = 0; j < bias->size(); ++j) (*bias)(j) += rng.uniform(-0.3, 0.3);
  }

  Batch batch;
  batch.size = 4;
  batch.length = config.maxlen;
  for (std::size_t b = 0; b < batch.size; ++b) {
    const std::size_t len = 1 + rng.below(config.maxlen);
    for (std::size_t t = 0; t < batch.length; ++t) {
      batch.tokens.push_back(t < len ? static_cast<std::int32_t>(1 + rng.below(config.vocab_size - 2))
                                     : 0);
    }
    batch.labels.push_back(b % 2 == 0 ? Label::Malicious : Label::Benign);
  }
  const Matrix mask = dropout_mask(static_cast<Eigen::Index>(batch.size),
                                   static_cast<Eigen::Index>(config.pooled_width()),
                                   config.dropout_rate, rng);

  const auto loss_at = [&](const ModelParams& p) {
    return batch_loss(forward(p, batch, &mask).probs, batch.labels);
  };
  const ModelParams grads = backward(params, forward(params, batch, &mask), batch);

  GradCheckResult result;
  auto values = tensor_data(params);
  const auto analytic = tensor_data(grads);
  for (std::size_t k = 0; k < kTensorCount; ++k) {
    for (std::size_t i = 0; i < values[k].size(); ++i) {
      const double saved = values[k][i];
      values[k][i] = saved + h;
      const double plus = loss_at(params);
      values[k][i] = saved - h;
      const double minus = loss_at(params);
      values[k][i] = saved;
      const double numeric = (plus - minus) / (2.0 * h);
      result.max_error[k] = std::max(result.max_error[k], relative_error(analytic[k][i], numeric));
      ++result.checked;
    }
  }
  return result;
}

}  // namespace oracle
