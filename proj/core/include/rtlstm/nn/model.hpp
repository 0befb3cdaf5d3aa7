#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "rtlstm/sequence_mode.hpp"

namespace rtlstm {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

/// Shape and hyperparameters of the classifier:
/// embedding -> BiLSTM -> global max pool -> dropout -> dense+ReLU -> dense+sigmoid.
struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 32;
  std::size_t hidden = 64;  // LSTM units per direction
  std::size_t maxlen = 30;
  double dropout_rate = 0.2;
  std::size_t dense_hidden = 64;
  std::size_t num_outputs = 2;  // [benign score, malicious score]
  std::uint64_t seed = 0;
  SequenceMode mode = SequenceMode::Bsm;

  /// Width of the pooled BiLSTM features (both directions concatenated).
  std::size_t pooled_width() const noexcept { return 2 * hidden; }

  /// Throws InvalidConfig on zero dimensions, num_outputs != 2 or a dropout
  /// rate outside [0, 1).
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// One LSTM direction. Gate blocks are packed along the columns in the
/// order input, forget, cell, output.
struct LstmWeights {
  Matrix kernel;     // embed_dim x 4*hidden
  Matrix recurrent;  // hidden x 4*hidden
  RowVector bias;    // 4*hidden
};

struct ModelParams {
  Matrix embedding;  // vocab_size x embed_dim; row 0 (padding) is trained like any other
  LstmWeights forward;
  LstmWeights backward;
  Matrix dense1_kernel;  // 2*hidden x dense_hidden
  RowVector dense1_bias;
  Matrix dense2_kernel;  // dense_hidden x 2
  RowVector dense2_bias;
};

/// A configuration together with its parameters.
struct Model {
  ModelConfig config;
  ModelParams params;
};

inline constexpr std::size_t kTensorCount = 11;

struct TensorInfo {
  std::string_view name;
  std::size_t rank = 0;  // 1 for biases, 2 otherwise
  std::size_t rows = 0;  // 1 for biases
  std::size_t cols = 0;
};

/// Canonical tensor order, used by the optimizer, the checkpoint format and
/// the gradient checker.
std::array<TensorInfo, kTensorCount> tensor_layout(const ModelParams& params);
std::array<std::span<double>, kTensorCount> tensor_data(ModelParams& params);
std::array<std::span<const double>, kTensorCount> tensor_data(const ModelParams& params);

/// All-zero tensors with the shapes implied by `config`.
ModelParams zero_params(const ModelConfig& config);

/// Glorot-uniform embedding and kernels (limit sqrt(6 / (fan_in + fan_out))),
/// zero biases except the LSTM forget gate bias, which is 1. Deterministic
/// per config.seed.
ModelParams init_params(const ModelConfig& config);

bool same_shapes(const ModelParams& a, const ModelParams& b);
bool all_finite(const ModelParams& params);
/// Exact (bitwise) equality of every value.
bool identical(const ModelParams& a, const ModelParams& b);

}  // namespace rtlstm
