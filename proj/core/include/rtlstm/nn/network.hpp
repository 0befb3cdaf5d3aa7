#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rtlstm/dataset.hpp"
#include "rtlstm/nn/layers.hpp"
#include "rtlstm/nn/model.hpp"
#include "rtlstm/trace.hpp"
#include "rtlstm/vocab.hpp"

namespace rtlstm {

/// Token ids of `size` equal-length sequences, row-major, plus labels when
/// the batch is used for training.
struct Batch {
  std::size_t size = 0;
  std::size_t length = 0;
  std::vector<std::int32_t> tokens;
  std::vector<Label> labels;

  std::int32_t token(std::size_t b, std::size_t t) const { return tokens[b * length + t]; }
};

Batch make_batch(std::span<const LabeledSequence> data, std::span<const std::size_t> indices);
Batch make_batch(std::span<const LabeledSequence> data);
Batch make_batch(std::span<const TokenSequence> sequences);

/// Activations kept for the backward pass.
struct ForwardCache {
  struct Direction {
    // Indexed by timestep t (not by processing order).
    std::vector<Matrix> gates;   // B x 4H, activated (i, f, g, o)
    std::vector<Matrix> cell;    // B x H
    std::vector<Matrix> tanh_c;  // B x H
    std::vector<Matrix> hidden;  // B x H
  };
  Direction forward;
  Direction backward;
  Matrix pooled;                               // B x 2H
  std::vector<std::int32_t> argmax;            // B x 2H, winning timestep
  Matrix mask;                                 // B x 2H, empty in infer mode
  Matrix dropped;                              // pooled (masked)
  Matrix dense1_pre;                           // B x dense_hidden
  Matrix dense1_out;                           // after ReLU
  Matrix probs;                                // B x 2, sigmoid outputs
};

/// Batched forward pass. `dropout_mask` (B x 2H) switches on training-mode
/// dropout; pass nullptr for inference. Throws IndexOutOfVocab.
ForwardCache forward(const ModelParams& params, const Batch& batch,
                     const Matrix* dropout_mask = nullptr);

/// Same, reusing the storage already held by `cache`.
void forward(const ModelParams& params, const Batch& batch, const Matrix* dropout_mask,
             ForwardCache& cache);

/// Inference-mode probabilities, B x 2 (column 0 benign, column 1 malicious).
Matrix predict(const ModelParams& params, const Batch& batch);

/// One sequence through the whole stack. In Train phase dropout is drawn
/// from `rng` at the model's configured rate; Infer phase is mask-free.
RowVector model_forward(const Model& model, const TokenSequence& sequence, Phase phase,
                        Rng* rng = nullptr);

/// Argmax over the two sigmoid outputs; ties go to benign.
Label predicted_label(double benign_score, double malicious_score) noexcept;

inline constexpr double kProbabilityClamp = 1e-7;

/// Mean over outputs of -[y ln p + (1-y) ln(1-p)], p clamped to
/// [1e-7, 1-1e-7].
double bce_loss(const RowVector& prediction, const RowVector& target);

/// One-hot target for a label: benign (1, 0), malicious (0, 1).
RowVector one_hot(Label label);

/// Mean bce_loss over the batch.
double batch_loss(const Matrix& probs, std::span<const Label> labels);

/// Gradients of the mean batch loss with respect to every parameter, by
/// backpropagation through the dense head, the max-pool routing and both
/// LSTM directions across all timesteps.
ModelParams backward(const ModelParams& params, const ForwardCache& cache, const Batch& batch);

}  // namespace rtlstm
