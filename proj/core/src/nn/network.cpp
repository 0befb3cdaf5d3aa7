#include "rtlstm/nn/network.hpp"

#include <algorithm>
#include <cmath>

#include "rtlstm/error.hpp"

namespace rtlstm {

Batch make_batch(std::span<const LabeledSequence> data, std::span<const std::size_t> indices) {
  Batch batch;
  batch.size = indices.size();
  batch.length = indices.empty() ? 0 : data[indices.front()].sequence.indices.size();
  batch.tokens.reserve(batch.size * batch.length);
  batch.labels.reserve(batch.size);
  for (std::size_t i : indices) {
    const auto& seq = data[i].sequence.indices;
    if (seq.size() != batch.length) {
      throw Error(ErrorCode::DimensionMismatch, "batch sequences differ in length");
    }
    batch.tokens.insert(batch.tokens.end(), seq.begin(), seq.end());
    batch.labels.push_back(data[i].label);
  }
  return batch;
}

Batch make_batch(std::span<const LabeledSequence> data) {
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return make_batch(data, all);
}

Batch make_batch(std::span<const TokenSequence> sequences) {
  Batch batch;
  batch.size = sequences.size();
  batch.length = sequences.empty() ? 0 : sequences.front().indices.size();
  for (const auto& seq : sequences) {
    if (seq.indices.size() != batch.length) {
      throw Error(ErrorCode::DimensionMismatch, "batch sequences differ in length");
    }
    batch.tokens.insert(batch.tokens.end(), seq.indices.begin(), seq.indices.end());
  }
  return batch;
}

namespace {

using Index = Eigen::Index;

template <typename Block>
void sigmoid_inplace(Block&& block) {
  block = (1.0 + (-block.array()).exp()).inverse().matrix();
}

template <typename Block>
void tanh_inplace(Block&& block) {
  block = block.array().tanh().matrix();
}

// Runs one LSTM direction over the batch. `table` is embedding * kernel +
// bias (vocab x 4H), so the input contribution of token k is row k.
void run_direction(const Matrix& table, const LstmWeights& weights, const Batch& batch,
                   bool reverse, ForwardCache::Direction& out) {
  const auto B = static_cast<Index>(batch.size);
  const auto T = batch.length;
  const Index H = weights.recurrent.rows();

  out.gates.resize(T);
  out.cell.resize(T);
  out.tanh_c.resize(T);
  out.hidden.resize(T);

  for (std::size_t step = 0; step < T; ++step) {
    const std::size_t t = reverse ? T - 1 - step : step;
    const std::size_t prev = reverse ? t + 1 : t - 1;
    Matrix& z = out.gates[t];
    z.resize(B, 4 * H);
    for (Index b = 0; b < B; ++b) z.row(b) = table.row(batch.token(static_cast<std::size_t>(b), t));
    if (step > 0) z.noalias() += out.hidden[prev] * weights.recurrent;
    sigmoid_inplace(z.leftCols(2 * H));
    tanh_inplace(z.middleCols(2 * H, H));
    sigmoid_inplace(z.rightCols(H));

    Matrix& c = out.cell[t];
    c = z.middleCols(0, H).cwiseProduct(z.middleCols(2 * H, H));
    if (step > 0) c += z.middleCols(H, H).cwiseProduct(out.cell[prev]);
    Matrix& tc = out.tanh_c[t];
    tc = c;
    tanh_inplace(tc);
    out.hidden[t] = z.rightCols(H).cwiseProduct(tc);
  }
}

}  // namespace

ForwardCache forward(const ModelParams& params, const Batch& batch, const Matrix* dropout_mask) {
  ForwardCache cache;
  forward(params, batch, dropout_mask, cache);
  return cache;
}

void forward(const ModelParams& params, const Batch& batch, const Matrix* dropout_mask,
             ForwardCache& cache) {
  const auto B = static_cast<Index>(batch.size);
  const auto T = batch.length;
  const Index H = params.forward.recurrent.rows();
  const Index V = params.embedding.rows();
  if (B == 0 || T == 0) throw Error(ErrorCode::DimensionMismatch, "empty batch");
  for (std::int32_t token : batch.tokens) {
    if (token < 0 || token >= V) {
      throw Error(ErrorCode::IndexOutOfVocab,
                  "token index " + std::to_string(token) + " outside vocabulary of " +
                      std::to_string(V));
    }
  }

  {
    Matrix table = params.embedding * params.forward.kernel;
    table.rowwise() += params.forward.bias;
    run_direction(table, params.forward, batch, false, cache.forward);
  }
  {
    Matrix table = params.embedding * params.backward.kernel;
    table.rowwise() += params.backward.bias;
    run_direction(table, params.backward, batch, true, cache.backward);
  }

  // Global max pool over time; ties keep the earliest timestep.
  cache.pooled.resize(B, 2 * H);
  cache.pooled.leftCols(H) = cache.forward.hidden[0];
  cache.pooled.rightCols(H) = cache.backward.hidden[0];
  cache.argmax.assign(static_cast<std::size_t>(B * 2 * H), 0);
  for (std::size_t t = 1; t < T; ++t) {
    for (Index b = 0; b < B; ++b) {
      const auto* hf = cache.forward.hidden[t].row(b).data();
      const auto* hb = cache.backward.hidden[t].row(b).data();
      double* pooled = cache.pooled.row(b).data();
      std::int32_t* arg = cache.argmax.data() + b * 2 * H;
      for (Index j = 0; j < H; ++j) {
        if (hf[j] > pooled[j]) {
          pooled[j] = hf[j];
          arg[j] = static_cast<std::int32_t>(t);
        }
        if (hb[j] > pooled[H + j]) {
          pooled[H + j] = hb[j];
          arg[H + j] = static_cast<std::int32_t>(t);
        }
      }
    }
  }

  if (dropout_mask != nullptr) {
    if (dropout_mask->rows() != B || dropout_mask->cols() != 2 * H) {
      throw Error(ErrorCode::DimensionMismatch, "dropout mask shape");
    }
    cache.mask = *dropout_mask;
    cache.dropped = cache.pooled.cwiseProduct(cache.mask);
  } else {
    cache.mask.resize(0, 0);
    cache.dropped = cache.pooled;
  }

  cache.dense1_pre = cache.dropped * params.dense1_kernel;
  cache.dense1_pre.rowwise() += params.dense1_bias;
  cache.dense1_out = cache.dense1_pre.cwiseMax(0.0);

  cache.probs = cache.dense1_out * params.dense2_kernel;
  cache.probs.rowwise() += params.dense2_bias;
  sigmoid_inplace(cache.probs);
}

Matrix predict(const ModelParams& params, const Batch& batch) {
  return forward(params, batch, nullptr).probs;
}

RowVector model_forward(const Model& model, const TokenSequence& sequence, Phase phase,
                        Rng* rng) {
  const std::span<const TokenSequence> one(&sequence, 1);
  const Batch batch = make_batch(one);
  if (phase == Phase::Infer || model.config.dropout_rate == 0.0) {
    return predict(model.params, batch).row(0);
  }
  if (rng == nullptr) throw Error(ErrorCode::InvalidConfig, "training-mode forward needs an rng");
  const auto width = static_cast<Eigen::Index>(model.config.pooled_width());
  const Matrix mask = dropout_mask(1, width, model.config.dropout_rate, *rng);
  return forward(model.params, batch, &mask).probs.row(0);
}

Label predicted_label(double benign_score, double malicious_score) noexcept {
  return malicious_score > benign_score ? Label::Malicious : Label::Benign;
}

RowVector one_hot(Label label) {
  RowVector target = RowVector::Zero(2);
  target(label == Label::Malicious ? 1 : 0) = 1.0;
  return target;
}

double bce_loss(const RowVector& prediction, const RowVector& target) {
  double total = 0.0;
  for (Index k = 0; k < prediction.cols(); ++k) {
    const double p = std::clamp(prediction(k), kProbabilityClamp, 1.0 - kProbabilityClamp);
    const double y = target(k);
    total -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  return total / static_cast<double>(prediction.cols());
}

double batch_loss(const Matrix& probs, std::span<const Label> labels) {
  double total = 0.0;
  for (Index b = 0; b < probs.rows(); ++b) {
    total += bce_loss(probs.row(b), one_hot(labels[static_cast<std::size_t>(b)]));
  }
  return total / static_cast<double>(probs.rows());
}

namespace {

// BPTT for one direction. The pooled-layer gradient `d_pooled` (B x H for
// this direction) enters h(t) wherever `argmax` selected timestep t.
// Accumulates the recurrent kernel gradient and the per-token input gradient
// table `token_grad` (vocab x 4H).
void backprop_direction(const LstmWeights& weights, const ForwardCache::Direction& cache,
                        const Batch& batch, bool reverse, const Matrix& d_pooled,
                        const std::int32_t* argmax, Index arg_stride, Matrix& recurrent_grad,
                        Matrix& token_grad) {
  const auto B = static_cast<Index>(batch.size);
  const auto T = batch.length;
  const Index H = weights.recurrent.rows();

  Matrix dh = Matrix::Zero(B, H);
  Matrix dc_next = Matrix::Zero(B, H);
  Matrix dc(B, H);
  Matrix dz(B, 4 * H);

  for (std::size_t step = T; step-- > 0;) {
    const std::size_t t = reverse ? T - 1 - step : step;
    const bool has_prev = step > 0;
    const std::size_t prev = reverse ? t + 1 : t - 1;

    const auto winner = static_cast<std::int32_t>(t);
    for (Index b = 0; b < B; ++b) {
      const std::int32_t* arg = argmax + b * arg_stride;
      for (Index j = 0; j < H; ++j) {
        if (arg[j] == winner) dh(b, j) += d_pooled(b, j);
      }
    }

    const Matrix& gates = cache.gates[t];
    const auto i = gates.middleCols(0, H).array();
    const auto f = gates.middleCols(H, H).array();
    const auto g = gates.middleCols(2 * H, H).array();
    const auto o = gates.middleCols(3 * H, H).array();
    const auto tc = cache.tanh_c[t].array();

    dc = (dh.array() * o * (1.0 - tc.square()) + dc_next.array()).matrix();

    dz.middleCols(0, H) = (dc.array() * g * i * (1.0 - i)).matrix();
    if (has_prev) {
      dz.middleCols(H, H) = (dc.array() * cache.cell[prev].array() * f * (1.0 - f)).matrix();
    } else {
      dz.middleCols(H, H).setZero();
    }
    dz.middleCols(2 * H, H) = (dc.array() * i * (1.0 - g.square())).matrix();
    dz.middleCols(3 * H, H) = (dh.array() * tc * o * (1.0 - o)).matrix();

    for (Index b = 0; b < B; ++b) token_grad.row(batch.token(static_cast<std::size_t>(b), t)) += dz.row(b);

    if (has_prev) {
      recurrent_grad.noalias() += cache.hidden[prev].transpose() * dz;
      dh.noalias() = dz * weights.recurrent.transpose();
      dc_next = dc.cwiseProduct(gates.middleCols(H, H));
    }
  }
}

}  // namespace

ModelParams backward(const ModelParams& params, const ForwardCache& cache, const Batch& batch) {
  const auto B = static_cast<Index>(batch.size);
  const Index H = params.forward.recurrent.rows();
  const Index V = params.embedding.rows();
  if (batch.labels.size() != batch.size || cache.probs.rows() != B) {
    throw Error(ErrorCode::DimensionMismatch, "backward: batch and cache disagree");
  }

  ModelParams grads;
  const double inv = 1.0 / (2.0 * static_cast<double>(B));

  // Sigmoid + clamped BCE: d loss / d logit = (p - y) / (2B) unless the
  // clamp is active, where the loss is flat.
  Matrix d_logits(B, 2);
  for (Index b = 0; b < B; ++b) {
    const RowVector y = one_hot(batch.labels[static_cast<std::size_t>(b)]);
    for (Index k = 0; k < 2; ++k) {
      const double p = cache.probs(b, k);
      const bool clamped = p < kProbabilityClamp || p > 1.0 - kProbabilityClamp;
      d_logits(b, k) = clamped ? 0.0 : (p - y(k)) * inv;
    }
  }

  grads.dense2_kernel = cache.dense1_out.transpose() * d_logits;
  grads.dense2_bias = d_logits.colwise().sum();
  Matrix d_dense1 = d_logits * params.dense2_kernel.transpose();
  d_dense1 = d_dense1.cwiseProduct((cache.dense1_pre.array() > 0.0).cast<double>().matrix());
  grads.dense1_kernel = cache.dropped.transpose() * d_dense1;
  grads.dense1_bias = d_dense1.colwise().sum();
  Matrix d_pooled = d_dense1 * params.dense1_kernel.transpose();
  if (cache.mask.size() != 0) d_pooled = d_pooled.cwiseProduct(cache.mask);

  grads.embedding = Matrix::Zero(V, params.embedding.cols());
  const auto finish_direction = [&](const LstmWeights& w, const ForwardCache::Direction& dir,
                                    bool reverse, Index offset, LstmWeights& g) {
    g.recurrent = Matrix::Zero(H, 4 * H);
    Matrix token_grad = Matrix::Zero(V, 4 * H);
    const Matrix d_half = d_pooled.middleCols(offset, H);
    backprop_direction(w, dir, batch, reverse, d_half, cache.argmax.data() + offset, 2 * H,
                       g.recurrent, token_grad);
    g.kernel = params.embedding.transpose() * token_grad;
    g.bias = token_grad.colwise().sum();
    grads.embedding.noalias() += token_grad * w.kernel.transpose();
  };
  finish_direction(params.forward, cache.forward, false, 0, grads.forward);
  finish_direction(params.backward, cache.backward, true, H, grads.backward);
  return grads;
}

}  // namespace rtlstm
