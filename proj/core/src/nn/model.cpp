#include "rtlstm/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "rtlstm/error.hpp"
#include "rtlstm/rng.hpp"

namespace rtlstm {

void ModelConfig::validate() const {
  if (vocab_size == 0 || embed_dim == 0 || hidden == 0 || maxlen == 0 || dense_hidden == 0) {
    throw Error(ErrorCode::InvalidConfig, "model dimensions must be positive");
  }
  if (num_outputs != 2) throw Error(ErrorCode::InvalidConfig, "the classifier head has 2 outputs");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "dropout rate must be in [0, 1)");
  }
}

namespace {

template <typename M>
std::span<double> span_of(M& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
template <typename M>
std::span<const double> span_of(const M& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

template <typename P>
auto data_of(P& p) {
  return std::array{span_of(p.embedding),          span_of(p.forward.kernel),
                    span_of(p.forward.recurrent),  span_of(p.forward.bias),
                    span_of(p.backward.kernel),    span_of(p.backward.recurrent),
                    span_of(p.backward.bias),      span_of(p.dense1_kernel),
                    span_of(p.dense1_bias),        span_of(p.dense2_kernel),
                    span_of(p.dense2_bias)};
}

TensorInfo info(std::string_view name, const Matrix& m) {
  return {name, 2, static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
}
TensorInfo info(std::string_view name, const RowVector& v) {
  return {name, 1, 1, static_cast<std::size_t>(v.cols())};
}

void glorot(Matrix& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
}

}  // namespace

std::array<TensorInfo, kTensorCount> tensor_layout(const ModelParams& p) {
  return {info("embedding", p.embedding),
          info("lstm_fwd/kernel", p.forward.kernel),
          info("lstm_fwd/recurrent_kernel", p.forward.recurrent),
          info("lstm_fwd/bias", p.forward.bias),
          info("lstm_bwd/kernel", p.backward.kernel),
          info("lstm_bwd/recurrent_kernel", p.backward.recurrent),
          info("lstm_bwd/bias", p.backward.bias),
          info("dense1/kernel", p.dense1_kernel),
          info("dense1/bias", p.dense1_bias),
          info("dense2/kernel", p.dense2_kernel),
          info("dense2/bias", p.dense2_bias)};
}

std::array<std::span<double>, kTensorCount> tensor_data(ModelParams& params) {
  return data_of(params);
}

std::array<std::span<const double>, kTensorCount> tensor_data(const ModelParams& params) {
  return data_of(params);
}

ModelParams zero_params(const ModelConfig& config) {
  config.validate();
  const auto V = static_cast<Eigen::Index>(config.vocab_size);
  const auto E = static_cast<Eigen::Index>(config.embed_dim);
  const auto H = static_cast<Eigen::Index>(config.hidden);
  const auto D = static_cast<Eigen::Index>(config.dense_hidden);
  const auto O = static_cast<Eigen::Index>(config.num_outputs);

  ModelParams p;
  p.embedding = Matrix::Zero(V, E);
  for (LstmWeights* w : {&p.forward, &p.backward}) {
    w->kernel = Matrix::Zero(E, 4 * H);
    w->recurrent = Matrix::Zero(H, 4 * H);
    w->bias = RowVector::Zero(4 * H);
  }
  p.dense1_kernel = Matrix::Zero(2 * H, D);
  p.dense1_bias = RowVector::Zero(D);
  p.dense2_kernel = Matrix::Zero(D, O);
  p.dense2_bias = RowVector::Zero(O);
  return p;
}

ModelParams init_params(const ModelConfig& config) {
  ModelParams p = zero_params(config);
  Rng rng(derive_seed(config.seed, 0));
  const auto H = static_cast<Eigen::Index>(config.hidden);
  glorot(p.embedding, rng);
  for (LstmWeights* w : {&p.forward, &p.backward}) {
    glorot(w->kernel, rng);
    glorot(w->recurrent, rng);
    w->bias.segment(H, H).setOnes();
  }
  glorot(p.dense1_kernel, rng);
  glorot(p.dense2_kernel, rng);
  return p;
}

bool same_shapes(const ModelParams& a, const ModelParams& b) {
  const auto la = tensor_layout(a);
  const auto lb = tensor_layout(b);
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    if (la[i].rows != lb[i].rows || la[i].cols != lb[i].cols) return false;
  }
  return true;
}

bool all_finite(const ModelParams& params) {
  for (const auto values : tensor_data(params)) {
    if (!std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); })) {
      return false;
    }
  }
  return true;
}

bool identical(const ModelParams& a, const ModelParams& b) {
  if (!same_shapes(a, b)) return false;
  const auto da = tensor_data(a);
  const auto db = tensor_data(b);
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    if (std::memcmp(da[i].data(), db[i].data(), da[i].size_bytes()) != 0) return false;
  }
  return true;
}

}  // namespace rtlstm
