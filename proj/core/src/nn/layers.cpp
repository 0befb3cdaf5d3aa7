#include "rtlstm/nn/layers.hpp"

#include <cmath>

#include "rtlstm/error.hpp"

namespace rtlstm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmState lstm_cell_step(const RowVector& x, const RowVector& h_prev, const RowVector& c_prev,
                         const LstmWeights& weights, LstmGates* gates) {
  const Eigen::Index H = weights.recurrent.rows();
  if (weights.kernel.rows() != x.cols() || weights.kernel.cols() != 4 * H ||
      weights.recurrent.cols() != 4 * H || weights.bias.cols() != 4 * H || h_prev.cols() != H ||
      c_prev.cols() != H) {
    throw Error(ErrorCode::DimensionMismatch, "lstm_cell_step: inconsistent dimensions");
  }

  const RowVector z = x * weights.kernel + h_prev * weights.recurrent + weights.bias;
  LstmGates g;
  g.input = z.segment(0, H).unaryExpr(&sigmoid);
  g.forget = z.segment(H, H).unaryExpr(&sigmoid);
  g.cell = z.segment(2 * H, H).unaryExpr([](double v) { return std::tanh(v); });
  g.output = z.segment(3 * H, H).unaryExpr(&sigmoid);

  LstmState next;
  next.c = g.forget.cwiseProduct(c_prev) + g.input.cwiseProduct(g.cell);
  next.h = g.output.cwiseProduct(next.c.unaryExpr([](double v) { return std::tanh(v); }));
  if (gates != nullptr) *gates = std::move(g);
  return next;
}

Matrix bilstm_forward(const Matrix& embedded, const LstmWeights& forward,
                      const LstmWeights& backward) {
  const Eigen::Index T = embedded.rows();
  const Eigen::Index H = forward.recurrent.rows();
  if (backward.recurrent.rows() != H) {
    throw Error(ErrorCode::DimensionMismatch, "bilstm_forward: direction sizes differ");
  }
  Matrix out(T, 2 * H);

  LstmState state{RowVector::Zero(H), RowVector::Zero(H)};
  for (Eigen::Index t = 0; t < T; ++t) {
    state = lstm_cell_step(embedded.row(t), state.h, state.c, forward);
    out.row(t).head(H) = state.h;
  }
  state = {RowVector::Zero(H), RowVector::Zero(H)};
  for (Eigen::Index t = T; t-- > 0;) {
    state = lstm_cell_step(embedded.row(t), state.h, state.c, backward);
    out.row(t).tail(H) = state.h;
  }
  return out;
}

RowVector global_max_pool(const Matrix& sequence) {
  if (sequence.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "global_max_pool: no rows");
  return sequence.colwise().maxCoeff();
}

RowVector dropout_apply(const RowVector& values, double rate, Phase phase, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::InvalidRate, "dropout rate must be in [0, 1)");
  }
  if (phase == Phase::Infer || rate == 0.0) return values;
  return values.cwiseProduct(dropout_mask(1, values.cols(), rate, rng));
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error(ErrorCode::InvalidRate, "dropout rate must be in [0, 1)");
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix mask(rows, cols);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng.bernoulli(rate) ? 0.0 : keep_scale;
  }
  return mask;
}

}  // namespace rtlstm
