#pragma once

#include <vector>

#include "rtlstm/nn/model.hpp"
#include "rtlstm/rng.hpp"

namespace rtlstm {

enum class Phase { Train, Infer };

/// Single-example building blocks. The batched training path in network.hpp
/// computes the same functions; these are the readable reference versions.

struct LstmState {
  RowVector h;
  RowVector c;
};

/// Gate activations of one step, packed (i, f, g, o).
struct LstmGates {
  RowVector input, forget, cell, output;
};

/// i = s(x Wi + h Ui + bi), f = s(.. f ..), g = tanh(.. g ..), o = s(.. o ..),
/// c = f * c_prev + i * g, h = o * tanh(c). Throws DimensionMismatch.
LstmState lstm_cell_step(const RowVector& x, const RowVector& h_prev, const RowVector& c_prev,
                         const LstmWeights& weights, LstmGates* gates = nullptr);

/// Runs one direction over every row of `embedded` (forward scans rows
/// 0..T-1, backward scans T-1..0), both from a zero state, and returns
/// T x 2H where row t is [h_fwd(t), h_bwd(t)].
Matrix bilstm_forward(const Matrix& embedded, const LstmWeights& forward,
                      const LstmWeights& backward);

/// Per-column maximum over rows.
RowVector global_max_pool(const Matrix& sequence);

/// Inverted dropout. Train: each entry is zeroed with probability `rate`,
/// survivors scaled by 1 / (1 - rate). Infer: identity. Throws InvalidRate
/// unless 0 <= rate < 1.
RowVector dropout_apply(const RowVector& values, double rate, Phase phase, Rng& rng);

/// Mask of 0 and 1/(1-rate) entries, drawn row by row.
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

}  // namespace rtlstm
