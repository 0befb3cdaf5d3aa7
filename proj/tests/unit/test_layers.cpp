#include <cmath>

#include <gtest/gtest.h>

#include "rtlstm/error.hpp"
#include "rtlstm/nn/layers.hpp"
#include "rtlstm/nn/model.hpp"
#include "rtlstm/rng.hpp"

using namespace rtlstm;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LstmWeights zero_weights(Eigen::Index in, Eigen::Index hidden) {
  return {Matrix::Zero(in, 4 * hidden), Matrix::Zero(hidden, 4 * hidden),
          RowVector::Zero(4 * hidden)};
}

LstmWeights random_weights(Eigen::Index in, Eigen::Index hidden, Rng& rng) {
  LstmWeights w = zero_weights(in, hidden);
  for (auto* m : {&w.kernel, &w.recurrent}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = rng.uniform(-0.8, 0.8);
  }
  for (Eigen::Index i = 0; i < w.bias.size(); ++i) w.bias(i) = rng.uniform(-0.5, 0.5);
  return w;
}

RowVector row(std::initializer_list<double> v) {
  RowVector r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

}  // namespace

TEST(LstmCell, ZeroParamsGiveZeroState) {
  const auto w = zero_weights(3, 2);
  const auto s = lstm_cell_step(row({0.4, -1.0, 2.0}), RowVector::Zero(2), RowVector::Zero(2), w);
  EXPECT_TRUE(s.h.isZero(0.0));
  EXPECT_TRUE(s.c.isZero(0.0));
}

TEST(LstmCell, ForgetBiasScalarCase) {
  auto w = zero_weights(1, 1);
  w.bias(1) = 1.0;  // forget gate
  const auto s = lstm_cell_step(row({0.7}), RowVector::Zero(1), row({1.0}), w);
  const double c = sigmoid(1.0) * 1.0 + 0.5 * std::tanh(0.0);
  const double h = 0.5 * std::tanh(c);
  EXPECT_NEAR(s.c(0), c, 1e-15);
  EXPECT_NEAR(s.h(0), h, 1e-15);
  EXPECT_NEAR(s.c(0), 0.73106, 1e-5);
  EXPECT_NEAR(s.h(0), 0.311856, 1e-6);
}

TEST(LstmCell, MatchesHandEvaluatedGates) {
  Rng rng(12);
  const auto w = random_weights(3, 2, rng);
  const RowVector x = row({0.3, -0.2, 0.9});
  const RowVector h0 = row({0.1, -0.4});
  const RowVector c0 = row({0.5, 0.2});
  LstmGates gates;
  const auto s = lstm_cell_step(x, h0, c0, w, &gates);
  for (Eigen::Index j = 0; j < 2; ++j) {
    double z[4];
    for (int g = 0; g < 4; ++g) {
      const Eigen::Index col = g * 2 + j;
      z[g] = w.bias(col);
      for (Eigen::Index k = 0; k < 3; ++k) z[g] += x(k) * w.kernel(k, col);
      for (Eigen::Index k = 0; k < 2; ++k) z[g] += h0(k) * w.recurrent(k, col);
    }
    const double i = sigmoid(z[0]), f = sigmoid(z[1]), g = std::tanh(z[2]), o = sigmoid(z[3]);
    const double c = f * c0(j) + i * g;
    EXPECT_NEAR(s.c(j), c, 1e-14);
    EXPECT_NEAR(s.h(j), o * std::tanh(c), 1e-14);
    EXPECT_NEAR(gates.forget(j), f, 1e-14);
  }
}

TEST(LstmCell, GateRanges) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = random_weights(4, 3, rng);
    RowVector x(4), h(3), c(3);
    for (Eigen::Index i = 0; i < 4; ++i) x(i) = rng.uniform(-3, 3);
    for (Eigen::Index i = 0; i < 3; ++i) {
      h(i) = rng.uniform(-1, 1);
      c(i) = rng.uniform(-2, 2);
    }
    LstmGates g;
    lstm_cell_step(x, h, c, w, &g);
    for (const RowVector* unit : {&g.input, &g.forget, &g.output}) {
      EXPECT_GT(unit->minCoeff(), 0.0);
      EXPECT_LT(unit->maxCoeff(), 1.0);
    }
    EXPECT_GT(g.cell.minCoeff(), -1.0);
    EXPECT_LT(g.cell.maxCoeff(), 1.0);
  }
}

TEST(LstmCell, DimensionMismatch) {
  const auto w = zero_weights(3, 2);
  EXPECT_THROW(lstm_cell_step(RowVector::Zero(2), RowVector::Zero(2), RowVector::Zero(2), w), Error);
  EXPECT_THROW(lstm_cell_step(RowVector::Zero(3), RowVector::Zero(1), RowVector::Zero(2), w), Error);
}

TEST(Bilstm, WidthAndZeroParams) {
  const Matrix x = Matrix::Random(30, 32);
  const Matrix out = bilstm_forward(x, zero_weights(32, 64), zero_weights(32, 64));
  EXPECT_EQ(out.rows(), 30);
  EXPECT_EQ(out.cols(), 128);
  EXPECT_TRUE(out.isZero(0.0));
}

TEST(Bilstm, PalindromeSymmetryWithTiedWeights) {
  Rng rng(21);
  const auto w = random_weights(2, 3, rng);
  Matrix x(3, 2);
  x << 0.5, -1.0, 0.25, 0.75, 0.5, -1.0;
  const Matrix out = bilstm_forward(x, w, w);
  for (Eigen::Index t = 0; t < 3; ++t) {
    const Eigen::Index r = 2 - t;
    for (Eigen::Index j = 0; j < 3; ++j) {
      EXPECT_NEAR(out(t, j), out(r, 3 + j), 1e-15);
      EXPECT_NEAR(out(t, 3 + j), out(r, j), 1e-15);
    }
  }
}

TEST(Bilstm, DirectionsScanOppositeWays) {
  Rng rng(22);
  const auto fwd = random_weights(2, 2, rng);
  const auto bwd = random_weights(2, 2, rng);
  Matrix x(4, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
  const Matrix out = bilstm_forward(x, fwd, bwd);
  LstmState s{RowVector::Zero(2), RowVector::Zero(2)};
  for (Eigen::Index t = 0; t < 4; ++t) {
    s = lstm_cell_step(x.row(t), s.h, s.c, fwd);
    EXPECT_NEAR((out.row(t).head(2) - s.h).norm(), 0.0, 1e-14);
  }
  s = {RowVector::Zero(2), RowVector::Zero(2)};
  for (Eigen::Index t = 3; t >= 0; --t) {
    s = lstm_cell_step(x.row(t), s.h, s.c, bwd);
    EXPECT_NEAR((out.row(t).tail(2) - s.h).norm(), 0.0, 1e-14);
  }
}

TEST(MaxPool, Examples) {
  Matrix a(2, 2);
  a << 1, 5, 3, 2;
  EXPECT_EQ(global_max_pool(a), row({3, 5}));
  Matrix b(2, 2);
  b << -1, -2, -3, -1;
  EXPECT_EQ(global_max_pool(b), row({-1, -1}));
  Matrix c(1, 3);
  c << 0.5, -2, 7;
  EXPECT_EQ(global_max_pool(c), RowVector(c.row(0)));
}

TEST(Dropout, IdentityCases) {
  Rng rng(1);
  const RowVector v = row({1.5, -2.0, 0.25});
  EXPECT_EQ(dropout_apply(v, 0.0, Phase::Train, rng), v);
  EXPECT_EQ(dropout_apply(v, 0.0, Phase::Infer, rng), v);
  EXPECT_EQ(dropout_apply(v, 0.2, Phase::Infer, rng), v);
  EXPECT_THROW(dropout_apply(v, 1.0, Phase::Train, rng), Error);
  EXPECT_THROW(dropout_apply(v, -0.1, Phase::Train, rng), Error);
}

TEST(Dropout, MonteCarloSurvivalAndMean) {
  Rng rng(2024);
  const RowVector ones = RowVector::Ones(1'000'000);
  const RowVector out = dropout_apply(ones, 0.2, Phase::Train, rng);
  std::size_t survivors = 0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) != 0.0) {
      ++survivors;
      ASSERT_DOUBLE_EQ(out(i), 1.0 / 0.8);
    }
  }
  const double fraction = static_cast<double>(survivors) / 1e6;
  EXPECT_NEAR(fraction, 0.8, 0.01);
  EXPECT_NEAR(out.mean(), 1.0, 0.02);
}
