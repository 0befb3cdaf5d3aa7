#include <cmath>

#include <gtest/gtest.h>

#include "rtlstm/error.hpp"
#include "rtlstm/nn/adam.hpp"
#include "rtlstm/nn/layers.hpp"
#include "rtlstm/nn/network.hpp"
#include "rtlstm/rng.hpp"
#include "support/oracles.hpp"

using namespace rtlstm;

namespace {

ModelConfig small_config(std::uint64_t seed = 5) {
  ModelConfig c;
  c.vocab_size = 20;
  c.embed_dim = 6;
  c.hidden = 5;
  c.maxlen = 7;
  c.dense_hidden = 8;
  c.seed = seed;
  return c;
}

TokenSequence random_sequence(const ModelConfig& c, Rng& rng) {
  TokenSequence s;
  s.true_length = 1 + rng.below(c.maxlen);
  for (std::size_t t = 0; t < c.maxlen; ++t) {
    s.indices.push_back(t < s.true_length ? static_cast<std::int32_t>(rng.below(c.vocab_size)) : 0);
  }
  return s;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Whole-model forward built only from the single-example reference layers.
RowVector reference_forward(const ModelParams& p, const TokenSequence& s) {
  Matrix embedded(static_cast<Eigen::Index>(s.indices.size()), p.embedding.cols());
  for (std::size_t t = 0; t < s.indices.size(); ++t) {
    embedded.row(static_cast<Eigen::Index>(t)) = p.embedding.row(s.indices[t]);
  }
  const RowVector pooled = global_max_pool(bilstm_forward(embedded, p.forward, p.backward));
  const RowVector d1 = (pooled * p.dense1_kernel + p.dense1_bias).cwiseMax(0.0);
  RowVector out = d1 * p.dense2_kernel + p.dense2_bias;
  for (Eigen::Index j = 0; j < out.size(); ++j) out(j) = sigmoid(out(j));
  return out;
}

}  // namespace

TEST(InitParams, ShapesDeterminismAndForgetBias) {
  ModelConfig c = small_config();
  c.hidden = 64;
  const ModelParams a = init_params(c);
  const ModelParams b = init_params(c);
  EXPECT_TRUE(identical(a, b));
  EXPECT_EQ(a.dense1_kernel.rows(), 128);
  EXPECT_EQ(c.pooled_width(), 128u);
  EXPECT_EQ(a.dense2_kernel.cols(), 2);
  for (const auto* w : {&a.forward, &a.backward}) {
    for (Eigen::Index j = 0; j < 64; ++j) {
      EXPECT_EQ(w->bias(64 + j), 1.0);
      EXPECT_EQ(w->bias(j), 0.0);
    }
  }
  c.seed = 6;
  EXPECT_FALSE(identical(a, init_params(c)));
  c.hidden = 0;
  EXPECT_THROW(init_params(c), Error);
}

TEST(InitParams, GlorotLimits) {
  const ModelConfig c = small_config();
  const ModelParams p = init_params(c);
  const double limit = std::sqrt(6.0 / static_cast<double>(c.embed_dim + 4 * c.hidden));
  EXPECT_LE(p.forward.kernel.cwiseAbs().maxCoeff(), limit);
  EXPECT_GT(p.forward.kernel.cwiseAbs().maxCoeff(), 0.5 * limit);
}

TEST(Forward, ZeroParamsGiveHalf) {
  const ModelConfig c = small_config();
  const Model m{c, zero_params(c)};
  Rng rng(1);
  const RowVector out = model_forward(m, random_sequence(c, rng), Phase::Infer);
  EXPECT_EQ(out(0), 0.5);
  EXPECT_EQ(out(1), 0.5);
}

TEST(Forward, BatchedMatchesReferenceLayers) {
  const ModelConfig c = small_config();
  const ModelParams p = init_params(c);
  Rng rng(2);
  std::vector<TokenSequence> seqs;
  for (int i = 0; i < 9; ++i) seqs.push_back(random_sequence(c, rng));
  const Matrix probs = predict(p, make_batch(std::span<const TokenSequence>(seqs)));
  ASSERT_EQ(probs.rows(), 9);
  ASSERT_EQ(probs.cols(), 2);
  for (int i = 0; i < 9; ++i) {
    const RowVector ref = reference_forward(p, seqs[static_cast<std::size_t>(i)]);
    EXPECT_NEAR((probs.row(i) - ref).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    EXPECT_GT(probs.row(i).minCoeff(), 0.0);
    EXPECT_LT(probs.row(i).maxCoeff(), 1.0);
  }
}

TEST(Forward, InferIsDeterministicTrainUsesDropout) {
  ModelConfig c = small_config();
  c.dropout_rate = 0.5;
  const Model m{c, init_params(c)};
  Rng rng(3);
  const auto s = random_sequence(c, rng);
  EXPECT_EQ(model_forward(m, s, Phase::Infer), model_forward(m, s, Phase::Infer));
  Rng a(4), b(4);
  EXPECT_EQ(model_forward(m, s, Phase::Train, &a), model_forward(m, s, Phase::Train, &b));
  bool differs = false;
  for (int i = 0; i < 10 && !differs; ++i) {
    differs = model_forward(m, s, Phase::Train, &a) != model_forward(m, s, Phase::Infer);
  }
  EXPECT_TRUE(differs);
}

TEST(Forward, IndexOutOfVocab) {
  const ModelConfig c = small_config();
  const Model m{c, init_params(c)};
  TokenSequence s{std::vector<std::int32_t>(c.maxlen, 0), 1};
  s.indices[2] = static_cast<std::int32_t>(c.vocab_size);
  try {
    model_forward(m, s, Phase::Infer);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfVocab);
  }
  s.indices[2] = -1;
  EXPECT_THROW(model_forward(m, s, Phase::Infer), Error);
}

TEST(Loss, BinaryCrossEntropyExamples) {
  RowVector half(2), ninety(2);
  half << 0.5, 0.5;
  ninety << 0.9, 0.1;
  const RowVector benign = one_hot(Label::Benign);
  EXPECT_NEAR(bce_loss(half, benign), std::log(2.0), 1e-12);
  EXPECT_NEAR(bce_loss(half, benign), 0.693147, 1e-6);
  EXPECT_NEAR(bce_loss(ninety, benign), -std::log(0.9), 1e-12);
  EXPECT_NEAR(bce_loss(ninety, benign), 0.105361, 1e-6);
  EXPECT_LE(bce_loss(benign, benign), 1e-6);
  EXPECT_TRUE(std::isfinite(bce_loss(one_hot(Label::Malicious), benign)));
  EXPECT_EQ(one_hot(Label::Malicious)(1), 1.0);
}

TEST(Decision, ArgmaxTiesGoBenign) {
  EXPECT_EQ(predicted_label(0.2, 0.7), Label::Malicious);
  EXPECT_EQ(predicted_label(0.7, 0.2), Label::Benign);
  EXPECT_EQ(predicted_label(0.5, 0.5), Label::Benign);
}

TEST(Backward, MatchesFiniteDifferencesOnToyConfig) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = oracle::gradient_check(seed);
    EXPECT_GT(r.checked, 200u);
    for (std::size_t k = 0; k < kTensorCount; ++k) {
      EXPECT_LT(r.max_error[k], 1e-4) << "seed " << seed << " tensor " << k;
    }
  }
}

TEST(Backward, SaturatedCorrectBatchHasZeroGradient) {
  const ModelConfig c = small_config();
  ModelParams p = init_params(c);
  p.dense2_bias << 40.0, -40.0;
  Rng rng(6);
  std::vector<LabeledSequence> data;
  for (int i = 0; i < 4; ++i) data.push_back({random_sequence(c, rng), Label::Benign, "x", 0});
  const Batch batch = make_batch(data);
  const ForwardCache cache = forward(p, batch);
  EXPECT_LE(batch_loss(cache.probs, batch.labels), 1e-6);
  const ModelParams g = backward(p, cache, batch);
  double norm2 = 0.0;
  for (const auto& t : tensor_data(g)) {
    for (double v : t) norm2 += v * v;
  }
  EXPECT_LE(std::sqrt(norm2), 1e-6);
}

TEST(Backward, AbsentTokensGetZeroEmbeddingGradient) {
  const ModelConfig c = small_config();
  const ModelParams p = init_params(c);
  Batch batch;
  batch.size = 2;
  batch.length = c.maxlen;
  batch.tokens = {3, 4, 5, 0, 0, 0, 0, 7, 3, 0, 0, 0, 0, 0};
  batch.labels = {Label::Malicious, Label::Benign};
  const ModelParams g = backward(p, forward(p, batch), batch);
  for (Eigen::Index v = 0; v < g.embedding.rows(); ++v) {
    const bool present = v == 0 || v == 3 || v == 4 || v == 5 || v == 7;
    if (present) {
      EXPECT_GT(g.embedding.row(v).norm(), 0.0) << v;
    } else {
      EXPECT_EQ(g.embedding.row(v).norm(), 0.0) << v;
    }
  }
}

TEST(Backward, SmallStepDescends) {
  ModelConfig c = small_config();
  c.dropout_rate = 0.0;
  ModelParams p = init_params(c);
  Rng rng(8);
  std::vector<LabeledSequence> data;
  for (int i = 0; i < 16; ++i) {
    data.push_back({random_sequence(c, rng), i % 2 ? Label::Malicious : Label::Benign, "x", 0});
  }
  const Batch batch = make_batch(data);
  const ForwardCache cache = forward(p, batch);
  const double before = batch_loss(cache.probs, batch.labels);
  AdamState state = AdamState::zeros_like(p);
  AdamConfig ac;
  ac.learning_rate = 1e-4;
  adam_step(p, backward(p, cache, batch), state, ac);
  EXPECT_LE(batch_loss(forward(p, batch).probs, batch.labels), before);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  const ModelConfig c = small_config();
  ModelParams p = init_params(c);
  const ModelParams start = p;
  ModelParams g = zero_params(c);
  for (auto t : tensor_data(g)) std::fill(t.begin(), t.end(), 1.0);
  AdamState state = AdamState::zeros_like(p);
  adam_step(p, g, state, AdamConfig{});
  EXPECT_EQ(state.step, 1u);
  const double expected = -0.001 * (1.0 / (1.0 + 1e-8));
  const auto before = tensor_data(start);
  const auto after = tensor_data(std::as_const(p));
  for (std::size_t k = 0; k < kTensorCount; ++k) {
    for (std::size_t i = 0; i < after[k].size(); ++i) {
      ASSERT_NEAR(after[k][i] - before[k][i], expected, 1e-12);
    }
  }
  for (const auto& t : tensor_data(std::as_const(state.second_moment))) {
    for (double v : t) EXPECT_GE(v, 0.0);
  }
}

TEST(Adam, ZeroGradientLeavesParams) {
  const ModelConfig c = small_config();
  ModelParams p = init_params(c);
  const ModelParams start = p;
  AdamState state = AdamState::zeros_like(p);
  for (int i = 0; i < 3; ++i) adam_step(p, zero_params(c), state, AdamConfig{});
  EXPECT_TRUE(identical(p, start));
  EXPECT_EQ(state.step, 3u);
}

TEST(Adam, DeterministicTrajectoriesAndShapeCheck) {
  const ModelConfig c = small_config();
  ModelParams a = init_params(c), b = init_params(c);
  AdamState sa = AdamState::zeros_like(a), sb = AdamState::zeros_like(b);
  Rng rng(9);
  for (int step = 0; step < 5; ++step) {
    ModelParams g = zero_params(c);
    for (auto t : tensor_data(g)) {
      for (double& v : t) v = rng.uniform(-1, 1);
    }
    adam_step(a, g, sa, AdamConfig{});
    adam_step(b, g, sb, AdamConfig{});
  }
  EXPECT_TRUE(identical(a, b));
  ModelConfig other = c;
  other.hidden = 4;
  try {
    adam_step(a, zero_params(other), sa, AdamConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}
