#include <benchmark/benchmark.h>

#include "rtlstm/blocks.hpp"
#include "rtlstm/dataset.hpp"
#include "rtlstm/nn/adam.hpp"
#include "rtlstm/nn/network.hpp"
#include "rtlstm/pipeline.hpp"
#include "rtlstm/rng.hpp"
#include "rtlstm/synth.hpp"
#include "rtlstm/trace.hpp"
#include "rtlstm/vocab.hpp"

using namespace rtlstm;

namespace {

ModelConfig default_config(std::size_t maxlen) {
  ModelConfig c;
  c.vocab_size = 160;
  c.maxlen = maxlen;
  c.seed = 1;
  return c;
}

Batch random_batch(const ModelConfig& c, std::size_t size, std::uint64_t seed) {
  Rng rng(seed);
  Batch batch;
  batch.size = size;
  batch.length = c.maxlen;
  for (std::size_t i = 0; i < size * c.maxlen; ++i) {
    batch.tokens.push_back(static_cast<std::int32_t>(rng.below(c.vocab_size)));
  }
  for (std::size_t b = 0; b < size; ++b) batch.labels.push_back(b % 2 ? Label::Malicious : Label::Benign);
  return batch;
}

}  // namespace

static void BM_ParseTrace(benchmark::State& state) {
  const auto trace = generate_corpus(1, {10'000, 10'000}, 3).front();
  const std::string text = render_trace(trace.instructions);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_trace(text, "bench", Label::Benign));
  }
  state.SetItemsProcessed(state.iterations() * 10'000);
}
BENCHMARK(BM_ParseTrace);

static void BM_Segment(benchmark::State& state) {
  const auto trace = generate_corpus(1, {10'000, 10'000}, 3).front();
  for (auto _ : state) benchmark::DoNotOptimize(segment(trace));
  state.SetItemsProcessed(state.iterations() * 10'000);
}
BENCHMARK(BM_Segment);

static void BM_TokenizeEncode(benchmark::State& state) {
  const auto corpus = generate_corpus(20, {}, 4);
  const auto texts = corpus_texts(corpus, SequenceMode::Bsm);
  std::vector<std::string> lines;
  for (const auto& t : texts) lines.push_back(t.text);
  const auto vocab = Vocabulary::build(lines);
  for (auto _ : state) benchmark::DoNotOptimize(collect(texts, vocab, 30));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(texts.size()));
}
BENCHMARK(BM_TokenizeEncode);

static void BM_Forward(benchmark::State& state) {
  const ModelConfig c = default_config(static_cast<std::size_t>(state.range(0)));
  const ModelParams p = init_params(c);
  const Batch batch = random_batch(c, 256, 5);
  ForwardCache cache;
  for (auto _ : state) {
    forward(p, batch, nullptr, cache);
    benchmark::DoNotOptimize(cache.probs.data());
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_Forward)->Arg(8)->Arg(30);

static void BM_TrainStep(benchmark::State& state) {
  const ModelConfig c = default_config(static_cast<std::size_t>(state.range(0)));
  ModelParams p = init_params(c);
  const Batch batch = random_batch(c, 256, 6);
  AdamState adam = AdamState::zeros_like(p);
  Rng rng(7);
  ForwardCache cache;
  for (auto _ : state) {
    const Matrix mask = dropout_mask(256, static_cast<Eigen::Index>(c.pooled_width()), 0.2, rng);
    forward(p, batch, &mask, cache);
    adam_step(p, backward(p, cache, batch), adam, AdamConfig{});
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_TrainStep)->Arg(8)->Arg(30);

static void BM_GenerateTrace(benchmark::State& state) {
  const auto [malicious, benign] = default_grammars();
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_trace(malicious, i++, {300, 300}, 1));
  state.SetItemsProcessed(state.iterations() * 300);
}
BENCHMARK(BM_GenerateTrace);

BENCHMARK_MAIN();
