#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "rtlstm/dataset.hpp"
#include "rtlstm/metrics.hpp"
#include "rtlstm/nn/model.hpp"
#include "rtlstm/nn/trainer.hpp"
#include "rtlstm/trace.hpp"
#include "rtlstm/vocab.hpp"

namespace rtlstm {

/// Loads <dir>/malicious/*.txt and <dir>/benign/*.txt (sorted by file name,
/// malicious first). The label comes from the directory, never from the
/// file. Errors: IoError when neither subdirectory exists, EmptyDataset when
/// no trace file is found, plus load_trace errors.
std::vector<RunTrace> load_corpus(const std::filesystem::path& dir,
                                  std::size_t cap = kDefaultInstructionCap);

/// sequence_texts() over every trace, in corpus order.
std::vector<LabeledText> corpus_texts(std::span<const RunTrace> traces, SequenceMode mode);

struct PipelineConfig {
  SequenceMode mode = SequenceMode::Bsm;
  std::optional<std::size_t> maxlen;  // defaults to default_maxlen(mode)
  std::size_t embed_dim = 32;
  std::size_t hidden = 64;
  double dropout_rate = 0.2;
  std::optional<std::size_t> vocab_cap;
  TrainConfig train;
  std::uint64_t seed = 0;  // drives the split, initialization, shuffles and dropout
};

struct PipelineResult {
  Vocabulary vocab;
  Model model;
  SplitManifest manifest;
  SplitSizes sizes;
  std::vector<EpochStats> history;
  EvalReport report;  // on the test partition
};

/// Label, tokenize, split 60/20/20 at sequence level, build the vocabulary
/// from the training partition only, encode, train, and evaluate on test.
PipelineResult run_pipeline(std::span<const RunTrace> traces, const PipelineConfig& config,
                            const EpochCallback& on_epoch = {});

/// Encodes traces with an existing vocabulary for evaluation or prediction.
std::vector<LabeledSequence> encode_traces(std::span<const RunTrace> traces,
                                           const Vocabulary& vocab, SequenceMode mode,
                                           std::size_t maxlen);

}  // namespace rtlstm
