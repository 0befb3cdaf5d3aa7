#include "rtlstm/pipeline.hpp"

#include <algorithm>

#include "rtlstm/error.hpp"

namespace rtlstm {

std::vector<RunTrace> load_corpus(const std::filesystem::path& dir, std::size_t cap) {
  namespace fs = std::filesystem;
  std::vector<RunTrace> traces;
  bool any_dir = false;
  for (const Label label : {Label::Malicious, Label::Benign}) {
    const fs::path sub = dir / std::string(to_string(label));
    std::error_code ec;
    if (!fs::is_directory(sub, ec)) continue;
    any_dir = true;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(sub)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) traces.push_back(load_trace(file, label, cap));
  }
  if (!any_dir) {
    throw Error(ErrorCode::IoError,
                dir.string() + " has neither a malicious/ nor a benign/ subdirectory");
  }
  if (traces.empty()) throw Error(ErrorCode::EmptyDataset, "no trace files under " + dir.string());
  return traces;
}

std::vector<LabeledText> corpus_texts(std::span<const RunTrace> traces, SequenceMode mode) {
  std::vector<LabeledText> out;
  for (const auto& trace : traces) {
    auto texts = sequence_texts(trace, mode);
    out.insert(out.end(), std::make_move_iterator(texts.begin()),
               std::make_move_iterator(texts.end()));
  }
  return out;
}

std::vector<LabeledSequence> encode_traces(std::span<const RunTrace> traces,
                                           const Vocabulary& vocab, SequenceMode mode,
                                           std::size_t maxlen) {
  const auto texts = corpus_texts(traces, mode);
  return collect(texts, vocab, maxlen);
}

PipelineResult run_pipeline(std::span<const RunTrace> traces, const PipelineConfig& config,
                            const EpochCallback& on_epoch) {
  const std::size_t maxlen = config.maxlen.value_or(default_maxlen(config.mode));
  const std::vector<LabeledText> texts = corpus_texts(traces, config.mode);
  const SplitPlan plan = split_indices(texts.size(), config.seed);

  PipelineResult result;
  result.sizes = {plan.train.size(), plan.validation.size(), plan.test.size()};
  result.manifest = make_manifest(plan, texts);

  {
    std::vector<std::string> train_texts;
    train_texts.reserve(plan.train.size());
    for (std::size_t i : plan.train) train_texts.push_back(texts[i].text);
    result.vocab = Vocabulary::build(train_texts, config.vocab_cap);
  }

  const auto encode_part = [&](const std::vector<std::size_t>& indices) {
    const std::vector<LabeledText> part = gather(std::span<const LabeledText>(texts),
                                                 std::span<const std::size_t>(indices));
    return collect(part, result.vocab, maxlen);
  };
  const auto train_set = encode_part(plan.train);
  const auto validation_set = encode_part(plan.validation);
  const auto test_set = encode_part(plan.test);

  ModelConfig& mc = result.model.config;
  mc.vocab_size = result.vocab.size();
  mc.embed_dim = config.embed_dim;
  mc.hidden = config.hidden;
  mc.maxlen = maxlen;
  mc.dropout_rate = config.dropout_rate;
  mc.seed = config.seed;
  mc.mode = config.mode;

  TrainResult trained = train(train_set, validation_set, mc, config.train, on_epoch);
  result.model.params = std::move(trained.params);
  result.history = std::move(trained.history);
  result.report = evaluate(result.model, test_set);
  return result;
}

}  // namespace rtlstm
