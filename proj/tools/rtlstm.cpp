// rtlstm: segment run traces, train and evaluate the BiLSTM trace classifier.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtlstm/blocks.hpp"
#include "rtlstm/dataset.hpp"
#include "rtlstm/error.hpp"
#include "rtlstm/metrics.hpp"
#include "rtlstm/nn/checkpoint.hpp"
#include "rtlstm/nn/model.hpp"
#include "rtlstm/nn/trainer.hpp"
#include "rtlstm/pipeline.hpp"
#include "rtlstm/synth.hpp"
#include "rtlstm/trace.hpp"
#include "rtlstm/vocab.hpp"

namespace fs = std::filesystem;
using namespace rtlstm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// key=value lines without a [section] header apply to the invoked subcommand.
class FlatConfig : public CLI::ConfigINI {
 public:
  explicit FlatConfig(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    for (auto& item : items) {
      if (item.parents.empty() || item.parents.front() == "default") item.parents = {subcommand_};
    }
    return items;
  }

 private:
  std::string subcommand_;
};

fs::path sidecar(const fs::path& model, const char* suffix) {
  return fs::path(model.string() + suffix);
}

struct SegmentArgs {
  fs::path in;
  fs::path out;
  std::string input_format = "trace";
  std::size_t cap = kDefaultInstructionCap;
};

int cmd_segment(const SegmentArgs& a) {
  std::vector<BasicBlock> blocks;
  if (a.input_format == "bsm") {
    std::vector<Instruction> flat;
    for (auto& block : parse_bsm(text::read_file(a.in))) {
      flat.insert(flat.end(), block.instructions.begin(), block.instructions.end());
    }
    if (flat.empty()) throw Error(ErrorCode::EmptyTrace, "empty trace: " + a.in.string());
    blocks = segment(flat);
  } else {
    const RunTrace trace = load_trace(a.in, Label::Benign, a.cap);
    if (trace.truncated) {
      std::cerr << "warning: " << a.in.string() << " truncated at " << a.cap << " instructions\n";
    }
    blocks = segment(trace);
  }
  text::write_file(a.out, render_bsm(blocks));
  std::cout << blocks.size() << " blocks\n";
  return kExitOk;
}

struct TrainArgs {
  std::vector<fs::path> corpus;
  fs::path model;
  std::optional<fs::path> vocab;
  std::optional<fs::path> report;
  std::string mode = "bsm";
  std::optional<std::size_t> maxlen;
  std::size_t epochs = 3;
  std::size_t batch = 256;
  double lr = 0.001;
  double dropout = 0.2;
  std::size_t hidden = 64;
  std::size_t embed_dim = 32;
  std::optional<std::size_t> vocab_cap;
  std::uint64_t seed = 0;
  std::size_t cap = kDefaultInstructionCap;
  bool float32 = false;
};

int cmd_train(const TrainArgs& a) {
  std::vector<RunTrace> traces;
  for (const auto& dir : a.corpus) {
    auto part = load_corpus(dir, a.cap);
    traces.insert(traces.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  PipelineConfig config;
  config.mode = parse_sequence_mode(a.mode);
  config.maxlen = a.maxlen;
  config.embed_dim = a.embed_dim;
  config.hidden = a.hidden;
  config.dropout_rate = a.dropout;
  config.vocab_cap = a.vocab_cap;
  config.train.epochs = a.epochs;
  config.train.batch_size = a.batch;
  config.train.adam.learning_rate = a.lr;
  config.seed = a.seed;

  std::cerr << traces.size() << " traces, mode " << to_string(config.mode) << "\n";
  const PipelineResult result = run_pipeline(traces, config, [](const EpochStats& s) {
    std::fprintf(stderr, "epoch %zu  loss %.4f  acc %.4f", s.epoch, s.train_loss,
                 s.train_accuracy);
    if (s.val_loss) std::fprintf(stderr, "  val_loss %.4f  val_acc %.4f", *s.val_loss, *s.val_accuracy);
    std::fputc('\n', stderr);
  });

  save_model(a.model, result.model,
             a.float32 ? StoragePrecision::Float32 : StoragePrecision::Float64);
  save_vocab(a.vocab.value_or(sidecar(a.model, ".vocab")), result.vocab);
  save_manifest(sidecar(a.model, ".split"), result.manifest);
  text::write_file(sidecar(a.model, ".history.json"), history_to_json(result.history));
  if (a.report) text::write_file(*a.report, report_to_json(result.report));

  std::cout << "split " << result.sizes.train << "/" << result.sizes.validation << "/"
            << result.sizes.test << "  vocab " << result.vocab.size() << "\n";
  std::cout << report_summary(result.report);
  std::cout << "checksum " << result.report.model_checksum << "\n";
  return kExitOk;
}

struct EvalArgs {
  fs::path model;
  std::optional<fs::path> vocab;
  std::vector<fs::path> test_dirs;
  std::optional<fs::path> report;
  std::size_t cap = kDefaultInstructionCap;
};

int cmd_eval(const EvalArgs& a) {
  const Model model = load_model(a.model);
  const Vocabulary vocab = load_vocab(a.vocab.value_or(sidecar(a.model, ".vocab")));
  std::vector<RunTrace> traces;
  for (const auto& dir : a.test_dirs) {
    auto part = load_corpus(dir, a.cap);
    traces.insert(traces.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  const auto data = encode_traces(traces, vocab, model.config.mode, model.config.maxlen);
  const EvalReport report = evaluate(model, data);
  if (a.report) text::write_file(*a.report, report_to_json(report));
  std::cout << report_summary(report);
  return kExitOk;
}

struct PredictArgs {
  fs::path model;
  std::optional<fs::path> vocab;
  fs::path trace;
  std::size_t cap = kDefaultInstructionCap;
};

int cmd_predict(const PredictArgs& a) {
  const Model model = load_model(a.model);
  const Vocabulary vocab = load_vocab(a.vocab.value_or(sidecar(a.model, ".vocab")));
  const RunTrace trace = load_trace(a.trace, Label::Benign, a.cap);
  const auto texts = sequence_texts(trace, model.config.mode);
  const auto data = collect(texts, vocab, model.config.maxlen);
  const Predictions predictions = predict_all(model.params, data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::printf("%zu\t%.6f\t%s\n", data[i].ordinal, predictions.malicious_scores[i],
                std::string(to_string(predictions.labels[i])).c_str());
  }
  return kExitOk;
}

struct SynthArgs {
  std::string label = "both";
  std::size_t n = 2000;
  std::uint64_t seed = 0;
  fs::path out;
  std::size_t min_len = LengthRange{}.min;
  std::size_t max_len = LengthRange{}.max;
};

int cmd_synth(const SynthArgs& a) {
  const LengthRange lengths{a.min_len, a.max_len};
  std::vector<RunTrace> traces;
  if (a.label == "both") {
    traces = generate_corpus(a.n, lengths, a.seed);
  } else {
    traces = generate_class(parse_label(a.label), a.n, lengths, a.seed);
  }
  write_corpus(a.out, traces);
  std::cout << traces.size() << " traces written to " << a.out.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run-trace malware classifier (BiLSTM over instruction or basic-block sequences)"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value file with option values for the subcommand");
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  if (argc > 1) app.config_formatter(std::make_shared<FlatConfig>(argv[1]));

  SegmentArgs seg;
  auto* segment_cmd = app.add_subcommand("segment", "Split a run trace into basic blocks");
  segment_cmd->add_option("--in", seg.in, "Run-trace file")->required();
  segment_cmd->add_option("--out", seg.out, "Output file, one block per line")->required();
  segment_cmd->add_option("--input-format", seg.input_format, "trace or bsm")
      ->check(CLI::IsMember({"trace", "bsm"}));
  segment_cmd->add_option("--cap", seg.cap, "Instruction cap per file");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a model on labeled corpus directories");
  train_cmd->add_option("--corpus", tr.corpus, "Directory holding malicious/ and benign/")
      ->required()
      ->check(CLI::ExistingDirectory);
  train_cmd->add_option("--model", tr.model, "Checkpoint output path")->required();
  train_cmd->add_option("--vocab", tr.vocab, "Vocabulary output path (default <model>.vocab)");
  train_cmd->add_option("--report", tr.report, "Held-out test report (JSON)");
  train_cmd->add_option("--mode", tr.mode, "ism or bsm")->check(CLI::IsMember({"ism", "bsm"}));
  train_cmd->add_option("--maxlen", tr.maxlen, "Sequence length (default 8 for ism, 30 for bsm)");
  train_cmd->add_option("--epochs", tr.epochs);
  train_cmd->add_option("--batch", tr.batch);
  train_cmd->add_option("--lr", tr.lr);
  train_cmd->add_option("--dropout", tr.dropout);
  train_cmd->add_option("--hidden", tr.hidden);
  train_cmd->add_option("--embed-dim,--embed_dim", tr.embed_dim);
  train_cmd->add_option("--vocab-cap,--vocab_cap", tr.vocab_cap, "Keep only the most frequent tokens");
  train_cmd->add_option("--seed", tr.seed);
  train_cmd->add_option("--cap", tr.cap, "Instruction cap per file");
  train_cmd->add_flag("--float32", tr.float32, "Store weights as float32");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on labeled corpus directories");
  eval_cmd->add_option("--model", ev.model)->required();
  eval_cmd->add_option("--vocab", ev.vocab, "Vocabulary path (default <model>.vocab)");
  eval_cmd->add_option("--test-dir,--test_dir", ev.test_dirs)->required();
  eval_cmd->add_option("--report", ev.report, "Report output path (JSON)");
  eval_cmd->add_option("--cap", ev.cap, "Instruction cap per file");

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "Per-sequence verdicts for one trace");
  predict_cmd->add_option("--model", pr.model)->required();
  predict_cmd->add_option("--vocab", pr.vocab, "Vocabulary path (default <model>.vocab)");
  predict_cmd->add_option("--trace", pr.trace)->required();
  predict_cmd->add_option("--cap", pr.cap, "Instruction cap per file");

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
  synth_cmd->add_option("--class", sy.label, "malicious, benign or both")
      ->check(CLI::IsMember({"malicious", "benign", "both"}));
  synth_cmd->add_option("--n", sy.n, "Traces per class");
  synth_cmd->add_option("--seed", sy.seed);
  synth_cmd->add_option("--out", sy.out)->required();
  synth_cmd->add_option("--min-len", sy.min_len);
  synth_cmd->add_option("--max-len", sy.max_len);

  for (auto* sub : {segment_cmd, train_cmd, eval_cmd, predict_cmd, synth_cmd}) {
    sub->allow_config_extras(CLI::config_extras_mode::error);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitData;
  }

  try {
    if (*segment_cmd) return cmd_segment(seg);
    if (*train_cmd) return cmd_train(tr);
    if (*eval_cmd) return cmd_eval(ev);
    if (*predict_cmd) return cmd_predict(pr);
    if (*synth_cmd) return cmd_synth(sy);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::NumericFailure ? kExitNumeric : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitData;
}
