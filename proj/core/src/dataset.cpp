#include "rtlstm/dataset.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "rtlstm/blocks.hpp"
#include "rtlstm/error.hpp"
#include "rtlstm/rng.hpp"

namespace rtlstm {

std::string_view to_string(SequenceMode mode) noexcept {
  return mode == SequenceMode::Ism ? "ism" : "bsm";
}

SequenceMode parse_sequence_mode(std::string_view text) {
  if (text == "ism") return SequenceMode::Ism;
  if (text == "bsm") return SequenceMode::Bsm;
  throw Error(ErrorCode::InvalidConfig, "unknown mode '" + std::string(text) + "' (ism|bsm)");
}

std::vector<LabeledText> sequence_texts(const RunTrace& trace, SequenceMode mode) {
  std::vector<LabeledText> out;
  if (mode == SequenceMode::Ism) {
    out.reserve(trace.instructions.size());
    for (const auto& instruction : trace.instructions) {
      out.push_back({render_instruction(instruction), trace.label, trace.source_id, out.size()});
    }
  } else {
    for (const auto& block : segment(trace)) {
      out.push_back({render_block(block), trace.label, trace.source_id, out.size()});
    }
  }
  return out;
}

std::vector<LabeledSequence> collect(std::span<const LabeledText> texts, const Vocabulary& vocab,
                                     std::size_t maxlen) {
  std::vector<LabeledSequence> out;
  out.reserve(texts.size());
  for (const auto& item : texts) {
    const auto tokens = tokenize(item.text);
    out.push_back({encode(vocab, tokens, maxlen), item.label, item.source_id, item.ordinal});
  }
  return out;
}

SplitSizes split_sizes(std::size_t n) {
  SplitSizes sizes;
  sizes.test = static_cast<std::size_t>(std::floor(0.2 * static_cast<double>(n) + 0.5));
  const std::size_t initial_train = n - sizes.test;
  sizes.validation =
      static_cast<std::size_t>(std::floor(0.25 * static_cast<double>(initial_train) + 0.5));
  sizes.train = initial_train - sizes.validation;
  return sizes;
}

SplitPlan split_indices(std::size_t n, std::uint64_t seed) {
  if (n < 5) {
    throw Error(ErrorCode::TooFewSequences,
                "need at least 5 sequences to split, got " + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  const SplitSizes sizes = split_sizes(n);
  SplitPlan plan;
  plan.seed = seed;
  const auto first = order.begin();
  plan.train.assign(first, first + static_cast<std::ptrdiff_t>(sizes.train));
  plan.validation.assign(first + static_cast<std::ptrdiff_t>(sizes.train),
                         first + static_cast<std::ptrdiff_t>(sizes.train + sizes.validation));
  plan.test.assign(first + static_cast<std::ptrdiff_t>(sizes.train + sizes.validation),
                   order.end());
  return plan;
}

DatasetSplit split(std::vector<LabeledSequence> data, std::uint64_t seed) {
  const SplitPlan plan = split_indices(data.size(), seed);
  const std::span<const LabeledSequence> all(data);
  DatasetSplit out;
  out.seed = seed;
  out.train = gather(all, std::span<const std::size_t>(plan.train));
  out.validation = gather(all, std::span<const std::size_t>(plan.validation));
  out.test = gather(all, std::span<const std::size_t>(plan.test));
  return out;
}

SplitManifest make_manifest(const SplitPlan& plan, std::span<const LabeledText> items) {
  const auto entries = [&](const std::vector<std::size_t>& indices) {
    std::vector<ManifestEntry> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back({items[i].source_id, items[i].ordinal});
    return out;
  };
  return {entries(plan.train), entries(plan.validation), entries(plan.test)};
}

std::string serialize_manifest(const SplitManifest& manifest) {
  std::string out;
  const auto section = [&out](std::string_view name, const std::vector<ManifestEntry>& entries) {
    out += '[';
    out += name;
    out += "]\n";
    for (const auto& entry : entries) {
      out += entry.source_id;
      out += '\t';
      out += std::to_string(entry.ordinal);
      out += '\n';
    }
  };
  section("train", manifest.train);
  section("validation", manifest.validation);
  section("test", manifest.test);
  return out;
}

SplitManifest parse_manifest(std::string_view contents) {
  SplitManifest manifest;
  std::vector<ManifestEntry>* current = nullptr;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    std::string_view line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line == "[train]") { current = &manifest.train; continue; }
    if (line == "[validation]") { current = &manifest.validation; continue; }
    if (line == "[test]") { current = &manifest.test; continue; }

    const std::size_t tab = line.rfind('\t');
    std::size_t ordinal = 0;
    if (current == nullptr || tab == std::string_view::npos ||
        std::from_chars(line.data() + tab + 1, line.data() + line.size(), ordinal).ptr !=
            line.data() + line.size()) {
      throw Error(ErrorCode::MalformedFile,
                  "split manifest line " + std::to_string(line_no) + " is malformed", line_no);
    }
    current->push_back({std::string(line.substr(0, tab)), ordinal});
  }
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const SplitManifest& manifest) {
  text::write_file(path, serialize_manifest(manifest));
}

SplitManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(text::read_file(path));
}

}  // namespace rtlstm
