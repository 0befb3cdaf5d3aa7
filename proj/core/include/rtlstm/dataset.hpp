#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rtlstm/sequence_mode.hpp"
#include "rtlstm/trace.hpp"
#include "rtlstm/vocab.hpp"

namespace rtlstm {

/// A sequence still in text form, with the file it came from.
struct LabeledText {
  std::string text;
  Label label = Label::Benign;
  std::string source_id;
  std::size_t ordinal = 0;  // position of the sequence within its file
};

struct LabeledSequence {
  TokenSequence sequence;
  Label label = Label::Benign;
  std::string source_id;
  std::size_t ordinal = 0;

  friend bool operator==(const LabeledSequence&, const LabeledSequence&) = default;
};

/// ISM: every instruction rendered on its own. BSM: every basic block
/// rendered as one line. All sequences inherit the trace label.
std::vector<LabeledText> sequence_texts(const RunTrace& trace, SequenceMode mode);

/// Tokenizes and encodes every text; labels and provenance carry over.
std::vector<LabeledSequence> collect(std::span<const LabeledText> texts, const Vocabulary& vocab,
                                     std::size_t maxlen);

/// Partition sizes for n items: test = floor(0.2 n + 0.5), validation =
/// floor(0.25 (n - test) + 0.5), train = the rest.
struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};
SplitSizes split_sizes(std::size_t n);

/// Index-level partition of a shuffled 0..n-1.
struct SplitPlan {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

/// Seeded Fisher-Yates shuffle (see Rng), then train | validation | test in
/// that order of the shuffled list. Throws TooFewSequences when n < 5.
SplitPlan split_indices(std::size_t n, std::uint64_t seed);

struct DatasetSplit {
  std::vector<LabeledSequence> train;
  std::vector<LabeledSequence> validation;
  std::vector<LabeledSequence> test;
  std::uint64_t seed = 0;
};

DatasetSplit split(std::vector<LabeledSequence> data, std::uint64_t seed);

template <typename T>
std::vector<T> gather(std::span<const T> items, std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(items[i]);
  return out;
}

/// Split manifest: three sections "[train]", "[validation]", "[test]", each
/// followed by "source_id<TAB>ordinal" lines in partition order.
struct ManifestEntry {
  std::string source_id;
  std::size_t ordinal = 0;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};
struct SplitManifest {
  std::vector<ManifestEntry> train;
  std::vector<ManifestEntry> validation;
  std::vector<ManifestEntry> test;
  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

SplitManifest make_manifest(const SplitPlan& plan, std::span<const LabeledText> items);
std::string serialize_manifest(const SplitManifest& manifest);
SplitManifest parse_manifest(std::string_view text);
void save_manifest(const std::filesystem::path& path, const SplitManifest& manifest);
SplitManifest load_manifest(const std::filesystem::path& path);

}  // namespace rtlstm
