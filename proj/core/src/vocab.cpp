#include "rtlstm/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "rtlstm/error.hpp"
#include "rtlstm/trace.hpp"

namespace rtlstm {

std::vector<std::string> tokenize(std::string_view sequence_text) {
  std::vector<std::string> tokens;
  for (std::string_view piece : text::split_whitespace(sequence_text)) {
    while (!piece.empty() && piece.back() == ',') piece.remove_suffix(1);
    if (!piece.empty()) tokens.emplace_back(piece);
  }
  if (tokens.empty()) {
    throw Error(ErrorCode::EmptyAfterTokenize, "no tokens in '" + std::string(sequence_text) + "'");
  }
  return tokens;
}

Vocabulary Vocabulary::build(std::span<const std::string> corpus,
                             std::optional<std::size_t> max_tokens) {
  struct Entry {
    std::size_t count = 0;
    std::size_t first_seen = 0;
  };
  std::unordered_map<std::string, Entry, Hash, std::equal_to<>> counts;
  std::vector<std::string> order;

  for (const auto& sequence : corpus) {
    for (std::string_view piece : text::split_whitespace(sequence)) {
      while (!piece.empty() && piece.back() == ',') piece.remove_suffix(1);
      if (piece.empty()) continue;
      auto it = counts.find(piece);
      if (it == counts.end()) {
        it = counts.emplace(std::string(piece), Entry{0, order.size()}).first;
        order.emplace_back(piece);
      }
      ++it->second.count;
    }
  }
  if (order.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus contains no tokens");

  std::vector<std::size_t> rank(order.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    return counts.find(order[a])->second.count > counts.find(order[b])->second.count;
  });
  if (max_tokens && rank.size() > *max_tokens) rank.resize(*max_tokens);

  std::vector<std::string> tokens;
  tokens.reserve(rank.size());
  for (std::size_t r : rank) tokens.push_back(std::move(order[r]));
  return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary vocab;
  vocab.index_.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto index = static_cast<std::int32_t>(i) + kFirstTokenIndex;
    if (!vocab.index_.emplace(tokens[i], index).second) {
      throw Error(ErrorCode::DuplicateToken, "duplicate token '" + tokens[i] + "'");
    }
  }
  vocab.tokens_ = std::move(tokens);
  return vocab;
}

std::int32_t Vocabulary::index_of(std::string_view token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kOovIndex : it->second;
}

std::optional<std::string_view> Vocabulary::token_at(std::int32_t index) const {
  if (index < kFirstTokenIndex || static_cast<std::size_t>(index) >= size()) return std::nullopt;
  return tokens_[static_cast<std::size_t>(index - kFirstTokenIndex)];
}

bool Vocabulary::contains(std::string_view token) const { return index_.contains(token); }

TokenSequence encode(const Vocabulary& vocab, std::span<const std::string> tokens,
                     std::size_t maxlen) {
  if (maxlen == 0) throw Error(ErrorCode::InvalidConfig, "maxlen must be at least 1");
  TokenSequence out;
  out.indices.assign(maxlen, Vocabulary::kPadIndex);
  out.true_length = std::min(tokens.size(), maxlen);
  for (std::size_t i = 0; i < out.true_length; ++i) out.indices[i] = vocab.index_of(tokens[i]);
  return out;
}

std::string serialize_vocab(const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < vocab.tokens().size(); ++i) {
    out += vocab.tokens()[i];
    out += '\t';
    out += std::to_string(i + Vocabulary::kFirstTokenIndex);
    out += '\n';
  }
  return out;
}

void save_vocab(const std::filesystem::path& path, const Vocabulary& vocab) {
  text::write_file(path, serialize_vocab(vocab));
}

Vocabulary parse_vocab(std::string_view contents) {
  std::vector<std::pair<std::int64_t, std::string>> entries;
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

    const std::size_t tab = line.rfind('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw Error(ErrorCode::MalformedFile, "vocab line " + std::to_string(line_no) + ": expected token<TAB>index", line_no);
    }
    const std::string_view number = line.substr(tab + 1);
    std::int64_t index = 0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), index);
    if (ec != std::errc{} || ptr != number.data() + number.size()) {
      throw Error(ErrorCode::MalformedFile, "vocab line " + std::to_string(line_no) + ": bad index", line_no);
    }
    if (index == Vocabulary::kPadIndex || index == Vocabulary::kOovIndex) {
      throw Error(ErrorCode::ReservedIndexUsed,
                  "vocab line " + std::to_string(line_no) + ": reserved index " + std::to_string(index), line_no);
    }
    entries.emplace_back(index, std::string(line.substr(0, tab)));
  }

  // Duplicate tokens are reported before index problems.
  {
    std::vector<std::string_view> names;
    names.reserve(entries.size());
    for (const auto& [index, token] : entries) names.push_back(token);
    std::sort(names.begin(), names.end());
    const auto dup = std::adjacent_find(names.begin(), names.end());
    if (dup != names.end()) {
      throw Error(ErrorCode::DuplicateToken, "duplicate token '" + std::string(*dup) + "'");
    }
  }

  std::sort(entries.begin(), entries.end());
  std::vector<std::string> tokens;
  tokens.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto expected = static_cast<std::int64_t>(i) + Vocabulary::kFirstTokenIndex;
    if (entries[i].first != expected) {
      throw Error(ErrorCode::MalformedFile,
                  "vocab indices are not dense: expected " + std::to_string(expected) + ", found " +
                      std::to_string(entries[i].first));
    }
    tokens.push_back(std::move(entries[i].second));
  }
  return Vocabulary::from_tokens(std::move(tokens));
}

Vocabulary load_vocab(const std::filesystem::path& path) {
  return parse_vocab(text::read_file(path));
}

}  // namespace rtlstm
