#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rtlstm {

/// Whitespace split with trailing separator commas stripped, so memory
/// operands such as "ss:[ebp-0x30]" stay single tokens. Throws
/// EmptyAfterTokenize when nothing remains.
std::vector<std::string> tokenize(std::string_view sequence_text);

/// Token to index map. Index 0 is padding and 1 is out-of-vocabulary; real
/// tokens occupy the dense range [2, size()).
class Vocabulary {
 public:
  static constexpr std::int32_t kPadIndex = 0;
  static constexpr std::int32_t kOovIndex = 1;
  static constexpr std::int32_t kFirstTokenIndex = 2;

  Vocabulary() = default;

  /// Tokens ordered by descending corpus frequency, ties by first
  /// occurrence. With `max_tokens` set, only the most frequent ones are kept
  /// and the rest map to the OOV index. Throws EmptyCorpus when the corpus
  /// holds no token at all; blank sequences are skipped.
  static Vocabulary build(std::span<const std::string> corpus,
                          std::optional<std::size_t> max_tokens = std::nullopt);

  /// `tokens[i]` receives index i + 2. Throws DuplicateToken.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  std::int32_t index_of(std::string_view token) const;
  std::optional<std::string_view> token_at(std::int32_t index) const;
  bool contains(std::string_view token) const;

  /// Distinct tokens + 2 reserved indices.
  std::size_t size() const noexcept { return tokens_.size() + 2; }
  /// Tokens in index order, starting at index 2.
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t, Hash, std::equal_to<>> index_;
};

/// Fixed-length index sequence, zero-padded on the right.
struct TokenSequence {
  std::vector<std::int32_t> indices;
  std::size_t true_length = 0;  // non-pad positions, min(token count, maxlen)

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

/// Maps tokens through `vocab` (unknown -> OOV), keeps the first `maxlen`
/// and pads the rest with 0. Throws InvalidConfig when maxlen is 0.
TokenSequence encode(const Vocabulary& vocab, std::span<const std::string> tokens,
                     std::size_t maxlen);

/// "token<TAB>index" per line.
void save_vocab(const std::filesystem::path& path, const Vocabulary& vocab);
std::string serialize_vocab(const Vocabulary& vocab);

/// Errors: IoError, DuplicateToken, ReservedIndexUsed, MalformedFile (bad
/// line, repeated index, or indices that are not dense from 2).
Vocabulary load_vocab(const std::filesystem::path& path);
Vocabulary parse_vocab(std::string_view text);

}  // namespace rtlstm
