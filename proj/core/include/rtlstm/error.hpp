#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rtlstm {

enum class ErrorCode {
  EmptyLine,
  MalformedLine,
  IoError,
  EmptyTrace,
  EmptyAfterTokenize,
  EmptyCorpus,
  DuplicateToken,
  ReservedIndexUsed,
  MalformedFile,
  TooFewSequences,
  InvalidConfig,
  DimensionMismatch,
  InvalidRate,
  IndexOutOfVocab,
  ShapeMismatch,
  EmptyDataset,
  BadMagic,
  VersionMismatch,
  UndefinedRate,
  EmptyMatrix,
  InvalidRange,
  NumericFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure in the library surfaces as an Error carrying a code; the
/// message is meant for humans, the code for callers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// 1-based source line, when the error points into a text file.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace rtlstm
