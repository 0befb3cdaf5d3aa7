#include "rtlstm/error.hpp"

namespace rtlstm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyLine: return "EmptyLine";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::EmptyAfterTokenize: return "EmptyAfterTokenize";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DuplicateToken: return "DuplicateToken";
    case ErrorCode::ReservedIndexUsed: return "ReservedIndexUsed";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::TooFewSequences: return "TooFewSequences";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidRate: return "InvalidRate";
    case ErrorCode::IndexOutOfVocab: return "IndexOutOfVocab";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::UndefinedRate: return "UndefinedRate";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::NumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(message), code_(code), line_(line) {}

}  // namespace rtlstm
