#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "rtlstm/nn/model.hpp"

namespace rtlstm {

/// Bytes per stored parameter value. Only Float64 round-trips bit-exactly.
enum class StoragePrecision : std::uint8_t { Float32 = 4, Float64 = 8 };

inline constexpr std::uint16_t kCheckpointVersion = 1;

/// Checkpoint layout, all integers little-endian:
///
///   "RTLM"                      magic
///   u16                         format version (1)
///   u32 vocab_size, u32 embed_dim, u32 hidden, u32 maxlen
///   f64 dropout_rate
///   u32 dense_hidden, u32 num_outputs
///   u64 seed
///   u8  mode (0 ism, 1 bsm)
///   u8  bytes per value (4 or 8)
///   u32 tensor count
///   per tensor, in tensor_layout() order:
///     u32 name length, name bytes, u32 rank, u64 dims[rank],
///     row-major values (IEEE-754 LE)
///
/// LSTM kernels pack gates as (input, forget, cell, output) along columns.
std::string serialize_model(const Model& model,
                            StoragePrecision precision = StoragePrecision::Float64);

/// Errors: BadMagic (short file or wrong magic), VersionMismatch,
/// ShapeMismatch (truncated payload, unexpected tensor name or dims),
/// InvalidConfig.
Model deserialize_model(std::string_view bytes);

void save_model(const std::filesystem::path& path, const Model& model,
                StoragePrecision precision = StoragePrecision::Float64);
Model load_model(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// "fnv1a64:<16 hex digits>" over the Float64 serialization.
std::string model_checksum(const Model& model);

}  // namespace rtlstm
