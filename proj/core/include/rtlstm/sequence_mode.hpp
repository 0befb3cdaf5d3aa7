#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace rtlstm {

/// ISM: one instruction per sequence. BSM: one basic block per sequence.
enum class SequenceMode : std::uint8_t { Ism = 0, Bsm = 1 };

std::string_view to_string(SequenceMode mode) noexcept;
/// "ism" or "bsm"; throws InvalidConfig otherwise.
SequenceMode parse_sequence_mode(std::string_view text);

/// Tuned maximum sequence lengths: 8 tokens per instruction, 30 per block.
constexpr std::size_t default_maxlen(SequenceMode mode) noexcept {
  return mode == SequenceMode::Ism ? 8 : 30;
}

}  // namespace rtlstm
