#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rtlstm {

/// Class label of a run trace. Malicious is the positive class.
enum class Label : std::uint8_t { Benign = 0, Malicious = 1 };

std::string_view to_string(Label label) noexcept;
/// Accepts "malicious" / "benign" (case-sensitive); throws InvalidConfig otherwise.
Label parse_label(std::string_view text);

/// Debugger runs in the collection setup stop after this many instructions.
inline constexpr std::size_t kDefaultInstructionCap = 10'000'000;

/// One executed instruction as printed by the debugger, e.g.
/// "mov dword ptr ss:[ebp-0x48], eax".
struct Instruction {
  std::string opcode;                 // lowercase mnemonic
  std::vector<std::string> operands;  // verbatim, commas consumed
  std::string raw;                    // trimmed source line

  /// Semantic equality: opcode and operands. `raw` is provenance only.
  friend bool operator==(const Instruction& a, const Instruction& b) {
    return a.opcode == b.opcode && a.operands == b.operands;
  }
};

struct RunTrace {
  std::string source_id;
  Label label = Label::Benign;
  std::vector<Instruction> instructions;
  bool truncated = false;  // more instructions than the cap were present

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// Parses one trace line. Throws EmptyLine for blank input and
/// MalformedLine when no usable opcode token is found or an operand is empty.
Instruction parse_line(std::string_view line);

/// Canonical text: opcode, a space, then operands joined by ", ".
std::string render_instruction(const Instruction& instruction);

/// Parses a whole trace held in memory. Blank lines are skipped; CRLF is
/// accepted. Parsing stops after `cap` instructions and sets `truncated` if
/// any further non-blank line exists.
RunTrace parse_trace(std::string_view text, std::string source_id, Label label,
                     std::size_t cap = kDefaultInstructionCap);

/// Reads and parses a trace file. Errors: IoError, MalformedLine (with the
/// 1-based line number), EmptyTrace.
RunTrace load_trace(const std::filesystem::path& path, Label label,
                    std::size_t cap = kDefaultInstructionCap);

/// One instruction per line, LF endings, canonical rendering.
std::string render_trace(std::span<const Instruction> instructions);

/// Writes render_trace(...) to `path`, creating parent directories.
void save_trace(const std::filesystem::path& path, const RunTrace& trace);

namespace text {

std::string_view trim(std::string_view s) noexcept;
bool is_space(char c) noexcept;
std::vector<std::string_view> split_whitespace(std::string_view s);
std::string to_lower(std::string_view s);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace text

}  // namespace rtlstm
