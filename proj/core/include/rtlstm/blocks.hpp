#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtlstm/trace.hpp"

namespace rtlstm {

/// Opcode categories that end a basic block.
enum class TerminatorClass { None, Branch, Return, Call };

std::string_view to_string(TerminatorClass terminator) noexcept;

/// Total over opcodes: every mnemonic starting with 'j' is a Branch
/// (jmp and the whole jcc family), ret/retn/retf are Return, call is Call.
/// Interrupt-style transfers (int, sysenter, iret) are None.
TerminatorClass classify_terminator(std::string_view opcode) noexcept;

/// Straight-line run of instructions; only the last one may be a terminator.
struct BasicBlock {
  std::vector<Instruction> instructions;

  friend bool operator==(const BasicBlock&, const BasicBlock&) = default;
};

/// Greedy left-to-right split: each terminator closes the current block and
/// stays in it as the last instruction. A trailing run without terminator
/// forms a final, unterminated block. Throws EmptyTrace on empty input.
std::vector<BasicBlock> segment(std::span<const Instruction> instructions);
std::vector<BasicBlock> segment(const RunTrace& trace);

/// Instructions rendered canonically and joined by single spaces.
std::string render_block(const BasicBlock& block);

/// One block per line (LF), the BSM dataset format.
std::string render_bsm(std::span<const BasicBlock> blocks);

/// Splits one rendered block back into instructions.
///
/// The format has no instruction delimiter, so a token starts a new
/// instruction when it looks like a mnemonic (a lowercase identifier that is
/// not a register or operand-size keyword) and the current operand list is
/// not waiting for an operand after a comma.
std::vector<Instruction> parse_bsm_line(std::string_view line);

/// Parses a BSM file: one block per non-blank line, taken as-is.
std::vector<BasicBlock> parse_bsm(std::string_view text);

}  // namespace rtlstm
