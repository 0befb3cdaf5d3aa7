#include "rtlstm/blocks.hpp"

#include <algorithm>
#include <iterator>

#include "rtlstm/error.hpp"

namespace rtlstm {

std::string_view to_string(TerminatorClass terminator) noexcept {
  switch (terminator) {
    case TerminatorClass::None: return "none";
    case TerminatorClass::Branch: return "branch";
    case TerminatorClass::Return: return "return";
    case TerminatorClass::Call: return "call";
  }
  return "none";
}

TerminatorClass classify_terminator(std::string_view opcode) noexcept {
  if (!opcode.empty() && opcode.front() == 'j') return TerminatorClass::Branch;
  if (opcode == "ret" || opcode == "retn" || opcode == "retf") return TerminatorClass::Return;
  if (opcode == "call") return TerminatorClass::Call;
  return TerminatorClass::None;
}

std::vector<BasicBlock> segment(std::span<const Instruction> instructions) {
  if (instructions.empty()) throw Error(ErrorCode::EmptyTrace, "empty trace");
  std::vector<BasicBlock> blocks;
  BasicBlock current;
  for (const auto& instruction : instructions) {
    current.instructions.push_back(instruction);
    if (classify_terminator(instruction.opcode) != TerminatorClass::None) {
      blocks.push_back(std::move(current));
      current = {};
    }
  }
  if (!current.instructions.empty()) blocks.push_back(std::move(current));
  return blocks;
}

std::vector<BasicBlock> segment(const RunTrace& trace) { return segment(trace.instructions); }

std::string render_block(const BasicBlock& block) {
  std::string out;
  for (const auto& instruction : block.instructions) {
    if (!out.empty()) out += ' ';
    out += render_instruction(instruction);
  }
  return out;
}

std::string render_bsm(std::span<const BasicBlock> blocks) {
  std::string out;
  for (const auto& block : blocks) {
    out += render_block(block);
    out += '\n';
  }
  return out;
}

namespace {

constexpr std::string_view kRegisters[] = {
    "eax",  "ebx",  "ecx",  "edx",  "esi",  "edi",  "ebp",  "esp",  "eip",  "ax",   "bx",
    "cx",   "dx",   "si",   "di",   "bp",   "sp",   "al",   "ah",   "bl",   "bh",   "cl",
    "ch",   "dl",   "dh",   "cs",   "ds",   "es",   "fs",   "gs",   "ss",   "rax",  "rbx",
    "rcx",  "rdx",  "rsi",  "rdi",  "rbp",  "rsp",  "rip",  "r8",   "r9",   "r10",  "r11",
    "r12",  "r13",  "r14",  "r15",  "mm0",  "mm1",  "mm2",  "mm3",  "mm4",  "mm5",  "mm6",
    "mm7",  "xmm0", "xmm1", "xmm2", "xmm3", "xmm4", "xmm5", "xmm6", "xmm7", "xmm8", "xmm9",
    "cr0",  "cr2",  "cr3",  "cr4",  "dr0",  "dr1",  "dr2",  "dr3",  "dr6",  "dr7",  "st0",
    "st1",  "st2",  "st3",  "st4",  "st5",  "st6",  "st7",  "sil",  "dil",  "bpl",  "spl",
    "r8d",  "r9d",  "r10d", "r11d"};

constexpr std::string_view kOperandKeywords[] = {
    "byte", "word", "dword", "qword", "tbyte", "fword", "oword", "xmmword", "ymmword", "ptr",
    "short", "far"};

bool looks_like_mnemonic(std::string_view token) {
  if (token.empty() || token.front() < 'a' || token.front() > 'z') return false;
  const bool identifier = std::all_of(token.begin(), token.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  });
  if (!identifier) return false;
  const auto contains = [token](const auto& table) {
    return std::find(std::begin(table), std::end(table), token) != std::end(table);
  };
  return !contains(kRegisters) && !contains(kOperandKeywords);
}

}  // namespace

std::vector<Instruction> parse_bsm_line(std::string_view line) {
  const std::string_view body = text::trim(line);
  if (body.empty()) throw Error(ErrorCode::EmptyLine, "empty line");
  const auto tokens = text::split_whitespace(body);

  std::vector<Instruction> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!looks_like_mnemonic(text::to_lower(tokens[i]))) {
      throw Error(ErrorCode::MalformedLine,
                  "expected mnemonic at '" + std::string(tokens[i]) + "'");
    }
    Instruction instruction;
    instruction.opcode = text::to_lower(tokens[i]);
    ++i;

    std::string operand;
    bool after_comma = false;
    while (i < tokens.size()) {
      std::string_view token = tokens[i];
      if (!after_comma && looks_like_mnemonic(token)) break;
      const bool ends_with_comma = token.back() == ',';
      if (ends_with_comma) token.remove_suffix(1);
      if (!token.empty()) {
        if (!operand.empty()) operand += ' ';
        operand += token;
      }
      ++i;
      after_comma = ends_with_comma;
      if (ends_with_comma) {
        if (operand.empty()) throw Error(ErrorCode::MalformedLine, "empty operand");
        instruction.operands.push_back(std::move(operand));
        operand.clear();
      }
    }
    if (after_comma) throw Error(ErrorCode::MalformedLine, "dangling comma");
    if (!operand.empty()) instruction.operands.push_back(std::move(operand));
    instruction.raw = render_instruction(instruction);
    out.push_back(std::move(instruction));
  }
  return out;
}

std::vector<BasicBlock> parse_bsm(std::string_view text) {
  std::vector<BasicBlock> blocks;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      blocks.push_back(BasicBlock{parse_bsm_line(line)});
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return blocks;
}

}  // namespace rtlstm
