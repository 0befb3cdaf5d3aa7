#include "rtlstm/trace.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "rtlstm/error.hpp"

namespace rtlstm {

namespace text {

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed: " + path.string());
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace text

std::string_view to_string(Label label) noexcept {
  return label == Label::Malicious ? "malicious" : "benign";
}

Label parse_label(std::string_view text) {
  if (text == "malicious") return Label::Malicious;
  if (text == "benign") return Label::Benign;
  throw Error(ErrorCode::InvalidConfig, "unknown class label '" + std::string(text) + "'");
}

namespace {

bool has_alnum(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isalnum(c) != 0; });
}

}  // namespace

Instruction parse_line(std::string_view line) {
  const std::string_view body = text::trim(line);
  if (body.empty()) throw Error(ErrorCode::EmptyLine, "empty line");

  std::size_t end = 0;
  while (end < body.size() && !text::is_space(body[end])) ++end;
  const std::string_view opcode = body.substr(0, end);
  if (!has_alnum(opcode) || opcode.find(',') != std::string_view::npos) {
    throw Error(ErrorCode::MalformedLine, "no opcode in '" + std::string(body) + "'");
  }

  Instruction out;
  out.opcode = text::to_lower(opcode);
  out.raw = std::string(body);

  const std::string_view rest = text::trim(body.substr(end));
  if (rest.empty()) return out;

  std::size_t start = 0;
  while (true) {
    const std::size_t comma = rest.find(',', start);
    const std::string_view piece =
        text::trim(rest.substr(start, comma == std::string_view::npos ? rest.size() - start
                                                                      : comma - start));
    if (piece.empty()) {
      throw Error(ErrorCode::MalformedLine, "empty operand in '" + std::string(body) + "'");
    }
    out.operands.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string render_instruction(const Instruction& instruction) {
  std::string out = instruction.opcode;
  for (std::size_t i = 0; i < instruction.operands.size(); ++i) {
    out += i == 0 ? " " : ", ";
    out += instruction.operands[i];
  }
  return out;
}

RunTrace parse_trace(std::string_view text, std::string source_id, Label label,
                     std::size_t cap) {
  RunTrace trace;
  trace.source_id = std::move(source_id);
  trace.label = label;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    if (text::trim(line).empty()) continue;
    if (trace.instructions.size() == cap) {
      trace.truncated = true;
      break;
    }
    try {
      trace.instructions.push_back(parse_line(line));
    } catch (const Error& e) {
      throw Error(e.code(),
                  trace.source_id + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return trace;
}

RunTrace load_trace(const std::filesystem::path& path, Label label, std::size_t cap) {
  const std::string contents = text::read_file(path);
  RunTrace trace = parse_trace(contents, path.stem().string(), label, cap);
  if (trace.instructions.empty()) {
    throw Error(ErrorCode::EmptyTrace, "empty trace: " + path.string());
  }
  return trace;
}

std::string render_trace(std::span<const Instruction> instructions) {
  std::string out;
  for (const auto& instruction : instructions) {
    out += render_instruction(instruction);
    out += '\n';
  }
  return out;
}

void save_trace(const std::filesystem::path& path, const RunTrace& trace) {
  text::write_file(path, render_trace(trace.instructions));
}

}  // namespace rtlstm
