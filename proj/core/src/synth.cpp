#include "rtlstm/synth.hpp"

#include <cmath>
#include <cstdio>
#include <iterator>
#include <numeric>

#include "rtlstm/error.hpp"
#include "rtlstm/rng.hpp"

namespace rtlstm {

void TraceGrammar::validate() const {
  const auto fail = [](const std::string& what) {
    throw Error(ErrorCode::InvalidConfig, "trace grammar: " + what);
  };
  if (body.empty() || terminators.empty()) fail("needs body and terminator templates");
  if (transitions.size() != body.size()) fail("transition matrix must be square over body");
  for (const auto& row : transitions) {
    if (row.size() != body.size()) fail("transition matrix must be square over body");
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0) fail("negative transition probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("transition rows must sum to 1");
  }
  if (terminator_weights.size() != terminators.size()) fail("one weight per terminator");
  if (!(terminator_rate > 0.0 && terminator_rate < 1.0)) fail("terminator rate must be in (0, 1)");
  if (registers.size() != 8 || register_weights.size() != 8) fail("expects 8 registers");
  if (immediates.size() != 16 || immediate_weights.size() != 16) fail("expects 16 immediates");
}

namespace {

InstructionTemplate op(std::string opcode, std::vector<Slot> slots = {}) {
  return {std::move(opcode), std::move(slots)};
}

std::vector<InstructionTemplate> body_templates() {
  using S = Slot;
  return {op("mov", {S::Register, S::Register}),    op("mov", {S::Register, S::StackMemory}),
          op("mov", {S::StackMemory, S::Register}), op("add", {S::Register, S::Immediate}),
          op("sub", {S::Register, S::Immediate}),   op("xor", {S::Register, S::Register}),
          op("test", {S::Register, S::Register}),   op("cmp", {S::Register, S::Immediate}),
          op("lea", {S::Register, S::StackAddress}), op("push", {S::Register}),
          op("push", {S::Immediate}),               op("pop", {S::Register}),
          op("and", {S::Register, S::Immediate}),   op("or", {S::Register, S::Register}),
          op("inc", {S::Register}),                 op("shl", {S::Register, S::Immediate})};
}

std::vector<InstructionTemplate> terminator_templates() {
  using S = Slot;
  return {op("jmp", {S::CodeAddress}), op("je", {S::CodeAddress}),  op("jne", {S::CodeAddress}),
          op("jz", {S::CodeAddress}),  op("jnz", {S::CodeAddress}), op("jb", {S::CodeAddress}),
          op("jl", {S::CodeAddress}),  op("ja", {S::CodeAddress}),  op("call", {S::Register}),
          op("call", {S::DataMemory}), op("ret")};
}

std::vector<double> normalized(std::vector<double> w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

// Row i: (1 - alpha) * marginal + alpha * peaks at fixed offsets from i.
std::vector<std::vector<double>> transition_matrix(const std::vector<double>& marginal,
                                                   double alpha,
                                                   std::initializer_list<std::pair<int, double>> peaks) {
  const std::size_t n = marginal.size();
  const auto base = normalized(marginal);
  std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = (1.0 - alpha) * base[j];
    for (const auto& [offset, mass] : peaks) t[i][(i + static_cast<std::size_t>(offset)) % n] += alpha * mass;
    t[i] = normalized(t[i]);
  }
  return t;
}

const std::vector<std::string> kRegisters = {"eax", "ebx", "ecx", "edx",
                                             "esi", "edi", "ebp", "esp"};

}  // namespace

std::pair<TraceGrammar, TraceGrammar> default_grammars() {
  TraceGrammar malicious;
  malicious.label = Label::Malicious;
  malicious.body = body_templates();
  malicious.transitions = transition_matrix(
      {2, 2, 3, 2, 4, 6, 2, 2, 2, 3, 5, 2, 3, 4, 3, 3}, 0.5, {{7, 0.6}, {11, 0.4}});
  malicious.terminators = terminator_templates();
  malicious.terminator_weights = normalized({2, 2, 2, 3, 3, 1, 1, 1, 3, 4, 2});
  malicious.terminator_rate = 0.16;
  malicious.registers = kRegisters;
  malicious.register_weights = normalized({2, 1, 1, 1, 7, 7, 2, 2});
  malicious.immediates = {"0x4",   "0x8",    "0x5C",  "0x7F", "0xFF",  "0x100",
                          "0x3E8", "0x1000", "0x36",  "0xDEAD", "0x80", "0x200",
                          "0x400", "0x5A",   "0x3C",  "0x44"};
  malicious.immediate_weights = normalized({3, 3, 3, 3, 3, 3, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1});

  TraceGrammar benign;
  benign.label = Label::Benign;
  benign.body = body_templates();
  benign.transitions = transition_matrix(
      {7, 4, 4, 3, 1, 2, 4, 3, 3, 5, 1, 3, 1, 1, 1, 1}, 0.5, {{1, 0.6}, {4, 0.4}});
  benign.terminators = terminator_templates();
  benign.terminator_weights = normalized({3, 3, 3, 2, 2, 1, 1, 1, 4, 2, 3});
  benign.terminator_rate = 0.16;
  benign.registers = kRegisters;
  benign.register_weights = normalized({9, 4, 7, 5, 1, 1, 1, 1});
  benign.immediates = {"0x1",  "0x2",  "0x4",  "0x8",  "0xC",  "0x10", "0x14", "0x18",
                       "0x1C", "0x20", "0x24", "0x28", "0x30", "0x34", "0x38", "0x40"};
  benign.immediate_weights = normalized({3, 3, 4, 4, 3, 3, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1});

  return {std::move(malicious), std::move(benign)};
}

namespace {

std::string hex32(std::uint32_t value) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08X", value);
  return buf;
}

std::uint32_t immediate_value(const std::string& literal) {
  return static_cast<std::uint32_t>(std::stoul(literal, nullptr, 16));
}

std::string fill_slot(const TraceGrammar& g, Slot slot, Rng& rng) {
  const auto imm = [&]() -> const std::string& {
    return g.immediates[rng.categorical(g.immediate_weights)];
  };
  switch (slot) {
    case Slot::Register: return g.registers[rng.categorical(g.register_weights)];
    case Slot::Immediate: return imm();
    case Slot::StackMemory: return "dword ptr ss:[ebp-" + imm() + "]";
    case Slot::StackAddress: return "ss:[ebp-" + imm() + "]";
    case Slot::CodeAddress: return hex32(g.address_base + immediate_value(imm()) * 16);
    case Slot::DataMemory:
      return "dword ptr ds:[" + hex32(g.address_base + 0x1000 + immediate_value(imm()) * 4) + "]";
  }
  return {};
}

Instruction instantiate(const TraceGrammar& g, const InstructionTemplate& tmpl, Rng& rng) {
  Instruction out;
  out.opcode = tmpl.opcode;
  for (Slot slot : tmpl.slots) out.operands.push_back(fill_slot(g, slot, rng));
  out.raw = render_instruction(out);
  return out;
}

}  // namespace

RunTrace generate_trace(const TraceGrammar& grammar, std::size_t index, LengthRange lengths,
                        std::uint64_t seed) {
  if (lengths.min < 1 || lengths.max < lengths.min) {
    throw Error(ErrorCode::InvalidRange, "trace length range must satisfy 1 <= min <= max");
  }
  Rng rng(derive_seed(seed, index));
  const auto length = static_cast<std::size_t>(
      rng.between(static_cast<std::int64_t>(lengths.min), static_cast<std::int64_t>(lengths.max)));

  char id[32];
  std::snprintf(id, sizeof id, "_%05zu", index);
  RunTrace trace;
  trace.source_id = std::string(to_string(grammar.label)) + id;
  trace.label = grammar.label;
  trace.instructions.reserve(length);

  auto state = static_cast<std::size_t>(rng.below(grammar.body.size()));
  for (std::size_t i = 0; i < length; ++i) {
    if (rng.bernoulli(grammar.terminator_rate)) {
      const auto& tmpl = grammar.terminators[rng.categorical(grammar.terminator_weights)];
      trace.instructions.push_back(instantiate(grammar, tmpl, rng));
    } else {
      state = rng.categorical(grammar.transitions[state]);
      trace.instructions.push_back(instantiate(grammar, grammar.body[state], rng));
    }
  }
  return trace;
}

std::vector<RunTrace> generate(const TraceGrammar& grammar, std::size_t n_traces,
                               LengthRange lengths, std::uint64_t seed) {
  grammar.validate();
  if (lengths.min < 1 || lengths.max < lengths.min) {
    throw Error(ErrorCode::InvalidRange, "trace length range must satisfy 1 <= min <= max");
  }
  std::vector<RunTrace> traces;
  traces.reserve(n_traces);
  for (std::size_t i = 0; i < n_traces; ++i) {
    traces.push_back(generate_trace(grammar, i, lengths, seed));
  }
  return traces;
}

std::vector<RunTrace> generate_class(Label label, std::size_t n_traces, LengthRange lengths,
                                     std::uint64_t seed) {
  const auto [malicious, benign] = default_grammars();
  const TraceGrammar& grammar = label == Label::Malicious ? malicious : benign;
  return generate(grammar, n_traces, lengths, derive_seed(seed, static_cast<std::uint64_t>(label)));
}

std::vector<RunTrace> generate_corpus(std::size_t n_per_class, LengthRange lengths,
                                      std::uint64_t seed) {
  auto traces = generate_class(Label::Malicious, n_per_class, lengths, seed);
  auto benign = generate_class(Label::Benign, n_per_class, lengths, seed);
  traces.insert(traces.end(), std::make_move_iterator(benign.begin()),
                std::make_move_iterator(benign.end()));
  return traces;
}

void write_corpus(const std::filesystem::path& out, std::span<const RunTrace> traces) {
  for (const auto& trace : traces) {
    save_trace(out / std::string(to_string(trace.label)) / (trace.source_id + ".txt"), trace);
  }
}

double row_l1_distance(const TraceGrammar& a, const TraceGrammar& b, std::size_t row) {
  double total = 0.0;
  for (std::size_t j = 0; j < a.transitions[row].size(); ++j) {
    total += std::abs(a.transitions[row][j] - b.transitions[row][j]);
  }
  return total;
}

}  // namespace rtlstm
