#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rtlstm/trace.hpp"

namespace rtlstm {

/// Operand slot kinds of an instruction template.
enum class Slot : std::uint8_t {
  Register,      // eax
  Immediate,     // 0x10
  StackMemory,   // dword ptr ss:[ebp-0x10]
  StackAddress,  // ss:[ebp-0x10] (lea source)
  CodeAddress,   // 0x00401100 (branch target)
  DataMemory,    // dword ptr ds:[0x00402040] (indirect call)
};

struct InstructionTemplate {
  std::string opcode;
  std::vector<Slot> slots;
};

/// First-order Markov source of run-trace lines for one class.
///
/// Non-terminator templates follow `transitions`; before each step a
/// terminator is emitted instead with probability `terminator_rate`, which
/// leaves the chain state unchanged.
struct TraceGrammar {
  Label label = Label::Benign;
  std::vector<InstructionTemplate> body;
  std::vector<std::vector<double>> transitions;  // body x body, rows sum to 1
  std::vector<InstructionTemplate> terminators;
  std::vector<double> terminator_weights;
  double terminator_rate = 0.15;
  std::vector<std::string> registers;  // 8
  std::vector<double> register_weights;
  std::vector<std::string> immediates;  // 16, hex literals
  std::vector<double> immediate_weights;
  std::uint32_t address_base = 0x00401000;

  /// Throws InvalidConfig: non-stochastic rows (tolerance 1e-9), rate
  /// outside (0, 1), or pool sizes other than 8 registers / 16 immediates.
  void validate() const;
};

/// Malicious-like and benign-like grammars shipped with the library. They
/// differ in transition structure, opcode marginals, register skew,
/// immediate pools and terminator mix.
std::pair<TraceGrammar, TraceGrammar> default_grammars();

struct LengthRange {
  std::size_t min = 200;
  std::size_t max = 400;
};

/// `n_traces` traces with lengths uniform in the range. Trace i uses its own
/// generator seeded with derive_seed(seed, i), so traces can be generated
/// independently. Source ids are "<label>_<i, 5 digits>". Throws
/// InvalidRange when min < 1 or max < min.
std::vector<RunTrace> generate(const TraceGrammar& grammar, std::size_t n_traces,
                               LengthRange lengths, std::uint64_t seed);

RunTrace generate_trace(const TraceGrammar& grammar, std::size_t index, LengthRange lengths,
                        std::uint64_t seed);

/// Traces of one class from default_grammars(); the class seed is
/// derive_seed(seed, label value) so each class is reproducible on its own.
std::vector<RunTrace> generate_class(Label label, std::size_t n_traces, LengthRange lengths,
                                     std::uint64_t seed);

/// n_per_class malicious traces followed by n_per_class benign ones.
std::vector<RunTrace> generate_corpus(std::size_t n_per_class, LengthRange lengths,
                                      std::uint64_t seed);

/// Writes <out>/<label>/<source_id>.txt for every trace.
void write_corpus(const std::filesystem::path& out, std::span<const RunTrace> traces);

/// L1 distance between row `row` of two transition matrices.
double row_l1_distance(const TraceGrammar& a, const TraceGrammar& b, std::size_t row);

}  // namespace rtlstm
