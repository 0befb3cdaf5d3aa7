#include <gtest/gtest.h>

#include "rtlstm/blocks.hpp"
#include "rtlstm/error.hpp"
#include "rtlstm/rng.hpp"
#include "rtlstm/synth.hpp"
#include "rtlstm/trace.hpp"
#include "support/oracles.hpp"

using namespace rtlstm;

namespace {

std::vector<Instruction> parse_all(std::initializer_list<const char*> lines) {
  std::vector<Instruction> out;
  for (const char* l : lines) out.push_back(parse_line(l));
  return out;
}

}  // namespace

TEST(ClassifyTerminator, Categories) {
  EXPECT_EQ(classify_terminator("jmp"), TerminatorClass::Branch);
  EXPECT_EQ(classify_terminator("jz"), TerminatorClass::Branch);
  EXPECT_EQ(classify_terminator("jnz"), TerminatorClass::Branch);
  EXPECT_EQ(classify_terminator("jecxz"), TerminatorClass::Branch);
  EXPECT_EQ(classify_terminator("call"), TerminatorClass::Call);
  EXPECT_EQ(classify_terminator("ret"), TerminatorClass::Return);
  EXPECT_EQ(classify_terminator("retn"), TerminatorClass::Return);
  EXPECT_EQ(classify_terminator("mov"), TerminatorClass::None);
  EXPECT_EQ(classify_terminator(""), TerminatorClass::None);
  EXPECT_EQ(classify_terminator("xor"), TerminatorClass::None);
}

TEST(Segment, SampleListingTwoBlocks) {
  const auto ins = parse_all(
      {"mov edi, eax", "add esp, 0xC", "test edi, edi", "jne 0x00428817", "mov eax, edi"});
  const auto blocks = segment(ins);
  ASSERT_EQ(blocks.size(), 2u);
  ASSERT_EQ(blocks[0].instructions.size(), 4u);
  EXPECT_EQ(blocks[0].instructions.back().opcode, "jne");
  ASSERT_EQ(blocks[1].instructions.size(), 1u);
  EXPECT_EQ(blocks[1].instructions[0].opcode, "mov");
  EXPECT_EQ(oracle::check_segmentation(ins, blocks), "");
}

TEST(Segment, CallEndsBlock) {
  const auto ins = parse_all({"mov dword ptr ss:[ebp-0x48], eax", "call dword ptr ds:[0x00401054]"});
  const auto blocks = segment(ins);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].instructions.size(), 2u);
  EXPECT_EQ(render_block(blocks[0]),
            "mov dword ptr ss:[ebp-0x48], eax call dword ptr ds:[0x00401054]");
}

TEST(Segment, SingleReturn) {
  const auto blocks = segment(parse_all({"ret"}));
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(render_bsm(blocks), "ret\n");
}

TEST(Segment, EmptyThrows) {
  try {
    segment(std::span<const Instruction>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyTrace);
    EXPECT_NE(std::string(e.what()).find("empty trace"), std::string::npos);
  }
}

TEST(RenderBsm, CallBlockLine) {
  const auto ins = parse_all({"mov esi, dword ptr ds:[0x00401180]", "mov edx, eax",
                              "lea ecx, ss:[ebp-0x30]", "call esi"});
  const auto blocks = segment(ins);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(render_bsm(blocks),
            "mov esi, dword ptr ds:[0x00401180] mov edx, eax lea ecx, ss:[ebp-0x30] call esi\n");
}

TEST(ParseBsm, CallBlockSplitsIntoInstructions) {
  const auto ins =
      parse_bsm_line("mov esi, dword ptr ds:[0x00401180] mov edx, eax lea ecx, ss:[ebp-0x30] call esi");
  ASSERT_EQ(ins.size(), 4u);
  EXPECT_EQ(ins[0].operands, (std::vector<std::string>{"esi", "dword ptr ds:[0x00401180]"}));
  EXPECT_EQ(ins[2].opcode, "lea");
  EXPECT_EQ(ins[3].operands, (std::vector<std::string>{"esi"}));
}

TEST(Segment, RandomTracesSatisfyInvariants) {
  Rng rng(4242);
  const std::vector<std::string> pool = {"mov eax, ebx", "add esp, 0x4", "push ebp", "ret",
                                         "jmp 0x00401000", "je 0x00401010", "call eax",
                                         "xor eax, eax", "nop", "retn 0x8"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Instruction> ins;
    const std::size_t n = 1 + rng.below(40);
    for (std::size_t i = 0; i < n; ++i) ins.push_back(parse_line(pool[rng.below(pool.size())]));
    const auto blocks = segment(ins);
    ASSERT_EQ(oracle::check_segmentation(ins, blocks), "") << "trial " << trial;
  }
}

TEST(Segment, RenderedSyntheticTracesResegmentIdentically) {
  const auto [malicious, benign] = default_grammars();
  for (const auto* grammar : {&malicious, &benign}) {
    for (const auto& trace : generate(*grammar, 20, {30, 120}, 11)) {
      const auto blocks = segment(trace);
      const auto reparsed = parse_bsm(render_bsm(blocks));
      ASSERT_EQ(reparsed, blocks) << trace.source_id;
      std::vector<Instruction> flat;
      for (const auto& b : reparsed) flat.insert(flat.end(), b.instructions.begin(), b.instructions.end());
      EXPECT_EQ(segment(flat), blocks);
    }
  }
}
