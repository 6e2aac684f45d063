#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nslbp {

enum class Opcode { Copy, Ini, Cmp, Search, Nand3, Nor3, Carry, Sum };

const char* opcode_name(Opcode op);

// Assembly grammar (one instruction per line, ';' starts a comment):
//   copy   rD, rS          [#n]
//   ini    rD, zero|one    [#n]
//   cmp    rD, rA, rB, rZ  [#n]   ; rZ must hold all-0 over the active size
//   search rD, rA, rK      [#n]   ; rD = (rA == rK) column-wise, 2 cycles,
//                                 ; uses the fixed zero rows of the layout
//   nand3|nor3|carry|sum rD, rA, rB, rC [#n]
// n is 64, 128 or 256 (default 256).
struct Instruction {
  Opcode op = Opcode::Copy;
  int dest = 0;
  int src1 = -1;
  int src2 = -1;
  int src3 = -1;
  bool ini_ones = false;  // constant selector for ini
  int size = 256;

  void validate() const;
};

struct Program {
  std::vector<Instruction> instructions;
  uint32_t subarray_id = 0;
};

Program parse_program(const std::string& text);
std::string format_instruction(const Instruction& instr);
std::string format_program(const Program& program);

}  // namespace nslbp
