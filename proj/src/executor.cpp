#include "nslbp/executor.hpp"

#include "nslbp/errors.hpp"
#include "nslbp/layout.hpp"

namespace nslbp {

void Executor::charge(EventClass cls, const std::string& op, uint32_t size) {
  trace_.events.push_back(TraceEvent{cycle_++, id_, op, size, cls, layer_});
}

void Executor::masked_write(int row, const BitRow& value, int size) {
  BitRow mask = column_mask(size);
  sa_.write_row(row, (sa_.read_row(row) & ~mask) | (value & mask));
}

void Executor::require_zero_helper(int row, int size) const {
  if ((sa_.read_row(row) & column_mask(size)).any())
    fail(Err::UninitializedHelper,
         "row " + std::to_string(row) + " must hold all-0 over the active size");
}

BitRow Executor::read_row_charged(int row, int size, const std::string& op) {
  charge(EventClass::RowRead, op, static_cast<uint32_t>(size));
  return sa_.read_row(row);
}

void Executor::write_row_charged(int row, const BitRow& bits, int size, const std::string& op) {
  masked_write(row, bits, size);
  charge(EventClass::RowWrite, op, static_cast<uint32_t>(size));
}

void Executor::exec(const Instruction& instr) {
  instr.validate();
  const int n = instr.size;
  switch (instr.op) {
    case Opcode::Copy: {
      masked_write(instr.dest, sa_.read_row(instr.src1), n);
      charge(EventClass::RowWrite, "copy", n);
      return;
    }
    case Opcode::Ini: {
      BitRow value;
      if (instr.ini_ones) value.set();
      masked_write(instr.dest, value, n);
      charge(EventClass::RowWrite, "ini", n);
      return;
    }
    case Opcode::Cmp: {
      if (instr.src1 == instr.src2) {
        // A row XORed with itself: the controller resolves it as all-0
        // without a three-row activation (duplicate rows are not drivable).
        masked_write(instr.dest, BitRow{}, n);
        charge(EventClass::InArrayCycle, "cmp", n);
        return;
      }
      require_zero_helper(instr.src3, n);
      SenseOut out = sense(sa_.activate3(instr.src1, instr.src2, instr.src3), sa_.model());
      masked_write(instr.dest, out.xor3, n);
      charge(EventClass::InArrayCycle, "cmp", n);
      return;
    }
    case Opcode::Search: {
      if (instr.src1 == instr.src2) {
        BitRow ones;
        ones.set();
        masked_write(instr.dest, ones, n);
        charge(EventClass::InArrayCycle, "search", n);
        return;
      }
      // XNOR in two cycles: cmp into dest, then complement via nor3 with the
      // layout's two all-0 service rows.
      if (instr.dest == region::kZeroRow0 || instr.dest == region::kZeroRow1)
        fail(Err::BadAddress, "search cannot target the zero service rows");
      require_zero_helper(region::kZeroRow0, n);
      require_zero_helper(region::kZeroRow1, n);
      SenseOut eq = sense(sa_.activate3(instr.src1, instr.src2, region::kZeroRow0), sa_.model());
      masked_write(instr.dest, eq.xor3, n);
      charge(EventClass::InArrayCycle, "search", n);
      SenseOut inv =
          sense(sa_.activate3(instr.dest, region::kZeroRow0, region::kZeroRow1), sa_.model());
      masked_write(instr.dest, inv.nor3, n);
      charge(EventClass::InArrayCycle, "search", n);
      return;
    }
    case Opcode::Nand3:
    case Opcode::Nor3:
    case Opcode::Carry:
    case Opcode::Sum: {
      SenseOut out = sense(sa_.activate3(instr.src1, instr.src2, instr.src3), sa_.model());
      const BitRow* value = nullptr;
      switch (instr.op) {
        case Opcode::Nand3: value = &out.nand3; break;
        case Opcode::Nor3: value = &out.nor3; break;
        case Opcode::Carry: value = &out.maj3; break;
        default: value = &out.xor3; break;
      }
      masked_write(instr.dest, *value, n);
      charge(EventClass::InArrayCycle, opcode_name(instr.op), n);
      return;
    }
  }
}

Trace run(const Program& program, SubArray& sa) {
  Trace trace;
  Executor ex(sa, program.subarray_id, trace);
  for (const Instruction& instr : program.instructions) ex.exec(instr);
  return trace;
}

}  // namespace nslbp
