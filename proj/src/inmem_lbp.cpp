#include "nslbp/inmem_lbp.hpp"

#include "nslbp/errors.hpp"

namespace nslbp {

void load_tile(Executor& ex, const MappingPlan& plan, std::span<const uint32_t> pixels,
               std::span<const uint32_t> pivots) {
  if (static_cast<int>(pixels.size()) != plan.columns ||
      static_cast<int>(pivots.size()) != plan.columns)
    fail(Err::PlanMismatch, "value count does not match plan columns");
  for (int j = 0; j < plan.columns; ++j) {
    uint64_t limit = plan.bits >= 64 ? ~0ull : (1ull << plan.bits) - 1;
    if (pixels[j] > limit || pivots[j] > limit)
      fail(Err::PlanMismatch, "value wider than the mapped bit rows");
  }
  const int size = plan.isa_size();
  // MSB of the value goes to the lowest assigned row index.
  for (int k = 0; k < plan.bits; ++k) {
    int bit = plan.bits - 1 - k;
    BitRow prow, crow;
    for (int j = 0; j < plan.columns; ++j) {
      prow.set(j, (uint64_t(pixels[j]) >> bit) & 1u);
      crow.set(j, (uint64_t(pivots[j]) >> bit) & 1u);
    }
    ex.write_row_charged(plan.pixel_row(k), prow, size, "load");
    ex.write_row_charged(plan.pivot_row(k), crow, size, "load");
  }
  // Buffer transfer: both operands, 32 bytes per transposed row.
  ex.charge(EventClass::DataLoad, "load", static_cast<uint32_t>(2 * plan.bits * kColumns / 8));
}

BitRow run_inmem_lbp(Executor& ex, const MappingPlan& plan) {
  if (plan.columns < 1 || plan.bits < 1) fail(Err::PlanMismatch, "empty mapping plan");
  const int size = plan.isa_size();
  const BitRow active = column_mask(plan.columns);

  // Result_array and LBP_array start clean.
  ex.exec(Instruction{Opcode::Ini, region::kLbpRow, -1, -1, -1, false, size});

  BitRow lbp;
  BitRow resolved;
  for (int k = 0; k < plan.bits; ++k) {
    Instruction cmp{Opcode::Cmp, region::kResultRow, plan.pixel_row(k), plan.pivot_row(k),
                    region::kZeroRow0, false, size};
    ex.exec(cmp);
    BitRow mismatch = ex.subarray().read_row(region::kResultRow) & active & ~resolved;
    if (mismatch.any()) {
      // First unequal bit: the pivot bit decides the comparison outcome.
      BitRow pivot_bits = ex.read_row_charged(plan.pivot_row(k), size, "pivot");
      lbp |= mismatch & ~pivot_bits;  // pivot 0 -> pixel > pivot -> LBP 1
      resolved |= mismatch;
      ex.write_row_charged(region::kLbpRow, lbp, size, "lbp_update");
    }
    if ((resolved & active) == active) break;  // every column decided
  }

  // Columns that matched on every compared bit: equality counts as 1.
  BitRow ties = active & ~resolved;
  if (ties.any()) {
    lbp |= ties;
    ex.write_row_charged(region::kLbpRow, lbp, size, "lbp_update");
  }
  return lbp & active;
}

}  // namespace nslbp
