#pragma once

#include <cstdint>
#include <span>

#include "nslbp/executor.hpp"
#include "nslbp/layout.hpp"

namespace nslbp {

// Transposes `pixels` and `pivots` (one value per column, MSB first) into the
// P and C regions per the plan and charges the buffer transfer.
void load_tile(Executor& ex, const MappingPlan& plan, std::span<const uint32_t> pixels,
               std::span<const uint32_t> pivots);

// Parallel in-memory comparison: walks bit rows MSB to LSB, XORs pixel row
// against pivot row per column, and resolves each column at its first
// mismatch from the pivot bit (pivot 0 means pixel > pivot). Columns with no
// mismatch end at 1 (>= semantics). Returns one LBP bit per column; trace
// events cover every cmp, pivot read and LBP_array write.
BitRow run_inmem_lbp(Executor& ex, const MappingPlan& plan);

}  // namespace nslbp
