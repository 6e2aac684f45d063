#pragma once

#include <array>
#include <string>
#include <vector>

#include "nslbp/bitrow.hpp"
#include "nslbp/voltage.hpp"

namespace nslbp {

inline constexpr int kRows = 256;

using LevelRow = std::array<double, kColumns>;  // millivolts per column

// Single-cycle sense outputs, one bit per column. Complements come for free
// from the sub-SA pairs; xor3 is the capacitive majority of (or3, min3, and3).
struct SenseOut {
  BitRow or3, maj3, and3;
  BitRow nor3, min3, nand3;
  BitRow xor3;
};

SenseOut sense(const LevelRow& levels, const VoltageModel& model);

enum class TwoInputOp { Xor2, And2, Or2, Nor2, Nand2, Xnor2 };

// One 256x256 compute sub-array. Multi-row activation never disturbs cell
// state; all results come back through the sense path.
class SubArray {
 public:
  SubArray() { reset(); }
  explicit SubArray(const VoltageModel& model) : model_(model) { reset(); }

  const VoltageModel& model() const { return model_; }

  void reset() {
    for (BitRow& r : cells_) r.reset();
  }

  void write_row(int row, const BitRow& bits);
  const BitRow& read_row(int row) const;

  // Activates three distinct rows; per column the RBL settles to the level
  // for the popcount of the three stored bits. Non-destructive.
  LevelRow activate3(int row_a, int row_b, int row_c) const;

  // Hex dump of the full grid, one row per line, for debugging.
  std::vector<std::string> dump_rows() const;

 private:
  void check_row(int row) const;

  VoltageModel model_;
  std::array<BitRow, kRows> cells_;
};

// 2-input ops built from a helper row initialized to the required constant
// (all-0 for Xor2/Or2/Nor2/Xnor2, all-1 for And2/Nand2).
BitRow logic2(const SubArray& sa, TwoInputOp op, int row_a, int row_b, int helper_row);

// One activate3 + sense yields the full-adder pair (sum = xor3, carry = maj3).
std::pair<BitRow, BitRow> full_add(const SubArray& sa, int row_a, int row_b, int row_c);

}  // namespace nslbp
