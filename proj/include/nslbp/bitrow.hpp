#pragma once

#include <bitset>
#include <cstdint>
#include <string>

namespace nslbp {

// One 256-column row of sub-array state. Bit j is column j.
inline constexpr int kColumns = 256;
using BitRow = std::bitset<kColumns>;

// Mask with columns [0, n) set.
inline BitRow column_mask(int n) {
  BitRow m;
  for (int i = 0; i < n && i < kColumns; ++i) m.set(i);
  return m;
}

// Hex dump, highest column in the leftmost digit.
inline std::string row_to_hex(const BitRow& row) {
  static const char* digits = "0123456789abcdef";
  std::string out(kColumns / 4, '0');
  for (int nib = 0; nib < kColumns / 4; ++nib) {
    int v = 0;
    for (int b = 0; b < 4; ++b)
      if (row.test(nib * 4 + b)) v |= 1 << b;
    out[kColumns / 4 - 1 - nib] = digits[v];
  }
  return out;
}

}  // namespace nslbp
