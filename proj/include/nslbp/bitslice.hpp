#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nslbp/bitrow.hpp"

namespace nslbp {

// Bit-transposed view of an integer vector: rows[k] holds bit k of every
// element (LSB at k = 0), element j in column j.
struct BitSliceTensor {
  int width = 0;
  int length = 0;
  std::vector<BitRow> rows;

  // Slice rendered element-0-first, e.g. C_0 of [5, 3] is "11".
  std::string slice_string(int k) const {
    std::string s(static_cast<size_t>(length), '0');
    for (int j = 0; j < length; ++j)
      if (rows[k].test(j)) s[j] = '1';
    return s;
  }
};

BitSliceTensor bit_slice(std::span<const uint64_t> x, int width);
std::vector<uint64_t> unslice(const BitSliceTensor& t);

}  // namespace nslbp
