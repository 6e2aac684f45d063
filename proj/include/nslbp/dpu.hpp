#pragma once

#include <cstdint>

#include "nslbp/bitrow.hpp"
#include "nslbp/errors.hpp"
#include "nslbp/lbp_net.hpp"

namespace nslbp::dpu {

inline uint64_t bitcount(const BitRow& v) { return v.count(); }

// acc + count * 2^(m+n), guarding the accumulator headroom.
inline int64_t shift_accumulate(int64_t acc, uint64_t count, int m, int n) {
  if (m < 0 || n < 0 || m + n >= 62) fail(Err::Overflow, "shift distance exceeds headroom");
  unsigned long long term = 0;
  if (__builtin_mul_overflow(count, 1ull << (m + n), &term) ||
      term > static_cast<unsigned long long>(INT64_MAX))
    fail(Err::Overflow, "partial product exceeds headroom");
  long long out = 0;
  if (__builtin_add_overflow(acc, static_cast<long long>(term), &out))
    fail(Err::Overflow, "accumulator overflow");
  return out;
}

// Shifted-ReLU followed by saturation to an unsigned `bits`-wide range.
inline uint64_t activate_quantize(int64_t x, uint64_t theta, int bits) {
  if (bits < 1 || bits > 63) fail(Err::InvalidArgument, "bits must be in [1, 63]");
  uint64_t relu = x <= 0 ? 0 : shifted_relu(static_cast<uint64_t>(x), theta);
  uint64_t max = (1ull << bits) - 1;
  return relu > max ? max : relu;
}

}  // namespace nslbp::dpu
