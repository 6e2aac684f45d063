#include "nslbp/dpu.hpp"

#include <algorithm>

#include "test_support.hpp"

using namespace nslbp;

TEST_CASE("bitcount") {
  BitRow v;
  CHECK(dpu::bitcount(v) == 0);
  v.set();
  CHECK(dpu::bitcount(v) == 256);

  Rng rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    BitRow r;
    int expect = 0;
    for (int j = 0; j < 256; ++j)
      if (rng.chance(0.4)) {
        r.set(j);
        ++expect;
      }
    CHECK(dpu::bitcount(r) == uint64_t(expect));
  }
}

TEST_CASE("shift_accumulate") {
  CHECK(dpu::shift_accumulate(0, 1, 2, 1) == 8);  // the x2^(2+1) example
  CHECK(dpu::shift_accumulate(41, 0, 5, 5) == 41);

  // Random sequences equal a wide-integer sum, independent of order.
  Rng rng(7);
  for (int iter = 0; iter < 100; ++iter) {
    size_t terms = 1 + rng.below(20);
    std::vector<std::tuple<uint64_t, int, int>> seq;
    __int128 expect = 0;
    for (size_t t = 0; t < terms; ++t) {
      uint64_t count = rng.below(257);
      int m = int(rng.below(8));
      int n = int(rng.below(8));
      seq.emplace_back(count, m, n);
      expect += __int128(count) << (m + n);
    }
    int64_t acc = 0;
    for (auto [count, m, n] : seq) acc = dpu::shift_accumulate(acc, count, m, n);
    CHECK(acc == int64_t(expect));

    // Any permutation gives the same accumulator.
    for (size_t t = 0; t + 1 < seq.size(); t += 2) std::swap(seq[t], seq[t + 1]);
    int64_t acc2 = 0;
    for (auto [count, m, n] : seq) acc2 = dpu::shift_accumulate(acc2, count, m, n);
    CHECK(acc2 == acc);
  }

  CHECK_ERR(dpu::shift_accumulate(0, 1, 40, 40), Err::Overflow);
  CHECK_ERR(dpu::shift_accumulate(INT64_MAX, 1, 0, 0), Err::Overflow);
}

TEST_CASE("activate_quantize") {
  CHECK(dpu::activate_quantize(5, 9, 4) == 0);   // below the shift
  CHECK(dpu::activate_quantize(-3, 0, 4) == 0);  // negative input
  CHECK(dpu::activate_quantize(1000000, 0, 4) == 15);
  CHECK(dpu::activate_quantize(13, 8, 4) == 5);

  // Monotone non-decreasing in x.
  Rng rng(11);
  for (int iter = 0; iter < 200; ++iter) {
    uint64_t theta = rng.below(32);
    int bits = 1 + int(rng.below(8));
    int64_t x = int64_t(rng.below(1000)) - 200;
    CHECK(dpu::activate_quantize(x, theta, bits) <= dpu::activate_quantize(x + 1, theta, bits));
  }
}
