#include "nslbp/inmem_lbp.hpp"
#include "nslbp/mlp_compile.hpp"

#include <set>

#include "test_support.hpp"
#include "nslbp/layout.hpp"

using namespace nslbp;

TEST_CASE("build_layout capacity rules") {
  MappingPlan plan = build_layout(4, 8);
  CHECK(plan.columns == 4);
  CHECK(plan.bits == 8);
  CHECK(plan.pixel_row(0) == region::kPixelBase);
  CHECK(plan.pixel_row(7) == region::kPixelBase + 7);
  CHECK(plan.pivot_row(0) == region::kPivotBase);
  CHECK(plan.isa_size() == 64);

  MappingPlan tiny = build_layout(1, 1);
  CHECK(tiny.columns == 1);
  CHECK(tiny.bits == 1);

  CHECK_ERR(build_layout(300, 8), Err::CapacityExceeded);
  CHECK_ERR(build_layout(4, 65), Err::CapacityExceeded);
  CHECK_ERR(build_layout(0, 8), Err::InvalidArgument);

  CHECK(mapping_plan_json(plan).find("\"columns\": 4") != std::string::npos);
}

TEST_CASE("load_tile transposes values MSB first") {
  SubArray sa;
  Trace trace;
  Executor ex(sa, 0, trace);
  MappingPlan plan = build_layout(4, 8);
  std::vector<uint32_t> pixels = {128, 32, 63, 129};
  std::vector<uint32_t> pivots(4, 64);
  load_tile(ex, plan, pixels, pivots);
  // MSB row: only the values with bit 7 set.
  const BitRow& msb = sa.read_row(plan.pixel_row(0));
  CHECK(msb.test(0));
  CHECK_FALSE(msb.test(1));
  CHECK_FALSE(msb.test(2));
  CHECK(msb.test(3));
  // Pivot 64 = 0b01000000: bit 6 row set everywhere.
  CHECK(sa.read_row(plan.pivot_row(1)) == column_mask(4));
  CHECK(sa.read_row(plan.pivot_row(0)).none());

  std::vector<uint32_t> wide = {256, 0, 0, 0};
  CHECK_ERR(load_tile(ex, plan, wide, pivots), Err::PlanMismatch);
  std::vector<uint32_t> three(3, 0);
  CHECK_ERR(load_tile(ex, plan, three, pivots), Err::PlanMismatch);
}

TEST_CASE("in-memory comparison walkthrough with four pixels") {
  // Pivot 64 (MSB 0); P3 and P0 mismatch at the MSB and resolve to 1, the
  // middle pixels resolve to 0 one bit later: final pattern 1001.
  SubArray sa;
  Trace trace;
  Executor ex(sa, 0, trace);
  MappingPlan plan = build_layout(4, 8);
  load_tile(ex, plan, std::vector<uint32_t>{128, 32, 63, 129}, std::vector<uint32_t>(4, 64));
  size_t before = trace.events.size();
  BitRow lbp = run_inmem_lbp(ex, plan);
  CHECK(lbp.test(0));
  CHECK_FALSE(lbp.test(1));
  CHECK_FALSE(lbp.test(2));
  CHECK(lbp.test(3));
  // Every column resolves within two bit iterations, so the loop exits early.
  size_t cmp_events = 0;
  for (size_t i = before; i < trace.events.size(); ++i)
    if (trace.events[i].op == "cmp") ++cmp_events;
  CHECK(cmp_events == 2);
  // The in-array LBP row matches the returned bits.
  CHECK((sa.read_row(region::kLbpRow) & column_mask(4)) == lbp);
}

TEST_CASE("equal pixels run the full depth and resolve to 1") {
  SubArray sa;
  Trace trace;
  Executor ex(sa, 0, trace);
  MappingPlan plan = build_layout(8, 8);
  std::vector<uint32_t> values(8, 170);
  load_tile(ex, plan, values, values);
  size_t before = trace.events.size();
  BitRow lbp = run_inmem_lbp(ex, plan);
  CHECK((lbp & column_mask(8)) == column_mask(8));
  size_t cmp_events = 0;
  for (size_t i = before; i < trace.events.size(); ++i)
    if (trace.events[i].op == "cmp") ++cmp_events;
  CHECK(cmp_events == 8);  // constant trip count, no early exit on ties
}

TEST_CASE("in-memory comparison equals the comparator exhaustively") {
  // Exhaustive (pixel, pivot) pairs for widths 1..6, batched across columns.
  for (int width = 1; width <= 6; ++width) {
    uint32_t top = 1u << width;
    std::vector<std::pair<uint32_t, uint32_t>> pairs;
    for (uint32_t p = 0; p < top; ++p)
      for (uint32_t c = 0; c < top; ++c) pairs.emplace_back(p, c);
    size_t done = 0;
    while (done < pairs.size()) {
      size_t batch = std::min<size_t>(kColumns, pairs.size() - done);
      std::vector<uint32_t> pixels(batch), pivots(batch);
      for (size_t j = 0; j < batch; ++j) {
        pixels[j] = pairs[done + j].first;
        pivots[j] = pairs[done + j].second;
      }
      SubArray sa;
      Trace trace;
      Executor ex(sa, 0, trace);
      MappingPlan plan = build_layout(int(batch), width);
      load_tile(ex, plan, pixels, pivots);
      BitRow lbp = run_inmem_lbp(ex, plan);
      for (size_t j = 0; j < batch; ++j) {
        bool expect = pixels[j] >= pivots[j];
        CHECK(lbp.test(j) == expect);
      }
      // Locality: every event targets this sub-array.
      std::set<uint32_t> ids;
      for (const TraceEvent& e : trace.events) ids.insert(e.subarray);
      CHECK(ids.size() == 1);
      done += batch;
    }
  }
}

TEST_CASE("bit_slice and unslice") {
  std::vector<uint64_t> v = {5, 3};
  BitSliceTensor t = bit_slice(v, 3);
  CHECK(t.slice_string(0) == "11");
  CHECK(t.slice_string(1) == "01");
  CHECK(t.slice_string(2) == "10");
  CHECK(unslice(t) == v);

  std::vector<uint64_t> zeros(7, 0);
  BitSliceTensor z = bit_slice(zeros, 4);
  for (int k = 0; k < 4; ++k) CHECK(z.rows[k].none());

  Rng rng(77);
  for (int iter = 0; iter < 200; ++iter) {
    int width = 1 + int(rng.below(16));
    size_t len = 1 + rng.below(64);
    std::vector<uint64_t> x(len);
    for (uint64_t& e : x) e = rng.below(1ull << width);
    CHECK(unslice(bit_slice(x, width)) == x);
  }

  std::vector<uint64_t> wide = {16};
  CHECK_ERR(bit_slice(wide, 4), Err::WidthTooSmall);
}

TEST_CASE("compiled MLP pipeline equals the integer dot product") {
  SUBCASE("LSB slice of the worked example") {
    std::vector<uint64_t> acts = {2, 1, 3, 2};  // LSBs 0,1,1,0
    BitSliceTensor t = bit_slice(acts, 3);
    CHECK(t.slice_string(0) == "0110");
  }

  SUBCASE("single-bit operands reduce to a popcount of AND") {
    std::vector<uint64_t> w = {1, 0, 1, 1, 0};
    std::vector<uint64_t> i = {1, 1, 1, 0, 0};
    CompiledMlp compiled = compile_mlp_layer(w, i, 1, 1);
    CHECK(compiled.program.instructions.size() == 1);
    SubArray sa;
    Trace trace;
    Executor ex(sa, 0, trace);
    CHECK(run_mlp(ex, compiled) == 2);
  }

  SUBCASE("exhaustive 2-element 3-bit vectors") {
    for (uint64_t w0 = 0; w0 < 8; ++w0)
      for (uint64_t w1 = 0; w1 < 8; ++w1)
        for (uint64_t i0 = 0; i0 < 8; ++i0)
          for (uint64_t i1 = 0; i1 < 8; ++i1) {
            std::vector<uint64_t> w = {w0, w1};
            std::vector<uint64_t> i = {i0, i1};
            CompiledMlp compiled = compile_mlp_layer(w, i, 3, 3);
            SubArray sa;
            Trace trace;
            Executor ex(sa, 0, trace);
            int64_t got = run_mlp(ex, compiled);
            CHECK(got == int64_t(w0 * i0 + w1 * i1));
          }
  }

  SUBCASE("random vectors against a wide-integer oracle") {
    Rng rng(81);
    for (int iter = 0; iter < 300; ++iter) {
      int n_bits = 1 + int(rng.below(8));
      int m_bits = 1 + int(rng.below(8));
      size_t len = 1 + rng.below(64);
      std::vector<uint64_t> w(len), v(len);
      for (uint64_t& x : w) x = rng.below(1ull << n_bits);
      for (uint64_t& x : v) x = rng.below(1ull << m_bits);
      CompiledMlp compiled = compile_mlp_layer(w, v, n_bits, m_bits);
      SubArray sa;
      Trace trace;
      Executor ex(sa, 0, trace);
      int64_t got = run_mlp(ex, compiled);
      __int128 expect = 0;
      for (size_t j = 0; j < len; ++j) expect += __int128(w[j]) * __int128(v[j]);
      CHECK(got == int64_t(expect));
    }
  }

  SUBCASE("capacity limits") {
    std::vector<uint64_t> v(10, 0);
    CHECK_ERR(compile_mlp_layer(v, v, 33, 3), Err::CapacityExceeded);
    CHECK_ERR(compile_mlp_layer(v, v, 3, 33), Err::CapacityExceeded);
    std::vector<uint64_t> long_v(300, 0);
    CHECK_ERR(compile_mlp_layer(long_v, long_v, 3, 3), Err::CapacityExceeded);
  }
}
