#include "nslbp/lbp_net.hpp"

#include <algorithm>

#include "test_support.hpp"

using namespace nslbp;

namespace {

// Test-side reference for a full LBP layer, evaluated directly from the
// original layer description with PAC realized as significance/out_bit masks.
// Deliberately shares no pruning or encoding code with the library.
FeatureMap naive_lbp_layer(const FeatureMap& fm, const LbpLayer& layer, int apx) {
  auto value = [&](uint32_t c, int y, int x) -> uint32_t {
    if (y < 0 || x < 0 || y >= int(fm.height) || x >= int(fm.width)) return 0;
    return fm.at(c, y, x);
  };
  uint32_t K = uint32_t(layer.outputs.size());
  int max_bits = 0;
  for (const LbpOutputSpec& out : layer.outputs)
    max_bits = std::max(max_bits, out.proj.code_bits());
  uint32_t out_bits = layer.joint ? std::max(fm.bits, uint32_t(max_bits)) : uint32_t(max_bits);
  FeatureMap out(layer.joint ? fm.channels + K : K, fm.height, fm.width, out_bits);
  if (layer.joint)
    for (uint32_t c = 0; c < fm.channels; ++c)
      for (uint32_t y = 0; y < fm.height; ++y)
        for (uint32_t x = 0; x < fm.width; ++x) out.at(c, y, x) = fm.at(c, y, x);
  for (uint32_t o = 0; o < K; ++o) {
    const LbpOutputSpec& spec = layer.outputs[o];
    int m = spec.proj.entry_count();
    uint64_t theta = layer.relu_shift ? *layer.relu_shift : (1u << (m - 1));
    for (uint32_t y = 0; y < fm.height; ++y)
      for (uint32_t x = 0; x < fm.width; ++x) {
        uint64_t fused = 0;
        for (const ProjEntry& e : spec.proj.entries) {
          if (e.out_bit < apx) continue;  // skipped memory access
          const LbpKernel& k = spec.kernels[e.channel];
          const LbpSample& s = k.samples[e.sample];
          if (s.significance < apx) continue;  // skipped comparison
          int pad = (k.extent - 1) / 2;
          uint32_t pivot = value(e.channel, int(y) - pad + k.pivot_row, int(x) - pad + k.pivot_col);
          uint32_t sample = value(e.channel, int(y) - pad + s.row, int(x) - pad + s.col);
          if (sample >= pivot) fused |= 1ull << e.out_bit;
        }
        out.at(layer.joint ? fm.channels + o : o, y, x) =
            uint32_t(fused > theta ? fused - theta : 0);
      }
  }
  return out;
}

LbpLayer random_layer(Rng& rng, uint32_t in_channels, uint32_t out_channels, int min_samples,
                      int max_samples, int m, bool joint) {
  LbpLayer layer;
  layer.joint = joint;
  for (uint32_t o = 0; o < out_channels; ++o) {
    LbpOutputSpec out;
    std::vector<int> counts;
    for (uint32_t c = 0; c < in_channels; ++c) {
      int samples = int(rng.range(min_samples, max_samples));
      LbpKernel k;
      k.extent = rng.chance(0.2) ? 5 : 3;
      k.pivot_row = int(rng.below(k.extent));
      k.pivot_col = int(rng.below(k.extent));
      int cells_total = k.extent * k.extent;
      std::vector<int> cells;
      for (int p = 0; p < cells_total; ++p)
        if (p != k.pivot_row * k.extent + k.pivot_col) cells.push_back(p);
      for (int i = 0; i < samples; ++i) {
        int j = i + int(rng.below(cells.size() - i));
        std::swap(cells[i], cells[j]);
      }
      std::vector<int> sig(samples);
      for (int i = 0; i < samples; ++i) sig[i] = i;
      for (int i = samples - 1; i > 0; --i) std::swap(sig[i], sig[int(rng.below(i + 1))]);
      for (int i = 0; i < samples; ++i)
        k.samples.push_back(LbpSample{cells[i] / k.extent, cells[i] % k.extent, sig[i]});
      out.kernels.push_back(k);
      counts.push_back(samples);
    }
    std::vector<int> bits(m);
    for (int i = 0; i < m; ++i) bits[i] = i;
    for (int i = m - 1; i > 0; --i) std::swap(bits[i], bits[int(rng.below(i + 1))]);
    for (int i = 0; i < m; ++i) {
      int channel = int(rng.below(in_channels));
      out.proj.entries.push_back(ProjEntry{channel, int(rng.below(counts[channel])), bits[i]});
    }
    layer.outputs.push_back(out);
  }
  return layer;
}

}  // namespace

TEST_CASE("compute_padding matches the closed form") {
  CHECK(compute_padding(1, 5, 5, 3) == 1);
  CHECK(compute_padding(1, 7, 7, 1) == 0);
  CHECK(compute_padding(1, 16, 16, 1) == 0);

  // Oracle: count sliding-window outputs on an enumerated padded axis.
  auto outputs_with_pad = [](int stride, int in, int f, int pad) {
    int padded = in + 2 * pad;
    int count = 0;
    for (int start = 0; start + f <= padded; start += stride) ++count;
    return count;
  };
  int pad = compute_padding(2, 3, 5, 3);
  CHECK(pad == 1);
  CHECK(outputs_with_pad(2, 5, 3, pad) == 3);

  // The returned degree always reproduces `out` outputs.
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    int s = int(rng.range(1, 3));
    int in = int(rng.range(1, 24));
    int f = int(rng.range(1, 7));
    int out = int(rng.range(1, 24));
    try {
      int p = compute_padding(s, out, in, f);
      CHECK(outputs_with_pad(s, in, f, p) == out);
    } catch (const Error& e) {
      bool expected = e.code() == Err::NegativePadding || e.code() == Err::NonIntegerPadding;
      CHECK(expected);
    }
  }

  CHECK_ERR(compute_padding(1, 2, 8, 3), Err::NegativePadding);
  CHECK_ERR(compute_padding(1, 5, 5, 4), Err::NonIntegerPadding);
  CHECK_ERR(compute_padding(0, 5, 5, 3), Err::InvalidArgument);
}

TEST_CASE("lbp_encode compares samples against the pivot") {
  LbpKernel k = testsup::fixed_kernel(8);
  std::vector<uint32_t> flat(9, 42);  // all equal: >= holds everywhere
  CHECK(lbp_encode(flat, 3, k) == 255);

  std::vector<uint32_t> below(9, 3);
  below[4] = 200;  // pivot at (1,1)
  CHECK(lbp_encode(below, 3, k) == 0);

  // Oracle: direct per-definition scalar loop.
  Rng rng(5);
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<uint32_t> patch(9);
    for (uint32_t& v : patch) v = uint32_t(rng.below(256));
    uint32_t expected = 0;
    for (const LbpSample& s : k.samples)
      if (patch[s.row * 3 + s.col] >= patch[4]) expected |= 1u << s.significance;
    CHECK(lbp_encode(patch, 3, k) == expected);
  }

  std::vector<uint32_t> wrong(4, 0);
  CHECK_ERR(lbp_encode(wrong, 2, k), Err::ShapeMismatch);
}

TEST_CASE("lbp_encode flips exactly one bit per sample transition") {
  LbpKernel k = testsup::fixed_kernel(6);
  Rng rng(17);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<uint32_t> patch(9);
    for (uint32_t& v : patch) v = 1 + uint32_t(rng.below(200));
    int which = int(rng.below(k.samples.size()));
    const LbpSample& s = k.samples[which];
    uint32_t pivot = patch[4];
    patch[s.row * 3 + s.col] = pivot > 0 ? pivot - 1 : 0;  // strictly below
    if (patch[4] == 0) continue;
    uint32_t low = lbp_encode(patch, 3, k);
    patch[s.row * 3 + s.col] = pivot;  // >= now holds
    uint32_t high = lbp_encode(patch, 3, k);
    CHECK((low ^ high) == (1u << s.significance));
  }
}

TEST_CASE("apply_pac prunes lowest significances and out bits") {
  LbpKernel k = testsup::fixed_kernel(5);
  ProjectionMap proj = testsup::fixed_proj(4, 1, 5);

  SUBCASE("apx 0 is the identity") {
    auto [pk, pp] = apply_pac(k, proj, ApproxConfig{0});
    CHECK(pk.sample_count() == 5);
    CHECK(pp.entry_count() == 4);
    for (int i = 0; i < 5; ++i) CHECK(pk.samples[i].significance == k.samples[i].significance);
  }

  SUBCASE("one approximated bit drops one sample and one entry") {
    auto [pk, pp] = apply_pac(k, proj, ApproxConfig{1});
    CHECK(pk.sample_count() == 4);
    CHECK(pp.entry_count() == 3);
    for (const LbpSample& s : pk.samples) CHECK(s.significance >= 1);
    for (const ProjEntry& e : pp.entries) CHECK(e.out_bit >= 1);
  }

  SUBCASE("out of range apx") {
    CHECK_ERR(apply_pac(k, proj, ApproxConfig{5}), Err::ApxOutOfRange);
    CHECK_ERR(apply_pac(k, proj, ApproxConfig{-1}), Err::ApxOutOfRange);
  }

  SUBCASE("pruned sources are marked, surviving references remapped") {
    // Entry referencing the lowest-significance sample must survive as a
    // zero-contributor when only the out_bit keeps it alive.
    ProjectionMap p2;
    for (int i = 0; i < 4; ++i) p2.entries.push_back(ProjEntry{0, 4, 3 - i});  // sample 4: sig 0
    auto [pk, pp] = apply_pac(k, p2, ApproxConfig{1});
    CHECK(pk.sample_count() == 4);
    REQUIRE(pp.entry_count() == 3);
    for (const ProjEntry& e : pp.entries) CHECK(e.sample == ProjectionMap::kPrunedSource);
  }
}

TEST_CASE("PAC nesting: higher apx performs a subset of operations") {
  Rng rng(23);
  for (int iter = 0; iter < 50; ++iter) {
    LbpKernel k = testsup::fixed_kernel(6);
    ProjectionMap proj = testsup::fixed_proj(5, 1, 6);
    int a1 = int(rng.below(3));
    int a2 = a1 + 1 + int(rng.below(2));
    auto [k1, p1] = apply_pac(k, proj, ApproxConfig{a1});
    auto [k2, p2] = apply_pac(k, proj, ApproxConfig{a2});
    for (const LbpSample& s : k2.samples) {
      bool found = false;
      for (const LbpSample& t : k1.samples)
        if (t.row == s.row && t.col == s.col && t.significance == s.significance) found = true;
      CHECK(found);
    }
    for (const ProjEntry& e : p2.entries) {
      bool found = false;
      for (const ProjEntry& f : p1.entries)
        if (f.out_bit == e.out_bit && f.channel == e.channel) found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("approximated fused outputs are divisible by 2^apx") {
  // Enumerate every output pixel of a random 4x4 image with an 8-sample
  // kernel, m = 4, apx = 2: the two lowest output bits are forced to zero.
  Rng rng(31);
  FeatureMap fm(1, 4, 4, 8);
  for (uint32_t& v : fm.data) v = uint32_t(rng.below(256));

  LbpLayer layer;
  layer.relu_shift = 0;  // keep the raw fused codes observable
  LbpOutputSpec out;
  out.kernels.push_back(testsup::fixed_kernel(8));
  out.proj = testsup::fixed_proj(4, 1, 8);
  layer.outputs.push_back(out);

  FeatureMap ofmap = lbp_layer_forward(fm, layer, ApproxConfig{2});
  for (uint32_t v : ofmap.data) CHECK(v % 4 == 0);
}

TEST_CASE("shifted_relu") {
  CHECK(shifted_relu(9, 0) == 9);
  CHECK(shifted_relu(0, 5) == 0);
  CHECK(shifted_relu(13, 8) == 5);  // default theta for m = 4 is 2^3
  CHECK(shifted_relu(8, 8) == 0);
}

TEST_CASE("all-zero ifmap saturates the fused code") {
  FeatureMap fm(2, 5, 5, 8);  // zeros
  LbpLayer layer;
  layer.relu_shift = 0;
  LbpOutputSpec out;
  out.kernels.push_back(testsup::fixed_kernel(5));
  out.kernels.push_back(testsup::fixed_kernel(5));
  out.proj = testsup::fixed_proj(4, 2, 5);
  layer.outputs.push_back(out);
  FeatureMap ofmap = lbp_layer_forward(fm, layer, ApproxConfig{0});
  for (uint32_t v : ofmap.data) CHECK(v == 15);  // 2^m - 1 before the shift
}

TEST_CASE("the two-channel approximate tally per output pixel") {
  // Two kernels with four samples each (five elements counting the pivot),
  // four projection entries, one approximated bit: 11 reads, 6 comparisons,
  // 9 writes per output pixel.
  FeatureMap fm(2, 6, 6, 8);
  Rng rng(41);
  for (uint32_t& v : fm.data) v = uint32_t(rng.below(256));

  LbpLayer layer;
  LbpOutputSpec out;
  out.kernels.push_back(testsup::fixed_kernel(4));
  out.kernels.push_back(testsup::fixed_kernel(4));
  out.proj = testsup::fixed_proj(4, 2, 4);
  layer.outputs.push_back(out);

  OpCount tally;
  lbp_layer_forward(fm, layer, ApproxConfig{1}, &tally);
  uint64_t pixels = 36;
  CHECK(tally.reads == 11 * pixels);
  CHECK(tally.comparisons == 6 * pixels);
  CHECK(tally.writes == 9 * pixels);

  OpCount exact;
  lbp_layer_forward(fm, layer, ApproxConfig{0}, &exact);
  CHECK(exact.reads == 14 * pixels);
  CHECK(exact.comparisons == 8 * pixels);
  CHECK(exact.writes == 12 * pixels);
}

TEST_CASE("layer forward equals the naive oracle") {
  Rng rng(53);
  // A fixed 8x8 two-channel case first, then a randomized sweep.
  FeatureMap fm(2, 8, 8, 8);
  for (uint32_t& v : fm.data) v = uint32_t(rng.below(256));
  LbpLayer layer = random_layer(rng, 2, 3, 4, 6, 4, false);
  CHECK(lbp_layer_forward(fm, layer, ApproxConfig{0}) == naive_lbp_layer(fm, layer, 0));

  for (int iter = 0; iter < 1000; ++iter) {
    uint32_t ch = 1 + uint32_t(rng.below(3));
    uint32_t h = 2 + uint32_t(rng.below(15));
    uint32_t w = 2 + uint32_t(rng.below(15));
    FeatureMap img(ch, h, w, 8);
    for (uint32_t& v : img.data) v = uint32_t(rng.below(256));
    bool joint = rng.chance(0.3);
    LbpLayer l = random_layer(rng, ch, 1 + uint32_t(rng.below(2)), 3, 6, 4, joint);
    int apx = int(rng.below(3));
    FeatureMap got = lbp_layer_forward(img, l, ApproxConfig{apx});
    FeatureMap want = naive_lbp_layer(img, l, apx);
    REQUIRE(got == want);

    // Spatial invariance and joint passthrough.
    CHECK(got.height == h);
    CHECK(got.width == w);
    if (joint)
      for (uint32_t c = 0; c < ch; ++c)
        for (uint32_t y = 0; y < h; ++y)
          for (uint32_t x = 0; x < w; ++x) CHECK(got.at(c, y, x) == img.at(c, y, x));
  }
}

TEST_CASE("head_forward") {
  SUBCASE("identity weights pass pooled activations through") {
    FeatureMap fm(1, 4, 4, 4);
    Rng rng(61);
    for (uint32_t& v : fm.data) v = uint32_t(rng.below(16));
    AvgPoolSpec pool{2};
    size_t flat = 4;
    MlpSpec mlp1{4, 4, {}};
    MlpSpec mlp2{4, 4, {}};
    for (size_t r = 0; r < flat; ++r) {
      std::vector<uint64_t> row(flat, 0);
      row[r] = 1;
      mlp1.weights.push_back(row);
      mlp2.weights.push_back(row);
    }
    BatchNormSpec bn;
    bn.gamma_fx.assign(flat, 1ll << 16);
    bn.beta_fx.assign(flat, 0);
    std::vector<int64_t> scores = head_forward(fm, pool, mlp1, mlp2, bn);
    FeatureMap pooled = avg_pool_forward(fm, pool);
    REQUIRE(scores.size() == flat);
    for (size_t i = 0; i < flat; ++i) CHECK(scores[i] == int64_t(pooled.data[i]));
  }

  SUBCASE("zero weights leave only the offset") {
    FeatureMap fm(1, 2, 2, 4);
    fm.data = {1, 2, 3, 4};
    MlpSpec mlp1{3, 4, {std::vector<uint64_t>(4, 0), std::vector<uint64_t>(4, 0)}};
    MlpSpec mlp2{3, 4, {std::vector<uint64_t>(2, 0)}};
    BatchNormSpec bn;
    bn.gamma_fx = {1ll << 16};
    bn.beta_fx = {-7ll << 16};
    std::vector<int64_t> scores = head_forward(fm, AvgPoolSpec{1}, mlp1, mlp2, bn);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0] == -7);
  }

  SUBCASE("random 3-bit weights against a wide-integer oracle") {
    Rng rng(71);
    for (int iter = 0; iter < 100; ++iter) {
      uint32_t side = 2 * (1 + uint32_t(rng.below(3)));
      FeatureMap fm(1, side, side, 6);
      for (uint32_t& v : fm.data) v = uint32_t(rng.below(64));
      AvgPoolSpec pool{2};
      size_t flat = (side / 2) * (side / 2);
      size_t hidden = 1 + rng.below(4);
      size_t classes = 1 + rng.below(3);
      auto rand_matrix = [&](size_t rows, size_t cols) {
        std::vector<std::vector<uint64_t>> m(rows, std::vector<uint64_t>(cols));
        for (auto& row : m)
          for (uint64_t& v : row) v = rng.below(8);
        return m;
      };
      MlpSpec mlp1{3, 3, rand_matrix(hidden, flat)};
      MlpSpec mlp2{3, 3, rand_matrix(classes, hidden)};
      BatchNormSpec bn;
      for (size_t i = 0; i < classes; ++i) {
        bn.gamma_fx.push_back(int64_t(1 + rng.below(3)) << 16);
        bn.beta_fx.push_back(int64_t(rng.range(-5, 5)) << 16);
      }
      std::vector<int64_t> scores = head_forward(fm, pool, mlp1, mlp2, bn);

      // Oracle: plain wide-integer evaluation of the same chain.
      FeatureMap pooled = avg_pool_forward(fm, pool);
      std::vector<__int128> v;
      for (uint32_t x : pooled.data) v.push_back(x >> 3);  // 6 -> 3 bits
      std::vector<__int128> h1(hidden, 0);
      for (size_t r = 0; r < hidden; ++r)
        for (size_t c = 0; c < flat; ++c) h1[r] += __int128(mlp1.weights[r][c]) * v[c];
      std::vector<__int128> h2(classes, 0);
      for (size_t r = 0; r < classes; ++r)
        for (size_t c = 0; c < hidden; ++c) h2[r] += __int128(mlp2.weights[r][c]) * h1[c];
      REQUIRE(scores.size() == classes);
      for (size_t i = 0; i < classes; ++i) {
        __int128 expect = (__int128(bn.gamma_fx[i]) * h2[i] + bn.beta_fx[i]) >> 16;
        CHECK(scores[i] == int64_t(expect));
      }
    }
  }

  SUBCASE("average pooling rounds half up") {
    FeatureMap fm(1, 2, 2, 8);
    fm.data = {1, 0, 0, 1};  // mean 0.5
    FeatureMap pooled = avg_pool_forward(fm, AvgPoolSpec{2});
    CHECK(pooled.data[0] == 1);
    CHECK(mean_round_half_up(5, 2) == 3);
    CHECK(mean_round_half_up(4, 9) == 0);
    CHECK(mean_round_half_up(5, 9) == 1);
  }
}

TEST_CASE("operation count formulas") {
  OpCount base = count_ops_lbpnet(5, 2, 4);
  CHECK(base.reads == 14);
  CHECK(base.comparisons == 8);
  CHECK(base.writes == 12);

  OpCount single = count_ops_lbpnet(1, 1, 0);
  CHECK(single.reads == 1);
  CHECK(single.comparisons == 0);
  CHECK(single.writes == 0);

  OpCount derived = count_ops_lbpnet(3, 4, 2);
  CHECK(derived.reads == 14);
  CHECK(derived.comparisons == 8);
  CHECK(derived.writes == 10);

  OpCount apx1 = count_ops_aplbp(5, 2, 4, 1);
  CHECK(apx1.reads == 11);
  CHECK(apx1.comparisons == 6);
  CHECK(apx1.writes == 9);

  OpCount apx2 = count_ops_aplbp(8, 3, 4, 2);
  CHECK(apx2.reads == 20);
  CHECK(apx2.comparisons == 15);
  CHECK(apx2.writes == 17);

  // apx = 0 reduces to the exact formula for any arguments.
  Rng rng(83);
  for (int iter = 0; iter < 200; ++iter) {
    uint64_t e = 1 + rng.below(12);
    uint64_t ch = 1 + rng.below(8);
    uint64_t m = rng.below(10);
    CHECK(count_ops_aplbp(e, ch, m, 0) == count_ops_lbpnet(e, ch, m));
    // Counts are componentwise non-increasing in apx.
    OpCount prev = count_ops_lbpnet(e, ch, m);
    for (uint64_t apx = 1; apx <= std::min(e - 1, m); ++apx) {
      OpCount cur = count_ops_aplbp(e, ch, m, apx);
      CHECK(cur.reads <= prev.reads);
      CHECK(cur.comparisons <= prev.comparisons);
      CHECK(cur.writes <= prev.writes);
      prev = cur;
    }
  }

  CHECK_ERR(count_ops_aplbp(5, 2, 4, 5), Err::ApxOutOfRange);
  CHECK_ERR(count_ops_lbpnet(0, 1, 0), Err::InvalidArgument);
}

TEST_CASE("hardware cost ratios") {
  CostRatios r = cost_ratios(5, 1, 3, 3, 4, 5, 5);
  CHECK(r.multiply == 0.0);
  CHECK(r.compute == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
  CHECK(r.memory == doctest::Approx(4.0 / 9.0 + 3.0 / 225.0).epsilon(1e-12));

  CostRatios degenerate = cost_ratios(5, 4, 3, 3, 4, 5, 5);
  CHECK(degenerate.compute == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

  Rng rng(89);
  for (int iter = 0; iter < 50; ++iter) {
    CostRatios any = cost_ratios(1 + rng.below(9), 0, 1 + rng.below(4), 1 + rng.below(4),
                                 rng.below(6), 1 + rng.below(9), 1 + rng.below(9));
    CHECK(any.multiply == 0.0);  // MAC-free for every input
  }

  CHECK_ERR(cost_ratios(5, 1, 0, 3, 4, 5, 5), Err::InvalidArgument);
}
