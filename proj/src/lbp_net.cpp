#include "nslbp/lbp_net.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace nslbp {

namespace {

// Comparison with >= semantics: equality counts as 1.
inline uint32_t cmp_ge(uint32_t sample, uint32_t pivot) { return sample >= pivot ? 1u : 0u; }

// Padded read: coordinates outside the map read as zero.
inline uint32_t padded_at(const FeatureMap& fm, uint32_t c, int y, int x) {
  if (y < 0 || x < 0 || y >= static_cast<int>(fm.height) || x >= static_cast<int>(fm.width))
    return 0;
  return fm.at(c, y, x);
}

int bit_width_u64(uint64_t v) { return v == 0 ? 0 : 64 - std::countl_zero(v); }

}  // namespace

int compute_padding(int stride, int out, int in, int f) {
  if (stride < 1 || out < 1 || in < 1 || f < 1)
    fail(Err::InvalidArgument, "padding arguments must be >= 1");
  int numerator = stride * (out - 1) - in + f;
  if (numerator < 0) fail(Err::NegativePadding, "s*(out-1)-in+f is negative");
  if (numerator % 2 != 0) fail(Err::NonIntegerPadding, "s*(out-1)-in+f is odd");
  return numerator / 2;
}

uint32_t lbp_encode(std::span<const uint32_t> patch, int extent, const LbpKernel& kernel) {
  if (extent != kernel.extent || patch.size() != static_cast<size_t>(extent) * extent)
    fail(Err::ShapeMismatch, "patch extent does not match kernel extent");
  uint32_t pivot = patch[size_t(kernel.pivot_row) * extent + kernel.pivot_col];
  uint32_t code = 0;
  for (const LbpSample& s : kernel.samples)
    code |= cmp_ge(patch[size_t(s.row) * extent + s.col], pivot) << s.significance;
  return code;
}

OpCount count_ops_lbpnet(uint64_t e, uint64_t ch, uint64_t m) {
  if (e < 1 || ch < 1) fail(Err::InvalidArgument, "need e >= 1 and ch >= 1");
  return OpCount{e * ch + m, (e - 1) * ch, (e - 1) * ch + m};
}

OpCount count_ops_aplbp(uint64_t e, uint64_t ch, uint64_t m, uint64_t apx) {
  if (e < 1 || ch < 1) fail(Err::InvalidArgument, "need e >= 1 and ch >= 1");
  if (apx > std::min(e - 1, m)) fail(Err::ApxOutOfRange, "apx must be <= min(e-1, m)");
  return OpCount{(e - apx) * ch + m - apx, (e - apx - 1) * ch, (e - apx - 1) * ch + m - apx};
}

CostRatios cost_ratios(uint64_t e, uint64_t apx, uint64_t r, uint64_t s, uint64_t m, uint64_t p,
                       uint64_t q) {
  if (r == 0 || s == 0 || p == 0 || q == 0) fail(Err::InvalidArgument, "denominators must be positive");
  if (apx > e || apx > m) fail(Err::InvalidArgument, "apx exceeds e or m");
  CostRatios ratios;
  ratios.compute = double(e - apx) / double(r * s);
  ratios.memory = ratios.compute + double(m - apx) / double(p * q * r * s);
  return ratios;
}

FeatureMap lbp_layer_forward(const FeatureMap& fm, const LbpLayer& layer, const ApproxConfig& cfg,
                             OpCount* tally) {
  fm.validate();
  if (layer.outputs.empty()) fail(Err::InvalidArgument, "LBP layer needs output channels");

  uint32_t new_channels = static_cast<uint32_t>(layer.outputs.size());
  uint32_t out_channels = layer.joint ? fm.channels + new_channels : new_channels;

  int max_code_bits = 0;
  for (const LbpOutputSpec& out : layer.outputs) {
    if (out.kernels.size() != fm.channels)
      fail(Err::ShapeMismatch, "LBP output needs one kernel per input channel");
    for (const LbpKernel& k : out.kernels) {
      k.validate();
      cfg.validate(k.sample_count(), out.proj.entry_count());
      // Spatial invariance requires an odd window; surfaces NonIntegerPadding.
      compute_padding(1, static_cast<int>(fm.width), static_cast<int>(fm.width), k.extent);
    }
    out.proj.validate(out.kernels);
    max_code_bits = std::max(max_code_bits, out.proj.code_bits());
  }

  uint32_t out_bits = layer.joint ? std::max(fm.bits, static_cast<uint32_t>(max_code_bits))
                                  : static_cast<uint32_t>(max_code_bits);
  FeatureMap result(out_channels, fm.height, fm.width, out_bits);

  if (layer.joint) {
    for (uint32_t c = 0; c < fm.channels; ++c)
      for (uint32_t y = 0; y < fm.height; ++y)
        for (uint32_t x = 0; x < fm.width; ++x) result.at(c, y, x) = fm.at(c, y, x);
  }

  for (uint32_t o = 0; o < new_channels; ++o) {
    const LbpOutputSpec& spec = layer.outputs[o];
    auto [kernels, proj] = apply_pac(spec.kernels, spec.proj, cfg);
    int m = spec.proj.entry_count();
    uint64_t theta = layer.shift_for(m);
    uint32_t dest = layer.joint ? fm.channels + o : o;

    std::vector<uint32_t> codes(fm.channels, 0);
    for (uint32_t y = 0; y < fm.height; ++y) {
      for (uint32_t x = 0; x < fm.width; ++x) {
        for (uint32_t c = 0; c < fm.channels; ++c) {
          const LbpKernel& k = kernels[c];
          int pad = (k.extent - 1) / 2;
          int top = static_cast<int>(y) - pad;
          int left = static_cast<int>(x) - pad;
          uint32_t pivot = padded_at(fm, c, top + k.pivot_row, left + k.pivot_col);
          uint32_t code = 0;
          for (const LbpSample& s : k.samples)
            code |= cmp_ge(padded_at(fm, c, top + s.row, left + s.col), pivot) << s.significance;
          codes[c] = code;
        }
        uint32_t fused = 0;
        for (const ProjEntry& entry : proj.entries) {
          if (entry.sample == ProjectionMap::kPrunedSource) continue;
          uint32_t bit =
              (codes[entry.channel] >> kernels[entry.channel].samples[entry.sample].significance) &
              1u;
          fused |= bit << entry.out_bit;
        }
        result.at(dest, y, x) = static_cast<uint32_t>(shifted_relu(fused, theta));
        if (tally) {
          uint64_t m_post = static_cast<uint64_t>(proj.entry_count());
          for (const LbpKernel& k : kernels) {
            uint64_t s_post = static_cast<uint64_t>(k.sample_count());
            tally->reads += s_post + 1;  // samples plus the pivot
            tally->comparisons += s_post;
            tally->writes += s_post;
          }
          tally->reads += m_post;
          tally->writes += m_post;
        }
      }
    }
  }
  return result;
}

FeatureMap avg_pool_forward(const FeatureMap& fm, const AvgPoolSpec& pool) {
  fm.validate();
  if (pool.window == 0) fail(Err::InvalidArgument, "pool window must be >= 1");
  if (fm.height % pool.window != 0 || fm.width % pool.window != 0)
    fail(Err::ShapeMismatch, "pool window must divide the feature map");
  uint32_t oh = fm.height / pool.window;
  uint32_t ow = fm.width / pool.window;
  FeatureMap out(fm.channels, oh, ow, fm.bits);
  uint64_t area = uint64_t(pool.window) * pool.window;
  for (uint32_t c = 0; c < fm.channels; ++c)
    for (uint32_t y = 0; y < oh; ++y)
      for (uint32_t x = 0; x < ow; ++x) {
        uint64_t sum = 0;
        for (uint32_t dy = 0; dy < pool.window; ++dy)
          for (uint32_t dx = 0; dx < pool.window; ++dx)
            sum += fm.at(c, y * pool.window + dy, x * pool.window + dx);
        out.at(c, y, x) = static_cast<uint32_t>(mean_round_half_up(sum, area));
      }
  return out;
}

FeatureMap requantize(const FeatureMap& fm, uint32_t bits) {
  if (bits == 0 || bits > 32) fail(Err::InvalidArgument, "bit width must be in [1, 32]");
  if (bits >= fm.bits) {
    FeatureMap widened = fm;
    widened.bits = bits;
    return widened;
  }
  FeatureMap out(fm.channels, fm.height, fm.width, bits);
  uint32_t shift = fm.bits - bits;
  for (size_t i = 0; i < fm.data.size(); ++i) out.data[i] = fm.data[i] >> shift;
  return out;
}

uint64_t mean_round_half_up(uint64_t sum, uint64_t count) {
  if (count == 0) fail(Err::DivByZero, "mean over empty window");
  return (sum + count / 2) / count;
}

std::vector<uint64_t> flatten(const FeatureMap& fm) {
  return std::vector<uint64_t>(fm.data.begin(), fm.data.end());
}

std::vector<uint64_t> matvec(const MlpSpec& mlp, std::span<const uint64_t> v) {
  if (mlp.in_features() != v.size()) fail(Err::ShapeMismatch, "MLP input length mismatch");
  uint64_t weight_max = mlp.weight_bits >= 64 ? ~0ull : (1ull << mlp.weight_bits) - 1;
  std::vector<uint64_t> out(mlp.out_features(), 0);
  for (size_t r = 0; r < mlp.weights.size(); ++r) {
    const auto& row = mlp.weights[r];
    if (row.size() != v.size()) fail(Err::ShapeMismatch, "ragged MLP weight matrix");
    uint64_t acc = 0;
    for (size_t i = 0; i < row.size(); ++i) {
      if (row[i] > weight_max) fail(Err::InvalidArgument, "weight exceeds declared width");
      unsigned long long term = 0, sum = 0;
      if (__builtin_mul_overflow(row[i], v[i], &term) || __builtin_add_overflow(acc, term, &sum))
        fail(Err::Overflow, "MLP accumulator overflow");
      acc = sum;
    }
    out[r] = acc;
  }
  return out;
}

std::vector<int64_t> batch_norm_apply(const BatchNormSpec& bn, std::span<const uint64_t> v) {
  if (bn.gamma_fx.size() != v.size() || bn.beta_fx.size() != v.size())
    fail(Err::ShapeMismatch, "batch-norm parameter length mismatch");
  std::vector<int64_t> out(v.size(), 0);
  for (size_t i = 0; i < v.size(); ++i) {
    __int128 acc = static_cast<__int128>(bn.gamma_fx[i]) * static_cast<__int128>(v[i]);
    acc += bn.beta_fx[i];
    acc >>= bn.fraction_bits;
    if (acc > INT64_MAX || acc < INT64_MIN) fail(Err::Overflow, "batch-norm overflow");
    out[i] = static_cast<int64_t>(acc);
  }
  return out;
}

std::vector<int64_t> head_forward(const FeatureMap& fm, const AvgPoolSpec& pool,
                                  const MlpSpec& mlp1, const MlpSpec& mlp2,
                                  const BatchNormSpec& bn) {
  FeatureMap pooled = avg_pool_forward(fm, pool);
  FeatureMap quantized = requantize(pooled, mlp1.activation_bits);
  std::vector<uint64_t> v = flatten(quantized);
  v = matvec(mlp1, v);
  v = matvec(mlp2, v);
  return batch_norm_apply(bn, v);
}

void NetworkSpec::validate(int apx) const {
  uint32_t ch = input.channels, h = input.height, w = input.width, bits = input.bits;
  if (ch == 0 || h == 0 || w == 0 || bits == 0 || bits > 32)
    fail(Err::ConfigError, "bad input geometry");
  ApproxConfig cfg{apx};
  bool in_vector = false;
  size_t vec_len = 0;
  int vec_bits_bound = 0;
  bool saw_head = false;

  for (const LayerSpec& layer : layers) {
    if (std::holds_alternative<LbpLayer>(layer)) {
      if (in_vector || saw_head) fail(Err::ConfigError, "LBP layer after head layers");
      const LbpLayer& l = std::get<LbpLayer>(layer);
      if (l.outputs.empty()) fail(Err::ConfigError, "LBP layer without outputs");
      int max_bits = 0;
      for (const LbpOutputSpec& out : l.outputs) {
        if (out.kernels.size() != ch)
          fail(Err::ShapeMismatch, "LBP output needs one kernel per input channel");
        for (const LbpKernel& k : out.kernels) {
          k.validate();
          cfg.validate(k.sample_count(), out.proj.entry_count());
          compute_padding(1, static_cast<int>(w), static_cast<int>(w), k.extent);
        }
        out.proj.validate(out.kernels);
        max_bits = std::max(max_bits, out.proj.code_bits());
      }
      uint32_t new_ch = static_cast<uint32_t>(l.outputs.size());
      bits = l.joint ? std::max(bits, static_cast<uint32_t>(max_bits))
                     : static_cast<uint32_t>(max_bits);
      ch = l.joint ? ch + new_ch : new_ch;
    } else if (std::holds_alternative<AvgPoolSpec>(layer)) {
      if (in_vector) fail(Err::ConfigError, "pooling after MLP layers");
      saw_head = true;
      const AvgPoolSpec& p = std::get<AvgPoolSpec>(layer);
      if (p.window == 0 || h % p.window != 0 || w % p.window != 0)
        fail(Err::ShapeMismatch, "pool window must divide the feature map");
      h /= p.window;
      w /= p.window;
    } else if (std::holds_alternative<MlpSpec>(layer)) {
      saw_head = true;
      const MlpSpec& m = std::get<MlpSpec>(layer);
      if (m.weights.empty() || m.in_features() == 0) fail(Err::ConfigError, "empty MLP weights");
      if (m.weight_bits == 0 || m.weight_bits > 16 || m.activation_bits == 0 ||
          m.activation_bits > 16)
        fail(Err::ConfigError, "MLP widths must be in [1, 16]");
      uint64_t weight_max = (1ull << m.weight_bits) - 1;
      for (const auto& row : m.weights) {
        if (row.size() != m.in_features()) fail(Err::ShapeMismatch, "ragged MLP weight matrix");
        for (uint64_t weight : row)
          if (weight > weight_max) fail(Err::ConfigError, "weight exceeds declared width");
      }
      size_t in_len = in_vector ? vec_len : size_t(ch) * h * w;
      if (m.in_features() != in_len) fail(Err::ShapeMismatch, "MLP input length mismatch");
      int in_bits = in_vector ? vec_bits_bound : static_cast<int>(m.activation_bits);
      vec_bits_bound = in_bits + static_cast<int>(m.weight_bits) +
                       bit_width_u64(static_cast<uint64_t>(in_len));
      if (vec_bits_bound > 62) fail(Err::Overflow, "MLP accumulator headroom exceeded");
      vec_len = m.out_features();
      in_vector = true;
    } else {
      saw_head = true;
      const BatchNormSpec& b = std::get<BatchNormSpec>(layer);
      size_t len = in_vector ? vec_len : size_t(ch) * h * w;
      if (b.gamma_fx.size() != len || b.beta_fx.size() != len)
        fail(Err::ShapeMismatch, "batch-norm parameter length mismatch");
      if (b.fraction_bits > 32) fail(Err::ConfigError, "fraction bits must be <= 32");
    }
  }
}

ReferenceResult reference_forward(const NetworkSpec& net, const FeatureMap& input, int apx) {
  net.validate(apx);
  if (input.channels != net.input.channels || input.height != net.input.height ||
      input.width != net.input.width)
    fail(Err::ShapeMismatch, "input does not match network geometry");

  ReferenceResult res;
  ApproxConfig cfg{apx};
  FeatureMap fm = input;
  std::vector<uint64_t> vec;
  bool in_vector = false;

  for (const LayerSpec& layer : net.layers) {
    if (std::holds_alternative<LbpLayer>(layer)) {
      OpCount tally;
      fm = lbp_layer_forward(fm, std::get<LbpLayer>(layer), cfg, &tally);
      res.lbp_ofmaps.push_back(fm);
      res.lbp_ops.push_back(tally);
    } else if (std::holds_alternative<AvgPoolSpec>(layer)) {
      fm = avg_pool_forward(fm, std::get<AvgPoolSpec>(layer));
    } else if (std::holds_alternative<MlpSpec>(layer)) {
      const MlpSpec& m = std::get<MlpSpec>(layer);
      if (!in_vector) {
        fm = requantize(fm, m.activation_bits);
        vec = flatten(fm);
        in_vector = true;
      }
      vec = matvec(m, vec);
    } else {
      const BatchNormSpec& b = std::get<BatchNormSpec>(layer);
      if (!in_vector) {
        vec = flatten(fm);
        in_vector = true;
      }
      res.scores = batch_norm_apply(b, vec);
    }
  }
  if (in_vector && res.scores.empty()) res.scores.assign(vec.begin(), vec.end());
  return res;
}

}  // namespace nslbp
