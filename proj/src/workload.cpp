#include "nslbp/workload.hpp"

#include <algorithm>
#include <numeric>

#include "nslbp/errors.hpp"

namespace nslbp {

LbpKernel make_random_kernel(Rng& rng, int extent, int samples) {
  if (samples >= extent * extent)
    fail(Err::InvalidArgument, "window too small for the requested samples");
  LbpKernel k;
  k.extent = extent;
  k.pivot_row = static_cast<int>(rng.below(extent));
  k.pivot_col = static_cast<int>(rng.below(extent));

  std::vector<int> positions;
  for (int p = 0; p < extent * extent; ++p)
    if (p != k.pivot_row * extent + k.pivot_col) positions.push_back(p);
  // Fisher-Yates prefix shuffle picks the sampling locations.
  for (int i = 0; i < samples; ++i) {
    int j = i + static_cast<int>(rng.below(positions.size() - i));
    std::swap(positions[i], positions[j]);
  }
  std::vector<int> sig(samples);
  std::iota(sig.begin(), sig.end(), 0);
  for (int i = samples - 1; i > 0; --i)
    std::swap(sig[i], sig[static_cast<int>(rng.below(i + 1))]);

  for (int i = 0; i < samples; ++i)
    k.samples.push_back(LbpSample{positions[i] / extent, positions[i] % extent, sig[i]});
  return k;
}

NetworkSpec make_random_network(Rng& rng, const WorkloadParams& p) {
  NetworkSpec net;
  net.name = "random";
  net.input = InputSpec{p.channels, p.height, p.width, p.bits};

  uint32_t ch = p.channels;
  for (int layer = 0; layer < p.lbp_layers; ++layer) {
    LbpLayer l;
    l.joint = p.joint;
    for (uint32_t o = 0; o < p.lbp_outputs; ++o) {
      LbpOutputSpec out;
      std::vector<int> sample_counts;
      for (uint32_t c = 0; c < ch; ++c) {
        int samples = static_cast<int>(rng.range(p.min_samples, p.max_samples));
        out.kernels.push_back(
            make_random_kernel(rng, p.kernel_extent, std::min(samples, 8)));
        sample_counts.push_back(out.kernels.back().sample_count());
      }
      std::vector<int> bits(p.proj_entries);
      std::iota(bits.begin(), bits.end(), 0);
      for (int i = p.proj_entries - 1; i > 0; --i)
        std::swap(bits[i], bits[static_cast<int>(rng.below(i + 1))]);
      for (int i = 0; i < p.proj_entries; ++i) {
        int channel = static_cast<int>(rng.below(ch));
        int sample = static_cast<int>(rng.below(sample_counts[channel]));
        out.proj.entries.push_back(ProjEntry{channel, sample, bits[i]});
      }
      l.outputs.push_back(std::move(out));
    }
    net.layers.push_back(std::move(l));
    ch = p.joint ? ch + p.lbp_outputs : p.lbp_outputs;
  }

  if (p.with_head) {
    uint32_t window = (p.height % 4 == 0 && p.width % 4 == 0) ? 4 : 2;
    net.layers.push_back(AvgPoolSpec{window});
    uint32_t h = p.height / window, w = p.width / window;
    size_t flat = size_t(ch) * h * w;

    auto random_weights = [&](size_t rows, size_t cols, uint32_t bits) {
      std::vector<std::vector<uint64_t>> m(rows, std::vector<uint64_t>(cols, 0));
      uint64_t top = (1ull << bits) - 1;
      for (auto& row : m)
        for (uint64_t& v : row) v = rng.below(top + 1);
      return m;
    };
    net.layers.push_back(
        MlpSpec{p.weight_bits, p.activation_bits, random_weights(p.hidden, flat, p.weight_bits)});
    net.layers.push_back(MlpSpec{p.weight_bits, p.activation_bits,
                                 random_weights(p.classes, p.hidden, p.weight_bits)});

    BatchNormSpec bn;
    for (uint32_t i = 0; i < p.classes; ++i) {
      // Scales around 1.0, integer offsets; kept in fixed point directly.
      bn.gamma_fx.push_back(static_cast<int64_t>(rng.range(1, 4)) << 14);
      bn.beta_fx.push_back(rng.range(-8, 8) << 16);
    }
    net.layers.push_back(std::move(bn));
  }
  return net;
}

RawImage make_random_image(Rng& rng, uint32_t height, uint32_t width, uint32_t bit_depth) {
  RawImage img;
  img.height = height;
  img.width = width;
  img.bit_depth = bit_depth;
  img.samples.resize(size_t(height) * width);
  uint32_t top = (1u << bit_depth) - 1;
  for (uint16_t& s : img.samples) s = static_cast<uint16_t>(rng.below(top + 1));
  return img;
}

FeatureMap make_random_feature_map(Rng& rng, uint32_t channels, uint32_t height, uint32_t width,
                                   uint32_t bits) {
  FeatureMap fm(channels, height, width, bits);
  for (uint32_t& v : fm.data) v = static_cast<uint32_t>(rng.below(uint64_t(fm.max_value()) + 1));
  return fm;
}

}  // namespace nslbp
