#include "nslbp/simulator.hpp"

#include <bit>
#include <memory>

#include "nslbp/dpu.hpp"
#include "nslbp/errors.hpp"
#include "nslbp/executor.hpp"
#include "nslbp/inmem_lbp.hpp"
#include "nslbp/layout.hpp"
#include "nslbp/mlp_compile.hpp"

namespace nslbp {

namespace {

uint32_t padded_at(const FeatureMap& fm, uint32_t c, int y, int x) {
  if (y < 0 || x < 0 || y >= static_cast<int>(fm.height) || x >= static_cast<int>(fm.width))
    return 0;
  return fm.at(c, y, x);
}

int bit_width_u64(uint64_t v) { return v == 0 ? 1 : 64 - std::countl_zero(v); }

// Count of low bit-planes that are zero in every value; those planes carry no
// information and are never mapped. Always leaves at least one plane.
int zero_low_planes(const FeatureMap& fm) {
  int planes = static_cast<int>(fm.bits) - 1;
  for (uint32_t v : fm.data) {
    if (v == 0) continue;
    planes = std::min(planes, std::countr_zero(v));
    if (planes == 0) break;
  }
  return planes;
}

struct ColumnRef {
  uint32_t out = 0;      // output channel index within the layer
  uint32_t flat = 0;     // (in_channel * height + y) * width + x
  uint32_t sample = 0;   // index into the pruned kernel's sample list
};

class Simulator {
 public:
  Simulator(const NetworkSpec& net, int apx, const SimOptions& options)
      : net_(net), apx_(apx), options_(options) {
    if (options_.num_subarrays < 1) fail(Err::ConfigError, "need at least one sub-array");
    options_.voltage.validate();
    net_.validate(apx_);
  }

  SimResult run(const FeatureMap& input) {
    if (input.channels != net_.input.channels || input.height != net_.input.height ||
        input.width != net_.input.width)
      fail(Err::ShapeMismatch, "input does not match network geometry");

    FeatureMap fm = input;
    std::vector<uint64_t> vec;
    bool in_vector = false;
    int lbp_index = 0;

    for (const LayerSpec& layer : net_.layers) {
      if (std::holds_alternative<LbpLayer>(layer)) {
        tag_ = "lbp" + std::to_string(lbp_index++);
        fm = sim_lbp_layer(fm, std::get<LbpLayer>(layer));
        result_.lbp_ofmaps.push_back(fm);
      } else if (std::holds_alternative<AvgPoolSpec>(layer)) {
        tag_ = "pool";
        fm = sim_avg_pool(fm, std::get<AvgPoolSpec>(layer));
      } else if (std::holds_alternative<MlpSpec>(layer)) {
        const MlpSpec& m = std::get<MlpSpec>(layer);
        tag_ = "mlp" + std::to_string(mlp_index_++);
        if (!in_vector) {
          fm = sim_requantize(fm, m.activation_bits);
          vec = flatten(fm);
          in_vector = true;
        }
        vec = sim_mlp(m, vec);
      } else {
        tag_ = "batch_norm";
        if (!in_vector) {
          vec = flatten(fm);
          in_vector = true;
        }
        result_.scores = sim_batch_norm(std::get<BatchNormSpec>(layer), vec);
      }
    }
    if (in_vector && result_.scores.empty())
      result_.scores.assign(vec.begin(), vec.end());
    result_.trace = std::move(trace_);
    return std::move(result_);
  }

  void charge_sensor(EventClass cls, const std::string& op, uint32_t size) {
    trace_.events.push_back(TraceEvent{sensor_cycle_++, kSensorUnit, op, size, cls, "sensor"});
  }

 private:
  Executor& next_executor() {
    size_t unit = tile_counter_++ % static_cast<size_t>(options_.num_subarrays);
    if (unit >= subarrays_.size()) {
      subarrays_.push_back(std::make_unique<SubArray>(options_.voltage));
      executors_.push_back(
          std::make_unique<Executor>(*subarrays_.back(), static_cast<uint32_t>(unit), trace_));
    }
    Executor& ex = *executors_[unit];
    ex.set_layer_tag(tag_);
    return ex;
  }

  void charge_dpu(EventClass cls, const std::string& op, uint32_t size) {
    trace_.events.push_back(TraceEvent{dpu_cycle_++, kDpuUnit, op, size, cls, tag_});
  }

  FeatureMap sim_lbp_layer(const FeatureMap& fm, const LbpLayer& layer) {
    ApproxConfig cfg{apx_};
    uint32_t new_channels = static_cast<uint32_t>(layer.outputs.size());
    uint32_t out_channels = layer.joint ? fm.channels + new_channels : new_channels;

    // Pruned kernels/projections per output channel.
    std::vector<std::vector<LbpKernel>> kernels(new_channels);
    std::vector<ProjectionMap> projs(new_channels);
    int max_code_bits = 0;
    for (uint32_t o = 0; o < new_channels; ++o) {
      const LbpOutputSpec& spec = layer.outputs[o];
      if (spec.kernels.size() != fm.channels)
        fail(Err::ShapeMismatch, "LBP output needs one kernel per input channel");
      auto pruned = apply_pac(spec.kernels, spec.proj, cfg);
      kernels[o] = std::move(pruned.first);
      projs[o] = std::move(pruned.second);
      for (const LbpKernel& k : kernels[o])
        if (k.sample_count() > 32) fail(Err::CapacityExceeded, "more than 32 samples per kernel");
      max_code_bits = std::max(max_code_bits, spec.proj.code_bits());
    }

    // Comparison bit per (output, input channel, pixel, pruned sample),
    // produced by the in-memory comparison tiles.
    std::vector<std::vector<uint32_t>> samp_bits(new_channels);
    for (uint32_t o = 0; o < new_channels; ++o)
      samp_bits[o].assign(size_t(fm.channels) * fm.height * fm.width, 0);

    const int map_bits = std::max(1, static_cast<int>(fm.bits) - zero_low_planes(fm));

    std::vector<uint32_t> pixels, pivots;
    std::vector<ColumnRef> refs;
    pixels.reserve(kColumns);
    pivots.reserve(kColumns);
    refs.reserve(kColumns);

    const int drop = static_cast<int>(fm.bits) - map_bits;  // zero planes skipped
    auto flush_tile = [&]() {
      if (pixels.empty()) return;
      Executor& ex = next_executor();
      MappingPlan plan = build_layout(static_cast<int>(pixels.size()), map_bits);
      load_tile(ex, plan, pixels, pivots);
      BitRow lbp = run_inmem_lbp(ex, plan);
      ex.read_row_charged(region::kLbpRow, plan.isa_size(), "readback");
      for (size_t j = 0; j < refs.size(); ++j)
        if (lbp.test(j)) samp_bits[refs[j].out][refs[j].flat] |= 1u << refs[j].sample;
      pixels.clear();
      pivots.clear();
      refs.clear();
    };

    for (uint32_t o = 0; o < new_channels; ++o) {
      for (uint32_t c = 0; c < fm.channels; ++c) {
        const LbpKernel& k = kernels[o][c];
        int pad = (k.extent - 1) / 2;
        for (uint32_t y = 0; y < fm.height; ++y) {
          for (uint32_t x = 0; x < fm.width; ++x) {
            int top = static_cast<int>(y) - pad;
            int left = static_cast<int>(x) - pad;
            uint32_t pivot = padded_at(fm, c, top + k.pivot_row, left + k.pivot_col) >> drop;
            uint32_t flat = (c * fm.height + y) * fm.width + x;
            for (uint32_t s = 0; s < static_cast<uint32_t>(k.sample_count()); ++s) {
              const LbpSample& sm = k.samples[s];
              pixels.push_back(padded_at(fm, c, top + sm.row, left + sm.col) >> drop);
              pivots.push_back(pivot);
              refs.push_back(ColumnRef{o, flat, s});
              if (pixels.size() == kColumns) flush_tile();
            }
          }
        }
      }
    }
    flush_tile();

    // Channel fusion and shifted-ReLU in the DPU.
    uint32_t out_bits = layer.joint ? std::max(fm.bits, static_cast<uint32_t>(max_code_bits))
                                    : static_cast<uint32_t>(max_code_bits);
    FeatureMap out(out_channels, fm.height, fm.width, out_bits);
    if (layer.joint)
      for (uint32_t c = 0; c < fm.channels; ++c)
        for (uint32_t y = 0; y < fm.height; ++y)
          for (uint32_t x = 0; x < fm.width; ++x) out.at(c, y, x) = fm.at(c, y, x);

    for (uint32_t o = 0; o < new_channels; ++o) {
      int m = layer.outputs[o].proj.entry_count();
      uint64_t theta = layer.shift_for(m);
      uint32_t dest = layer.joint ? fm.channels + o : o;
      for (uint32_t y = 0; y < fm.height; ++y) {
        for (uint32_t x = 0; x < fm.width; ++x) {
          uint32_t fused = 0;
          for (const ProjEntry& e : projs[o].entries) {
            if (e.sample == ProjectionMap::kPrunedSource) continue;
            uint32_t flat = (static_cast<uint32_t>(e.channel) * fm.height + y) * fm.width + x;
            fused |= ((samp_bits[o][flat] >> e.sample) & 1u) << e.out_bit;
          }
          // The fused code is below 2^m, so the clamp never engages and this
          // matches the reference's plain shifted ReLU.
          out.at(dest, y, x) =
              static_cast<uint32_t>(dpu::activate_quantize(int64_t(fused), theta, m));
        }
      }
      charge_dpu(EventClass::DpuActivation, "fuse_relu", fm.height * fm.width);
    }
    return out;
  }

  FeatureMap sim_avg_pool(const FeatureMap& fm, const AvgPoolSpec& pool) {
    FeatureMap out = avg_pool_forward(fm, pool);
    for (uint32_t c = 0; c < fm.channels; ++c)
      charge_dpu(EventClass::DpuShiftAdd, "pool_sum", out.height * out.width);
    return out;
  }

  FeatureMap sim_requantize(const FeatureMap& fm, uint32_t bits) {
    FeatureMap out = requantize(fm, bits);
    charge_dpu(EventClass::DpuActivation, "quantize", static_cast<uint32_t>(out.size()));
    return out;
  }

  std::vector<uint64_t> sim_mlp(const MlpSpec& mlp, const std::vector<uint64_t>& v) {
    if (mlp.in_features() != v.size()) fail(Err::ShapeMismatch, "MLP input length mismatch");
    uint64_t max_v = 1;  // slice width must cover the widest activation
    for (uint64_t x : v) max_v = std::max(max_v, x);
    int m_bits = bit_width_u64(max_v);
    if (m_bits > region::kInputRows) fail(Err::CapacityExceeded, "activation slices exceed I region");

    std::vector<uint64_t> out(mlp.out_features(), 0);
    for (size_t r = 0; r < mlp.out_features(); ++r) {
      int64_t acc = 0;
      for (size_t base = 0; base < v.size(); base += kColumns) {
        size_t len = std::min(static_cast<size_t>(kColumns), v.size() - base);
        std::span<const uint64_t> w_chunk(mlp.weights[r].data() + base, len);
        std::span<const uint64_t> v_chunk(v.data() + base, len);
        CompiledMlp compiled =
            compile_mlp_layer(w_chunk, v_chunk, static_cast<int>(mlp.weight_bits), m_bits);
        Executor& ex = next_executor();
        acc = dpu::shift_accumulate(acc, static_cast<uint64_t>(run_mlp(ex, compiled)), 0, 0);
      }
      out[r] = static_cast<uint64_t>(acc);
    }
    return out;
  }

  std::vector<int64_t> sim_batch_norm(const BatchNormSpec& bn, const std::vector<uint64_t>& v) {
    std::vector<int64_t> scores = batch_norm_apply(bn, v);
    charge_dpu(EventClass::DpuActivation, "batch_norm", static_cast<uint32_t>(scores.size()));
    return scores;
  }

  NetworkSpec net_;
  int apx_;
  SimOptions options_;
  SimResult result_;
  Trace trace_;
  std::vector<std::unique_ptr<SubArray>> subarrays_;
  std::vector<std::unique_ptr<Executor>> executors_;
  size_t tile_counter_ = 0;
  uint64_t dpu_cycle_ = 0;
  uint64_t sensor_cycle_ = 0;
  int mlp_index_ = 0;
  std::string tag_;
};

}  // namespace

SimResult simulate(const NetworkSpec& net, const FeatureMap& input, int apx,
                   const SimOptions& options) {
  Simulator sim(net, apx, options);
  return sim.run(input);
}

SimResult simulate_image(const NetworkSpec& net, const RawImage& img, int apx,
                         const SimOptions& options) {
  Simulator sim(net, apx, options);
  // One conversion pass per retained bit-plane; skipped LSB planes cost nothing.
  for (uint32_t plane = apx; plane < net.input.bits; ++plane)
    sim.charge_sensor(EventClass::PixelConversion, "convert",
                      static_cast<uint32_t>(img.samples.size()));
  FeatureMap fm = quantize_skip(img, net.input.bits, static_cast<uint32_t>(apx));
  return sim.run(fm);
}

}  // namespace nslbp
