#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "nslbp/feature_map.hpp"
#include "nslbp/lbp_kernel.hpp"

namespace nslbp {

// ---------------------------------------------------------------------------
// Layer and network descriptions
// ---------------------------------------------------------------------------

// One output channel of an LBP layer: a kernel per input channel plus the
// projection map fusing their comparison bits into an m-bit code.
struct LbpOutputSpec {
  std::vector<LbpKernel> kernels;
  ProjectionMap proj;
};

struct LbpLayer {
  std::vector<LbpOutputSpec> outputs;
  // Shifted-ReLU threshold; when unset, defaults to half the fused code range
  // (2^(m-1)) per output channel.
  std::optional<uint32_t> relu_shift;
  bool joint = false;  // cascade input channels ahead of the new ones

  uint32_t shift_for(int code_bits) const {
    return relu_shift ? *relu_shift : (code_bits > 0 ? 1u << (code_bits - 1) : 0u);
  }
};

struct AvgPoolSpec {
  uint32_t window = 2;  // non-overlapping window x window mean
};

struct MlpSpec {
  uint32_t weight_bits = 3;      // N
  uint32_t activation_bits = 4;  // M, quantization width of this layer's input
  std::vector<std::vector<uint64_t>> weights;  // [out][in], unsigned N-bit

  size_t out_features() const { return weights.size(); }
  size_t in_features() const { return weights.empty() ? 0 : weights.front().size(); }
};

struct BatchNormSpec {
  uint32_t fraction_bits = 16;
  std::vector<int64_t> gamma_fx;  // scale, fixed point
  std::vector<int64_t> beta_fx;   // offset, fixed point
};

using LayerSpec = std::variant<LbpLayer, AvgPoolSpec, MlpSpec, BatchNormSpec>;

struct InputSpec {
  uint32_t channels = 1;
  uint32_t height = 28;
  uint32_t width = 28;
  uint32_t bits = 8;
};

struct NetworkSpec {
  std::string name = "net";
  InputSpec input;
  int default_apx = 0;
  std::vector<LayerSpec> layers;

  // Checks that adjacent layer geometries compose and per-layer invariants
  // hold for the given apx. Throws on violation.
  void validate(int apx) const;
};

// ---------------------------------------------------------------------------
// Operation counting (per output pixel of one output channel)
// ---------------------------------------------------------------------------

struct OpCount {
  uint64_t reads = 0;
  uint64_t comparisons = 0;
  uint64_t writes = 0;

  OpCount& operator+=(const OpCount& o) {
    reads += o.reads;
    comparisons += o.comparisons;
    writes += o.writes;
    return *this;
  }
  bool operator==(const OpCount&) const = default;
};

// Exact LBP-network per-pixel counts: e kernel elements (pivot included),
// ch channels, m projection entries.
OpCount count_ops_lbpnet(uint64_t e, uint64_t ch, uint64_t m);

// Approximate variant with apx skipped bit positions.
OpCount count_ops_aplbp(uint64_t e, uint64_t ch, uint64_t m, uint64_t apx);

struct CostRatios {
  double multiply = 0.0;  // MAC-free by construction
  double compute = 0.0;
  double memory = 0.0;
};

// Hardware cost of the approximate network relative to an r x s convolution
// producing a p x q output map.
CostRatios cost_ratios(uint64_t e, uint64_t apx, uint64_t r, uint64_t s, uint64_t m, uint64_t p,
                       uint64_t q);

// ---------------------------------------------------------------------------
// Forward-pass reference
// ---------------------------------------------------------------------------

// Zero-padding degree to keep `out` outputs from an `in`-length axis.
int compute_padding(int stride, int out, int in, int f);

// Encodes one f x f patch (row-major) against a kernel: bit significance(n)
// is set when sample n >= pivot.
uint32_t lbp_encode(std::span<const uint32_t> patch, int extent, const LbpKernel& kernel);

inline uint64_t shifted_relu(uint64_t x, uint64_t shift) { return x > shift ? x - shift : 0; }

// Full LBP layer: per output pixel, comparison bits per channel are fused via
// the projection map, shifted-ReLU applied, and (if joint) the input channels
// are prepended. Spatial size is preserved. When `tally` is non-null the
// read/comparison/write operation counts are accumulated into it.
FeatureMap lbp_layer_forward(const FeatureMap& fm, const LbpLayer& layer, const ApproxConfig& cfg,
                             OpCount* tally = nullptr);

// Integer average pooling with round-half-up mean over non-overlapping
// windows.
FeatureMap avg_pool_forward(const FeatureMap& fm, const AvgPoolSpec& pool);

// Truncating requantization of a feature map to `bits` (drops low bits).
FeatureMap requantize(const FeatureMap& fm, uint32_t bits);

// Classifier head: average pooling, quantization to the first MLP's
// activation width, two integer matrix-vector products, then the affine
// batch-norm. Returns the class scores.
std::vector<int64_t> head_forward(const FeatureMap& fm, const AvgPoolSpec& pool,
                                  const MlpSpec& mlp1, const MlpSpec& mlp2,
                                  const BatchNormSpec& bn);

// Helpers shared with the simulator so both routes use identical integer
// arithmetic for the scalar (non-in-memory) stages.
uint64_t mean_round_half_up(uint64_t sum, uint64_t count);
std::vector<uint64_t> flatten(const FeatureMap& fm);
std::vector<uint64_t> matvec(const MlpSpec& mlp, std::span<const uint64_t> v);
std::vector<int64_t> batch_norm_apply(const BatchNormSpec& bn, std::span<const uint64_t> v);

// Whole-network reference result. `lbp_ofmaps[i]` is the output of the i-th
// LBP layer; `scores` is empty when the network has no head layers.
struct ReferenceResult {
  std::vector<FeatureMap> lbp_ofmaps;
  std::vector<int64_t> scores;
  std::vector<OpCount> lbp_ops;  // per LBP layer
};

ReferenceResult reference_forward(const NetworkSpec& net, const FeatureMap& input, int apx);

}  // namespace nslbp
