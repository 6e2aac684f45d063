#pragma once

#include <cstdint>

#include "nslbp/image_io.hpp"
#include "nslbp/lbp_net.hpp"
#include "nslbp/rng.hpp"

namespace nslbp {

struct WorkloadParams {
  uint32_t channels = 1;
  uint32_t height = 28;
  uint32_t width = 28;
  uint32_t bits = 8;
  int lbp_layers = 1;
  uint32_t lbp_outputs = 2;     // output channels per LBP layer
  int kernel_extent = 3;        // odd window side
  int min_samples = 4;          // samples per kernel (uniform in range)
  int max_samples = 6;
  int proj_entries = 4;         // m
  bool joint = false;
  bool with_head = true;        // avg-pool + two MLPs + batch-norm
  uint32_t hidden = 8;
  uint32_t classes = 4;
  uint32_t weight_bits = 3;
  uint32_t activation_bits = 4;
};

// Deterministic random network with trained-looking sampling patterns and
// projection maps. Valid for any apx <= min(min_samples - 1, proj_entries).
NetworkSpec make_random_network(Rng& rng, const WorkloadParams& params = {});

LbpKernel make_random_kernel(Rng& rng, int extent, int samples);

RawImage make_random_image(Rng& rng, uint32_t height, uint32_t width, uint32_t bit_depth = 8);

FeatureMap make_random_feature_map(Rng& rng, uint32_t channels, uint32_t height, uint32_t width,
                                   uint32_t bits);

}  // namespace nslbp
