#pragma once

#include <cstdint>
#include <vector>

#include "nslbp/image_io.hpp"
#include "nslbp/lbp_net.hpp"
#include "nslbp/trace.hpp"
#include "nslbp/voltage.hpp"

namespace nslbp {

// Pseudo-unit ids for events that do not belong to a compute sub-array.
inline constexpr uint32_t kSensorUnit = 0xffffffffu;
inline constexpr uint32_t kDpuUnit = 0xfffffffeu;

struct SimOptions {
  int num_subarrays = 64;  // tiles rotate round-robin over this many arrays
  VoltageModel voltage;    // read-path model for every sub-array
};

struct SimResult {
  std::vector<FeatureMap> lbp_ofmaps;  // one per LBP layer
  std::vector<int64_t> scores;
  Trace trace;
};

// Runs the network on the in-memory substrate: LBP layers through the
// bit-serial comparison controller, MLP layers through the AND/bitcount/shift
// pipeline, pooling and batch-norm through the DPU. Bit-exact against
// reference_forward on the same inputs.
SimResult simulate(const NetworkSpec& net, const FeatureMap& input, int apx,
                   const SimOptions& options = {});

// Sensor-side entry: quantizes the raw frame (skipping apx LSB conversions,
// charged as pixel-conversion events) and then runs the network.
SimResult simulate_image(const NetworkSpec& net, const RawImage& img, int apx,
                         const SimOptions& options = {});

}  // namespace nslbp
