#pragma once

#include <cstdint>
#include <vector>

#include "nslbp/errors.hpp"

namespace nslbp {

// Multi-channel 2-D array of unsigned fixed-point activations, indexed
// [channel][row][col]. Every value must fit in `bits`.
struct FeatureMap {
  uint32_t channels = 0;
  uint32_t height = 0;
  uint32_t width = 0;
  uint32_t bits = 8;
  std::vector<uint32_t> data;

  FeatureMap() = default;
  FeatureMap(uint32_t ch, uint32_t h, uint32_t w, uint32_t b)
      : channels(ch), height(h), width(w), bits(b), data(size_t(ch) * h * w, 0) {
    if (ch == 0 || h == 0 || w == 0)
      fail(Err::ShapeMismatch, "feature map dimensions must be positive");
    if (b == 0 || b > 32) fail(Err::InvalidArgument, "bit width must be in [1, 32]");
  }

  size_t size() const { return data.size(); }

  uint32_t& at(uint32_t c, uint32_t y, uint32_t x) {
    return data[(size_t(c) * height + y) * width + x];
  }
  uint32_t at(uint32_t c, uint32_t y, uint32_t x) const {
    return data[(size_t(c) * height + y) * width + x];
  }

  uint32_t max_value() const { return bits >= 32 ? 0xffffffffu : (1u << bits) - 1; }

  void validate() const {
    if (channels == 0 || height == 0 || width == 0)
      fail(Err::ShapeMismatch, "feature map dimensions must be positive");
    if (data.size() != size_t(channels) * height * width)
      fail(Err::ShapeMismatch, "data length != channels*height*width");
    for (uint32_t v : data)
      if (v > max_value()) fail(Err::ShapeMismatch, "value exceeds bit width");
  }

  bool operator==(const FeatureMap& other) const {
    return channels == other.channels && height == other.height && width == other.width &&
           data == other.data;
  }
};

}  // namespace nslbp
