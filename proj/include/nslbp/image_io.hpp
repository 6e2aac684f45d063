#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nslbp/feature_map.hpp"

namespace nslbp {

// Post-ADC digital view of a sensor frame, row-major.
struct RawImage {
  uint32_t height = 0;
  uint32_t width = 0;
  uint32_t bit_depth = 8;  // native sample depth
  std::vector<uint16_t> samples;

  bool operator==(const RawImage&) const = default;
};

// IDX container (big-endian header, unsigned byte pixels).
std::vector<RawImage> load_idx(const std::string& path);
std::vector<uint8_t> load_idx_labels(const std::string& path);
void save_idx(const std::string& path, const std::vector<RawImage>& images);
void save_idx_labels(const std::string& path, const std::vector<uint8_t>& labels);

// Binary PGM (P5), maxval up to 65535.
RawImage load_pgm(const std::string& path);
void save_pgm(const std::string& path, const RawImage& img);

// Sensor-side approximation: rescale samples to `bits` by truncation, then
// skip conversion of the `apx` least significant bits (forced to zero).
FeatureMap quantize_skip(const RawImage& img, uint32_t bits, uint32_t apx);

}  // namespace nslbp
