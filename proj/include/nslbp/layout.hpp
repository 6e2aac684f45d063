#pragma once

#include <cstdint>
#include <string>

#include "nslbp/errors.hpp"

namespace nslbp {

// Fixed five-region split of a 256-row compute sub-array.
namespace region {
inline constexpr int kPixelBase = 0;    // Pixel-P, 64 rows
inline constexpr int kPixelRows = 64;
inline constexpr int kPivotBase = 64;   // Pivot-C, 64 rows
inline constexpr int kPivotRows = 64;
inline constexpr int kResvBase = 128;   // Reserved, 64 rows
inline constexpr int kResvRows = 64;
inline constexpr int kWeightBase = 192; // Weight-W, 32 rows
inline constexpr int kWeightRows = 32;
inline constexpr int kInputBase = 224;  // Input-I, 32 rows
inline constexpr int kInputRows = 32;

// Fixed service rows inside the reserved region.
inline constexpr int kResultRow = 128;  // latest XOR result
inline constexpr int kLbpRow = 129;     // accumulated LBP bits
inline constexpr int kZeroRow0 = 130;
inline constexpr int kZeroRow1 = 131;
inline constexpr int kOnesRow = 132;
inline constexpr int kScratchRow = 133; // bulk bit-wise destinations
}  // namespace region

// Placement of one tile of bit-transposed pixel vectors: pixel j occupies
// column j with its MSB at row kPixelBase (bit k of pixel j sits at row
// kPixelBase + k); the pivot copy for column j mirrors that in the C region.
struct MappingPlan {
  int columns = 0;  // parallel pixel vectors
  int bits = 0;     // bit rows actually mapped (approximated LSBs absent)

  int pixel_row(int bit) const { return region::kPixelBase + bit; }
  int pivot_row(int bit) const { return region::kPivotBase + bit; }

  // Smallest ISA width covering the tile.
  int isa_size() const { return columns <= 64 ? 64 : columns <= 128 ? 128 : 256; }
};

MappingPlan build_layout(int parallel_pixels, int bits);

std::string mapping_plan_json(const MappingPlan& plan);

}  // namespace nslbp
