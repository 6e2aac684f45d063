#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nslbp/errors.hpp"

namespace nslbp {

// One trained sampling position inside the f x f window. `significance` is the
// output bit the comparison result lands in. After PAC pruning the remaining
// significances keep their original values, so pruned bits read as zero.
struct LbpSample {
  int row = 0;
  int col = 0;
  int significance = 0;
};

struct LbpKernel {
  int extent = 3;  // f, window side in pixels
  int pivot_row = 0;
  int pivot_col = 0;
  std::vector<LbpSample> samples;

  int sample_count() const { return static_cast<int>(samples.size()); }

  // Checks the as-trained invariants: offsets inside the window, pivot not
  // sampled, significances a bijection onto [0, e).
  void validate() const;
};

// Channel-fusion table: entry i copies comparison bit `sample` of channel
// `channel` into output bit `out_bit`. `sample == kPrunedSource` marks an
// entry whose source sample was removed by PAC; it contributes a zero bit.
struct ProjEntry {
  int channel = 0;
  int sample = 0;
  int out_bit = 0;
};

struct ProjectionMap {
  static constexpr int kPrunedSource = -1;

  std::vector<ProjEntry> entries;

  int entry_count() const { return static_cast<int>(entries.size()); }

  // Width of the fused code, i.e. max out_bit + 1.
  int code_bits() const;

  void validate(const std::vector<LbpKernel>& kernels) const;
};

struct ApproxConfig {
  int apx = 0;  // number of approximated least-significant bit positions

  void validate(int e, int m) const {
    if (apx < 0 || apx > std::min(e - 1, m))
      fail(Err::ApxOutOfRange, "apx must satisfy 0 <= apx <= min(e-1, m)");
  }
};

// Skip-comparison / skip-access pruning: drops the `apx` lowest-significance
// kernel samples and the `apx` lowest out_bit projection entries. Surviving
// projection entries are re-pointed at the pruned kernels; entries whose
// source sample was dropped are marked kPrunedSource.
std::pair<std::vector<LbpKernel>, ProjectionMap> apply_pac(
    const std::vector<LbpKernel>& kernels, const ProjectionMap& proj, const ApproxConfig& cfg);

// Single-kernel convenience form; the projection must reference channel 0.
std::pair<LbpKernel, ProjectionMap> apply_pac(const LbpKernel& kernel, const ProjectionMap& proj,
                                              const ApproxConfig& cfg);

}  // namespace nslbp
