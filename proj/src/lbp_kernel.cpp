#include "nslbp/lbp_kernel.hpp"

#include <algorithm>

namespace nslbp {

void LbpKernel::validate() const {
  if (extent < 1) fail(Err::InvalidArgument, "kernel extent must be >= 1");
  if (samples.empty()) fail(Err::InvalidArgument, "kernel needs at least one sample");
  if (pivot_row < 0 || pivot_row >= extent || pivot_col < 0 || pivot_col >= extent)
    fail(Err::InvalidArgument, "pivot offset outside window");
  std::vector<bool> seen(samples.size(), false);
  for (const LbpSample& s : samples) {
    if (s.row < 0 || s.row >= extent || s.col < 0 || s.col >= extent)
      fail(Err::InvalidArgument, "sample offset outside window");
    if (s.row == pivot_row && s.col == pivot_col)
      fail(Err::InvalidArgument, "pivot must not appear among samples");
    if (s.significance < 0 || s.significance >= sample_count() || seen[s.significance])
      fail(Err::InvalidArgument, "significance must be a bijection onto [0, e)");
    seen[s.significance] = true;
  }
}

int ProjectionMap::code_bits() const {
  int bits = 0;
  for (const ProjEntry& e : entries) bits = std::max(bits, e.out_bit + 1);
  return bits;
}

void ProjectionMap::validate(const std::vector<LbpKernel>& kernels) const {
  if (entries.empty()) fail(Err::InvalidProjection, "projection map needs at least one entry");
  std::vector<bool> seen(entries.size(), false);
  for (const ProjEntry& e : entries) {
    if (e.out_bit < 0 || e.out_bit >= entry_count() || seen[e.out_bit])
      fail(Err::InvalidProjection, "out_bit must be a bijection onto [0, m)");
    seen[e.out_bit] = true;
    if (e.channel < 0 || e.channel >= static_cast<int>(kernels.size()))
      fail(Err::InvalidProjection, "entry references missing channel");
    if (e.sample == kPrunedSource) continue;
    if (e.sample < 0 || e.sample >= kernels[e.channel].sample_count())
      fail(Err::InvalidProjection, "entry references missing sample");
  }
}

std::pair<std::vector<LbpKernel>, ProjectionMap> apply_pac(const std::vector<LbpKernel>& kernels,
                                                           const ProjectionMap& proj,
                                                           const ApproxConfig& cfg) {
  for (const LbpKernel& k : kernels) cfg.validate(k.sample_count(), proj.entry_count());

  std::vector<LbpKernel> pruned_kernels;
  std::vector<std::vector<int>> remap;  // old sample index -> new, -1 if dropped
  pruned_kernels.reserve(kernels.size());
  remap.reserve(kernels.size());
  for (const LbpKernel& k : kernels) {
    LbpKernel pk = k;
    pk.samples.clear();
    std::vector<int> map(k.samples.size(), ProjectionMap::kPrunedSource);
    for (size_t i = 0; i < k.samples.size(); ++i) {
      if (k.samples[i].significance >= cfg.apx) {
        map[i] = static_cast<int>(pk.samples.size());
        pk.samples.push_back(k.samples[i]);
      }
    }
    pruned_kernels.push_back(std::move(pk));
    remap.push_back(std::move(map));
  }

  ProjectionMap pruned_proj;
  for (const ProjEntry& e : proj.entries) {
    if (e.out_bit < cfg.apx) continue;
    ProjEntry pe = e;
    if (pe.sample != ProjectionMap::kPrunedSource) pe.sample = remap[pe.channel][pe.sample];
    pruned_proj.entries.push_back(pe);
  }
  return {std::move(pruned_kernels), std::move(pruned_proj)};
}

std::pair<LbpKernel, ProjectionMap> apply_pac(const LbpKernel& kernel, const ProjectionMap& proj,
                                              const ApproxConfig& cfg) {
  for (const ProjEntry& e : proj.entries)
    if (e.channel != 0) fail(Err::InvalidProjection, "single-kernel PAC expects channel 0 only");
  auto [kernels, pruned_proj] = apply_pac(std::vector<LbpKernel>{kernel}, proj, cfg);
  return {std::move(kernels.front()), std::move(pruned_proj)};
}

}  // namespace nslbp
