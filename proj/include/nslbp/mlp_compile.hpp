#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "nslbp/bitslice.hpp"
#include "nslbp/executor.hpp"
#include "nslbp/isa.hpp"

namespace nslbp {

// Compiled bit-serial dot product: one AND per (weight bit, activation bit)
// pair, reduced by the DPU with bitcount and shift-accumulate.
struct CompiledMlp {
  int length = 0;  // vector length (columns)
  int n_bits = 0;  // weight width
  int m_bits = 0;  // activation width
  BitSliceTensor weight_slices;
  BitSliceTensor input_slices;
  Program program;
  std::vector<std::pair<int, int>> shift_pairs;  // (n, m) per instruction
};

// Places C_n(W) in the W region and C_m(I) in the I region and emits the AND
// program (carry with the all-0 service row computes AND2).
CompiledMlp compile_mlp_layer(std::span<const uint64_t> weights,
                              std::span<const uint64_t> activations, int n_bits, int m_bits);

// Loads the slices, runs the program, and reduces through the DPU. Returns
// the dot product.
int64_t run_mlp(Executor& ex, const CompiledMlp& compiled);

}  // namespace nslbp
