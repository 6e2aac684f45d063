#include "nslbp/mlp_compile.hpp"

#include "nslbp/dpu.hpp"
#include "nslbp/errors.hpp"
#include "nslbp/layout.hpp"

namespace nslbp {

BitSliceTensor bit_slice(std::span<const uint64_t> x, int width) {
  if (width < 1 || width > 64) fail(Err::InvalidArgument, "slice width must be in [1, 64]");
  if (x.size() > kColumns) fail(Err::CapacityExceeded, "vector longer than sub-array columns");
  uint64_t limit = width >= 64 ? ~0ull : (1ull << width) - 1;
  BitSliceTensor t;
  t.width = width;
  t.length = static_cast<int>(x.size());
  t.rows.assign(width, BitRow{});
  for (size_t j = 0; j < x.size(); ++j) {
    if (x[j] > limit) fail(Err::WidthTooSmall, "element " + std::to_string(j) + " needs more bits");
    for (int k = 0; k < width; ++k)
      if ((x[j] >> k) & 1ull) t.rows[k].set(j);
  }
  return t;
}

std::vector<uint64_t> unslice(const BitSliceTensor& t) {
  std::vector<uint64_t> out(t.length, 0);
  for (int k = 0; k < t.width; ++k)
    for (int j = 0; j < t.length; ++j)
      if (t.rows[k].test(j)) out[j] |= 1ull << k;
  return out;
}

CompiledMlp compile_mlp_layer(std::span<const uint64_t> weights,
                              std::span<const uint64_t> activations, int n_bits, int m_bits) {
  if (weights.size() != activations.size())
    fail(Err::ShapeMismatch, "weight and activation vectors differ in length");
  if (weights.empty()) fail(Err::InvalidArgument, "empty dot product");
  if (n_bits < 1 || m_bits < 1) fail(Err::InvalidArgument, "bit widths must be >= 1");
  if (n_bits > region::kWeightRows || m_bits > region::kInputRows)
    fail(Err::CapacityExceeded, "bit slices exceed the W/I regions");
  if (weights.size() > kColumns)
    fail(Err::CapacityExceeded, "vector longer than sub-array columns");

  CompiledMlp compiled;
  compiled.length = static_cast<int>(weights.size());
  compiled.n_bits = n_bits;
  compiled.m_bits = m_bits;
  compiled.weight_slices = bit_slice(weights, n_bits);
  compiled.input_slices = bit_slice(activations, m_bits);

  int size = compiled.length <= 64 ? 64 : compiled.length <= 128 ? 128 : 256;
  for (int n = 0; n < n_bits; ++n) {
    for (int m = 0; m < m_bits; ++m) {
      // maj(a, b, 0) = a AND b, so carry with a zero row is the AND2.
      compiled.program.instructions.push_back(Instruction{
          Opcode::Carry, region::kScratchRow, region::kWeightBase + n, region::kInputBase + m,
          region::kZeroRow0, false, size});
      compiled.shift_pairs.emplace_back(n, m);
    }
  }
  return compiled;
}

int64_t run_mlp(Executor& ex, const CompiledMlp& compiled) {
  const int size = compiled.length <= 64 ? 64 : compiled.length <= 128 ? 128 : 256;
  for (int n = 0; n < compiled.n_bits; ++n)
    ex.write_row_charged(region::kWeightBase + n, compiled.weight_slices.rows[n], size, "load");
  for (int m = 0; m < compiled.m_bits; ++m)
    ex.write_row_charged(region::kInputBase + m, compiled.input_slices.rows[m], size, "load");
  ex.charge(EventClass::DataLoad, "load",
            static_cast<uint32_t>((compiled.n_bits + compiled.m_bits) * kColumns / 8));

  const BitRow active = column_mask(compiled.length);
  int64_t acc = 0;
  for (size_t i = 0; i < compiled.program.instructions.size(); ++i) {
    ex.exec(compiled.program.instructions[i]);
    BitRow product = ex.subarray().read_row(region::kScratchRow) & active;
    uint64_t count = dpu::bitcount(product);
    ex.charge(EventClass::DpuBitcount, "bitcount", static_cast<uint32_t>(compiled.length));
    auto [n, m] = compiled.shift_pairs[i];
    acc = dpu::shift_accumulate(acc, count, m, n);
    ex.charge(EventClass::DpuShiftAdd, "shift_add", static_cast<uint32_t>(compiled.length));
  }
  return acc;
}

}  // namespace nslbp
