#pragma once

#include <string>

#include "nslbp/isa.hpp"
#include "nslbp/subarray.hpp"
#include "nslbp/trace.hpp"

namespace nslbp {

// In-order executor bound to one sub-array. Every compute instruction goes
// through activate3 + sense; the only Boolean evaluation outside that path is
// the identical-operand short-circuit of cmp/search, which the controller
// resolves as a constant write.
class Executor {
 public:
  Executor(SubArray& sa, uint32_t subarray_id, Trace& trace)
      : sa_(sa), id_(subarray_id), trace_(trace) {}

  void set_layer_tag(std::string tag) { layer_ = std::move(tag); }
  uint64_t cycle() const { return cycle_; }
  SubArray& subarray() { return sa_; }
  uint32_t id() const { return id_; }

  void exec(const Instruction& instr);

  // Charged accesses for controller-driven flows (Algorithm-style loops and
  // buffer loads that are not ISA instructions).
  BitRow read_row_charged(int row, int size, const std::string& op);
  void write_row_charged(int row, const BitRow& bits, int size, const std::string& op);
  void charge(EventClass cls, const std::string& op, uint32_t size);

 private:
  void masked_write(int row, const BitRow& value, int size);
  void require_zero_helper(int row, int size) const;

  SubArray& sa_;
  uint32_t id_;
  Trace& trace_;
  uint64_t cycle_ = 0;
  std::string layer_;
};

// Runs a whole program on one sub-array and returns its trace.
Trace run(const Program& program, SubArray& sa);

}  // namespace nslbp
