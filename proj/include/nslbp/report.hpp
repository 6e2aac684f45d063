#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nslbp/cost_model.hpp"
#include "nslbp/trace.hpp"

namespace nslbp {

// Aggregated timing/energy view of one trace. All energy fields are integer
// femtojoules, so by-class and by-layer maps sum exactly to the total.
struct Report {
  std::string name = "run";
  double frequency_hz = 0.0;
  std::string supply;

  uint64_t total_cycles = 0;  // max across sub-arrays; parallel tiles overlap
  double wall_time_s = 0.0;
  uint64_t total_energy_fj = 0;
  uint64_t total_ops = 0;  // bit-operations per the table's ops_per_column

  std::map<std::string, uint64_t> energy_by_class_fj;
  std::map<std::string, uint64_t> energy_by_layer_fj;
  std::map<uint32_t, uint64_t> cycles_by_subarray;

  double energy_pj() const { return double(total_energy_fj) / 1000.0; }
};

Report account(const Trace& trace, const OpCostTable& table);

// Peak efficiency in TOPS/W; numerically equal to bit-ops per picojoule.
double tops_per_watt(const Report& report);

// Ops per second at the report's frequency-limited wall time, in TOPS.
double tops(const Report& report);

// Linear data-load model: ceil(bytes / beat width) beats.
uint64_t data_load_time(uint64_t bytes, const OpCostTable& table);

// Builds a synthetic report from Eq-level op counts (reads as row reads,
// comparisons as in-array cycles, writes as row writes).
Report report_from_op_counts(const std::string& name, const OpCount& ops,
                             const OpCostTable& table);

// Pairwise comparison across named reports, including the MAC-vs-CMP energy
// split (MAC = DPU bitcount + shift-add, CMP = in-array cycles).
struct NetworkComparison {
  std::vector<std::string> names;
  std::vector<uint64_t> energy_fj;
  std::vector<uint64_t> cycles;
  std::vector<uint64_t> mac_energy_fj;
  std::vector<uint64_t> cmp_energy_fj;
  std::vector<std::vector<double>> energy_ratio;  // [i][j] = energy_i / energy_j
  std::vector<std::vector<double>> delay_ratio;
};

NetworkComparison compare_networks(std::span<const Report> reports);

std::string report_json(const Report& report);
std::string report_csv(const Report& report);
std::string comparison_json(const NetworkComparison& cmp);
std::string comparison_csv(const NetworkComparison& cmp);

}  // namespace nslbp
