#include "nslbp/report.hpp"

#include <algorithm>
#include <sstream>

#include "nslbp/errors.hpp"
#include "json.hpp"

namespace nslbp {

namespace {

uint64_t event_beats(const TraceEvent& e, const OpCostTable& table) {
  return (e.size + table.load_beat_bytes - 1) / table.load_beat_bytes;
}

uint64_t event_energy_fj(const TraceEvent& e, const OpCostTable& table) {
  const ClassCost& c = table.cost(e.cls);
  if (e.cls == EventClass::DataLoad) return event_beats(e, table) * c.energy_fj;
  return c.energy_fj;
}

uint64_t event_latency(const TraceEvent& e, const OpCostTable& table) {
  const ClassCost& c = table.cost(e.cls);
  if (e.cls == EventClass::DataLoad) return event_beats(e, table) * c.latency_cycles;
  return c.latency_cycles;
}

}  // namespace

Report account(const Trace& trace, const OpCostTable& table) {
  table.validate();
  Report r;
  r.frequency_hz = table.frequency_hz;
  r.supply = table.supply;
  for (const TraceEvent& e : trace.events) {
    uint64_t energy = event_energy_fj(e, table);
    r.total_energy_fj += energy;
    r.energy_by_class_fj[event_class_name(e.cls)] += energy;
    r.energy_by_layer_fj[e.layer.empty() ? "-" : e.layer] += energy;
    r.cycles_by_subarray[e.subarray] += event_latency(e, table);
    r.total_ops += uint64_t(e.size) * table.cost(e.cls).ops_per_column;
  }
  for (const auto& [id, cycles] : r.cycles_by_subarray)
    r.total_cycles = std::max(r.total_cycles, cycles);
  r.wall_time_s = double(r.total_cycles) / table.frequency_hz;
  return r;
}

double tops_per_watt(const Report& report) {
  if (report.total_energy_fj == 0) fail(Err::DivByZero, "report has zero energy");
  // ops / pJ == TOPS/W.
  return 1000.0 * double(report.total_ops) / double(report.total_energy_fj);
}

double tops(const Report& report) {
  if (report.wall_time_s <= 0.0) fail(Err::DivByZero, "report has zero wall time");
  return double(report.total_ops) / report.wall_time_s / 1e12;
}

uint64_t data_load_time(uint64_t bytes, const OpCostTable& table) {
  if (bytes == 0) return 0;
  uint64_t beats = (bytes + table.load_beat_bytes - 1) / table.load_beat_bytes;
  return beats * table.cost(EventClass::DataLoad).latency_cycles;
}

Report report_from_op_counts(const std::string& name, const OpCount& ops,
                             const OpCostTable& table) {
  Report r;
  r.name = name;
  r.frequency_hz = table.frequency_hz;
  r.supply = table.supply;
  uint64_t read_fj = ops.reads * table.cost(EventClass::RowRead).energy_fj;
  uint64_t cmp_fj = ops.comparisons * table.cost(EventClass::InArrayCycle).energy_fj;
  uint64_t write_fj = ops.writes * table.cost(EventClass::RowWrite).energy_fj;
  r.energy_by_class_fj[event_class_name(EventClass::RowRead)] = read_fj;
  r.energy_by_class_fj[event_class_name(EventClass::InArrayCycle)] = cmp_fj;
  r.energy_by_class_fj[event_class_name(EventClass::RowWrite)] = write_fj;
  r.energy_by_layer_fj["-"] = read_fj + cmp_fj + write_fj;
  r.total_energy_fj = read_fj + cmp_fj + write_fj;
  r.total_cycles = ops.reads * table.cost(EventClass::RowRead).latency_cycles +
                   ops.comparisons * table.cost(EventClass::InArrayCycle).latency_cycles +
                   ops.writes * table.cost(EventClass::RowWrite).latency_cycles;
  r.cycles_by_subarray[0] = r.total_cycles;
  r.wall_time_s = double(r.total_cycles) / table.frequency_hz;
  r.total_ops = ops.comparisons;  // one bit comparison per compare op
  return r;
}

NetworkComparison compare_networks(std::span<const Report> reports) {
  if (reports.size() < 2) fail(Err::InvalidArgument, "need at least two reports to compare");
  NetworkComparison cmp;
  size_t n = reports.size();
  for (const Report& r : reports) {
    cmp.names.push_back(r.name);
    cmp.energy_fj.push_back(r.total_energy_fj);
    cmp.cycles.push_back(r.total_cycles);
    uint64_t mac = 0;
    uint64_t cmp_fj = 0;
    for (const auto& [cls, fj] : r.energy_by_class_fj) {
      if (cls == event_class_name(EventClass::DpuBitcount) ||
          cls == event_class_name(EventClass::DpuShiftAdd))
        mac += fj;
      if (cls == event_class_name(EventClass::InArrayCycle)) cmp_fj += fj;
    }
    cmp.mac_energy_fj.push_back(mac);
    cmp.cmp_energy_fj.push_back(cmp_fj);
  }
  cmp.energy_ratio.assign(n, std::vector<double>(n, 0.0));
  cmp.delay_ratio.assign(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (reports[j].total_energy_fj == 0 || reports[j].total_cycles == 0)
        fail(Err::DivByZero, "comparison baseline has zero energy or cycles");
      cmp.energy_ratio[i][j] =
          double(reports[i].total_energy_fj) / double(reports[j].total_energy_fj);
      cmp.delay_ratio[i][j] = double(reports[i].total_cycles) / double(reports[j].total_cycles);
    }
  return cmp;
}

std::string report_json(const Report& report) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["name"] = report.name;
  j["frequency_hz"] = report.frequency_hz;
  j["supply"] = report.supply;
  j["total_cycles"] = report.total_cycles;
  j["wall_time_s"] = report.wall_time_s;
  j["total_energy_fj"] = report.total_energy_fj;
  j["total_ops"] = report.total_ops;
  j["energy_by_class_fj"] = report.energy_by_class_fj;
  j["energy_by_layer_fj"] = report.energy_by_layer_fj;
  nlohmann::json cyc;
  for (const auto& [id, c] : report.cycles_by_subarray) cyc[std::to_string(id)] = c;
  j["cycles_by_subarray"] = cyc;
  if (report.total_energy_fj > 0) j["tops_per_watt"] = tops_per_watt(report);
  if (report.wall_time_s > 0.0) j["tops"] = tops(report);
  return j.dump(2);
}

std::string report_csv(const Report& report) {
  std::ostringstream os;
  os << "key,value\n";
  os << "name," << report.name << "\n";
  os << "frequency_hz," << report.frequency_hz << "\n";
  os << "supply," << report.supply << "\n";
  os << "total_cycles," << report.total_cycles << "\n";
  os << "wall_time_s," << report.wall_time_s << "\n";
  os << "total_energy_fj," << report.total_energy_fj << "\n";
  os << "total_ops," << report.total_ops << "\n";
  for (const auto& [cls, fj] : report.energy_by_class_fj) os << "energy_fj." << cls << "," << fj << "\n";
  for (const auto& [layer, fj] : report.energy_by_layer_fj)
    os << "energy_fj.layer." << layer << "," << fj << "\n";
  return os.str();
}

std::string comparison_json(const NetworkComparison& cmp) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["names"] = cmp.names;
  j["energy_fj"] = cmp.energy_fj;
  j["cycles"] = cmp.cycles;
  j["mac_energy_fj"] = cmp.mac_energy_fj;
  j["cmp_energy_fj"] = cmp.cmp_energy_fj;
  j["energy_ratio"] = cmp.energy_ratio;
  j["delay_ratio"] = cmp.delay_ratio;
  return j.dump(2);
}

std::string comparison_csv(const NetworkComparison& cmp) {
  std::ostringstream os;
  os << "name,energy_fj,cycles,mac_energy_fj,cmp_energy_fj";
  for (const std::string& n : cmp.names) os << ",energy_vs_" << n << ",delay_vs_" << n;
  os << "\n";
  for (size_t i = 0; i < cmp.names.size(); ++i) {
    os << cmp.names[i] << "," << cmp.energy_fj[i] << "," << cmp.cycles[i] << ","
       << cmp.mac_energy_fj[i] << "," << cmp.cmp_energy_fj[i];
    for (size_t j = 0; j < cmp.names.size(); ++j)
      os << "," << cmp.energy_ratio[i][j] << "," << cmp.delay_ratio[i][j];
    os << "\n";
  }
  return os.str();
}

}  // namespace nslbp
