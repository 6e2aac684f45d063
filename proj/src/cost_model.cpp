#include "nslbp/cost_model.hpp"

#include <cmath>
#include <fstream>

#include "nslbp/errors.hpp"
#include "json.hpp"

namespace nslbp {

void OpCostTable::validate() const {
  if (frequency_hz <= 0.0) fail(Err::ConfigError, "frequency must be positive");
  if (load_beat_bytes == 0) fail(Err::ConfigError, "load beat width must be positive");
  for (const ClassCost& c : classes)
    if (c.latency_cycles == 0) fail(Err::ConfigError, "latencies must be >= 1 cycle");
}

OpCostTable OpCostTable::defaults() {
  OpCostTable t;
  t.frequency_hz = 1.25e9;
  t.supply = "1.1V";
  t.load_beat_bytes = 32;
  // 37.4 ops/pJ target on a saturating 256-column workload: 256 / 37.4 pJ.
  t.cost(EventClass::InArrayCycle) = {1, 6845, 1};
  t.cost(EventClass::RowRead) = {1, 5000, 0};
  t.cost(EventClass::RowWrite) = {1, 5500, 0};
  t.cost(EventClass::DpuBitcount) = {1, 1200, 1};
  t.cost(EventClass::DpuShiftAdd) = {1, 900, 1};
  t.cost(EventClass::DpuActivation) = {1, 800, 1};
  t.cost(EventClass::PixelConversion) = {4, 3000, 0};
  t.cost(EventClass::DataLoad) = {1, 2000, 0};  // per 32-byte beat
  return t;
}

OpCostTable calibrate(const OpCostTable& base, double target_tops_per_watt) {
  if (target_tops_per_watt <= 0.0) fail(Err::InvalidArgument, "target must be positive");
  OpCostTable t = base;
  // TOPS/W equals bit-ops per picojoule; a saturating in-array event does 256
  // bit-ops, so its energy must be 256/target pJ = 256000/target fJ.
  double fj = 256000.0 / target_tops_per_watt;
  if (fj < 1.0) fail(Err::InvalidArgument, "target beyond femtojoule resolution");
  t.cost(EventClass::InArrayCycle).energy_fj = static_cast<uint64_t>(std::llround(fj));
  t.cost(EventClass::InArrayCycle).ops_per_column = 1;
  return t;
}

namespace {

nlohmann::json class_to_json(const ClassCost& c) {
  return {{"latency_cycles", c.latency_cycles},
          {"energy_fj", c.energy_fj},
          {"ops_per_column", c.ops_per_column}};
}

ClassCost class_from_json(const nlohmann::json& j) {
  ClassCost c;
  c.latency_cycles = j.at("latency_cycles").get<uint64_t>();
  c.energy_fj = j.at("energy_fj").get<uint64_t>();
  c.ops_per_column = j.value("ops_per_column", 0u);
  return c;
}

}  // namespace

OpCostTable load_cost_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::IoError, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Err::ConfigError, std::string("cost table: ") + e.what());
  }
  OpCostTable t;
  try {
    t.frequency_hz = j.at("frequency_hz").get<double>();
    t.supply = j.value("supply", std::string("1.1V"));
    t.load_beat_bytes = j.value("load_beat_bytes", 32ull);
    const nlohmann::json& classes = j.at("classes");
    for (int i = 0; i < kEventClassCount; ++i) {
      EventClass cls = static_cast<EventClass>(i);
      t.cost(cls) = class_from_json(classes.at(event_class_name(cls)));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Err::ConfigError, std::string("cost table: ") + e.what());
  }
  t.validate();
  return t;
}

void save_cost_table(const std::string& path, const OpCostTable& table) {
  std::ofstream out(path);
  if (!out) fail(Err::IoError, "cannot write " + path);
  nlohmann::json j;
  j["format_version"] = 1;
  j["frequency_hz"] = table.frequency_hz;
  j["supply"] = table.supply;
  j["load_beat_bytes"] = table.load_beat_bytes;
  nlohmann::json classes;
  for (int i = 0; i < kEventClassCount; ++i) {
    EventClass cls = static_cast<EventClass>(i);
    classes[event_class_name(cls)] = class_to_json(table.cost(cls));
  }
  j["classes"] = classes;
  out << j.dump(2) << "\n";
}

uint64_t energy_from_op_counts_fj(const OpCount& ops, const OpCostTable& table) {
  return ops.reads * table.cost(EventClass::RowRead).energy_fj +
         ops.comparisons * table.cost(EventClass::InArrayCycle).energy_fj +
         ops.writes * table.cost(EventClass::RowWrite).energy_fj;
}

}  // namespace nslbp
