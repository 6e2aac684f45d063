#include "nslbp/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nslbp/errors.hpp"
#include "json.hpp"

namespace nslbp {

const char* event_class_name(EventClass cls) {
  switch (cls) {
    case EventClass::InArrayCycle: return "in_array_cycle";
    case EventClass::RowRead: return "row_read";
    case EventClass::RowWrite: return "row_write";
    case EventClass::DpuBitcount: return "dpu_bitcount";
    case EventClass::DpuShiftAdd: return "dpu_shift_add";
    case EventClass::DpuActivation: return "dpu_activation";
    case EventClass::PixelConversion: return "pixel_conversion";
    case EventClass::DataLoad: return "data_load";
  }
  return "?";
}

EventClass event_class_from_name(const std::string& name) {
  for (int i = 0; i < kEventClassCount; ++i) {
    EventClass cls = static_cast<EventClass>(i);
    if (name == event_class_name(cls)) return cls;
  }
  fail(Err::UnknownEventClass, "'" + name + "'");
}

Trace merge_traces(const std::vector<Trace>& traces) {
  Trace merged;
  for (const Trace& t : traces) merged.append(t);
  std::stable_sort(merged.events.begin(), merged.events.end(),
                   [](const TraceEvent& a, const TraceEvent& b) {
                     return a.cycle != b.cycle ? a.cycle < b.cycle : a.subarray < b.subarray;
                   });
  return merged;
}

std::string trace_to_jsonl(const Trace& trace) {
  std::ostringstream os;
  for (const TraceEvent& e : trace.events) {
    nlohmann::json j;
    j["cycle"] = e.cycle;
    j["subarray"] = e.subarray;
    j["op"] = e.op;
    j["size"] = e.size;
    j["class"] = event_class_name(e.cls);
    if (!e.layer.empty()) j["layer"] = e.layer;
    os << j.dump() << "\n";
  }
  return os.str();
}

Trace trace_from_jsonl(const std::string& text) {
  Trace trace;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(Err::ConfigError, std::string("trace line: ") + e.what());
    }
    TraceEvent event;
    try {
      event.cycle = j.at("cycle").get<uint64_t>();
      event.subarray = j.at("subarray").get<uint32_t>();
      event.op = j.at("op").get<std::string>();
      event.size = j.at("size").get<uint32_t>();
      event.cls = event_class_from_name(j.at("class").get<std::string>());
      if (j.contains("layer")) event.layer = j.at("layer").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(Err::ConfigError, std::string("trace line: ") + e.what());
    }
    trace.events.push_back(std::move(event));
  }
  return trace;
}

void save_trace(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write " + path);
  out << trace_to_jsonl(trace);
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return trace_from_jsonl(os.str());
}

}  // namespace nslbp
