#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nslbp {

// Cost classes an event can be charged under. Latency and energy per class
// come from the OpCostTable; the trace itself is cost-free.
enum class EventClass {
  InArrayCycle,     // 3-row activate + sense + latch write-back
  RowRead,          // single-row read via the normal read port
  RowWrite,         // row write via the write port
  DpuBitcount,
  DpuShiftAdd,
  DpuActivation,
  PixelConversion,  // per converted bit-plane at the sensor
  DataLoad,         // buffer transfer; size is in bytes
};

inline constexpr int kEventClassCount = 8;

const char* event_class_name(EventClass cls);
EventClass event_class_from_name(const std::string& name);

struct TraceEvent {
  uint64_t cycle = 0;    // logical issue index within the sub-array's stream
  uint32_t subarray = 0;
  std::string op;        // mnemonic or pseudo-op label
  uint32_t size = 0;     // columns / elements (bytes for DataLoad)
  EventClass cls = EventClass::InArrayCycle;
  std::string layer;     // optional tag for per-layer breakdowns
};

struct Trace {
  std::vector<TraceEvent> events;

  void append(const Trace& other) {
    events.insert(events.end(), other.events.begin(), other.events.end());
  }
  size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
};

// Deterministic merge of traces from executors running in parallel on
// distinct sub-arrays: events are ordered by (cycle, sub-array id).
Trace merge_traces(const std::vector<Trace>& traces);

// Line-delimited JSON, one event per line.
std::string trace_to_jsonl(const Trace& trace);
Trace trace_from_jsonl(const std::string& text);
void save_trace(const std::string& path, const Trace& trace);
Trace load_trace(const std::string& path);

}  // namespace nslbp
