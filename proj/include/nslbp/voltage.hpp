#pragma once

#include <array>
#include <string>

namespace nslbp {

// RBL discharge model: level_mv[k] is the settled bit-line voltage when k of
// the three activated cells store 1. References sit between adjacent levels.
struct VoltageModel {
  std::array<double, 4> level_mv{280.0, 495.0, 735.0, 950.0};
  std::array<double, 3> ref_mv{360.0, 550.0, 850.0};
  double precharge_mv = 1100.0;

  void validate() const;
};

VoltageModel load_voltage_model(const std::string& path);
void save_voltage_model(const std::string& path, const VoltageModel& model);

}  // namespace nslbp
