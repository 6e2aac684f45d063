#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "nslbp/voltage.hpp"

namespace nslbp {

// Distance statistics between one discharge level and one adjacent reference,
// measured on the correct side (negative minimum means a decision flipped).
struct BoundaryMargin {
  int level = 0;  // popcount class
  int ref = 0;    // reference index (0 = R1)
  double nominal_mv = 0.0;
  double min_mv = 0.0;
  double mean_mv = 0.0;
};

struct MarginReport {
  double sigma_mv = 0.0;
  uint64_t trials = 0;
  std::array<BoundaryMargin, 6> boundaries{};
  uint64_t samples = 0;         // trials x 4 levels
  uint64_t decision_errors = 0; // samples whose (or3, maj3, and3) decode flipped
  double error_rate = 0.0;
};

// Monte-Carlo sensing margins: adds zero-mean Gaussian noise (seeded) to each
// level sample, references noiseless. The same seed reuses the same noise
// draws for every sigma, so error rates nest across sigma by construction.
MarginReport monte_carlo_margin(const VoltageModel& model, double sigma_mv, uint64_t trials,
                                uint64_t seed);

std::string margin_report_json(const MarginReport& report);

}  // namespace nslbp
