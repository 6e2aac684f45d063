#include "nslbp/margin.hpp"

#include <algorithm>
#include <limits>

#include "nslbp/errors.hpp"
#include "nslbp/rng.hpp"
#include "json.hpp"

namespace nslbp {

namespace {

// The six (level, adjacent reference) pairs of the four-level read path.
constexpr int kBoundaryLevel[6] = {0, 1, 1, 2, 2, 3};
constexpr int kBoundaryRef[6] = {0, 0, 1, 1, 2, 2};

}  // namespace

MarginReport monte_carlo_margin(const VoltageModel& model, double sigma_mv, uint64_t trials,
                                uint64_t seed) {
  if (sigma_mv < 0.0) fail(Err::InvalidArgument, "sigma must be >= 0");
  model.validate();

  MarginReport report;
  report.sigma_mv = sigma_mv;
  report.trials = trials;

  std::array<double, 6> min_margin;
  std::array<double, 6> sum_margin{};
  min_margin.fill(std::numeric_limits<double>::infinity());

  Rng rng(seed);
  for (uint64_t t = 0; t < trials; ++t) {
    for (int k = 0; k < 4; ++k) {
      double noisy = model.level_mv[k] + sigma_mv * rng.gaussian();
      bool wrong = false;
      for (int r = 0; r < 3; ++r) {
        bool nominal_above = model.level_mv[k] > model.ref_mv[r];
        bool sensed_above = noisy > model.ref_mv[r];
        if (sensed_above != nominal_above) wrong = true;
      }
      if (wrong) ++report.decision_errors;
      for (int b = 0; b < 6; ++b) {
        if (kBoundaryLevel[b] != k) continue;
        int r = kBoundaryRef[b];
        bool above = model.level_mv[k] > model.ref_mv[r];
        double margin = above ? noisy - model.ref_mv[r] : model.ref_mv[r] - noisy;
        min_margin[b] = std::min(min_margin[b], margin);
        sum_margin[b] += margin;
      }
    }
  }

  report.samples = trials * 4;
  report.error_rate = report.samples ? double(report.decision_errors) / double(report.samples) : 0.0;
  for (int b = 0; b < 6; ++b) {
    BoundaryMargin& m = report.boundaries[b];
    m.level = kBoundaryLevel[b];
    m.ref = kBoundaryRef[b];
    bool above = model.level_mv[m.level] > model.ref_mv[m.ref];
    m.nominal_mv = above ? model.level_mv[m.level] - model.ref_mv[m.ref]
                         : model.ref_mv[m.ref] - model.level_mv[m.level];
    m.min_mv = trials ? min_margin[b] : m.nominal_mv;
    m.mean_mv = trials ? sum_margin[b] / double(trials) : m.nominal_mv;
  }
  return report;
}

std::string margin_report_json(const MarginReport& report) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["sigma_mv"] = report.sigma_mv;
  j["trials"] = report.trials;
  j["samples"] = report.samples;
  j["decision_errors"] = report.decision_errors;
  j["error_rate"] = report.error_rate;
  nlohmann::json bounds = nlohmann::json::array();
  for (const BoundaryMargin& b : report.boundaries) {
    bounds.push_back({{"level", b.level},
                      {"ref", "R" + std::to_string(b.ref + 1)},
                      {"nominal_mv", b.nominal_mv},
                      {"min_mv", b.min_mv},
                      {"mean_mv", b.mean_mv}});
  }
  j["boundaries"] = bounds;
  return j.dump(2);
}

}  // namespace nslbp
