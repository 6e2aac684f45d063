#include "nslbp/margin.hpp"

#include "test_support.hpp"

using namespace nslbp;

TEST_CASE("noiseless margins equal the nominal gaps") {
  VoltageModel model;
  MarginReport report = monte_carlo_margin(model, 0.0, 1000, 42);
  CHECK(report.decision_errors == 0);
  CHECK(report.error_rate == 0.0);
  // level0-R1: 80, level1-R1: 135, level1-R2: 55, level2-R2: 185,
  // level2-R3: 115, level3-R3: 100 (all mV).
  const double expected[6] = {80.0, 135.0, 55.0, 185.0, 115.0, 100.0};
  for (int b = 0; b < 6; ++b) {
    CHECK(report.boundaries[b].nominal_mv == expected[b]);
    CHECK(report.boundaries[b].min_mv == expected[b]);
    CHECK(report.boundaries[b].mean_mv == doctest::Approx(expected[b]));
  }
}

TEST_CASE("small sigma keeps the error rate tiny") {
  // Worst nominal gap is 55 mV = 11 sigma at 5 mV; the Gaussian tail puts the
  // expected error count at effectively zero for 1e5 trials.
  VoltageModel model;
  MarginReport report = monte_carlo_margin(model, 5.0, 100000, 7);
  CHECK(report.error_rate < 1e-4);
}

TEST_CASE("error rate is non-decreasing in sigma under a fixed seed") {
  VoltageModel model;
  const double sigmas[] = {0.0, 5.0, 15.0, 30.0};
  double prev = -1.0;
  for (double sigma : sigmas) {
    MarginReport report = monte_carlo_margin(model, sigma, 100000, 1234);
    CHECK(report.error_rate >= prev);
    prev = report.error_rate;
  }
  // With the shared noise stream the per-sample error events nest, so the
  // ordering is deterministic, not merely statistical.
  MarginReport noisy = monte_carlo_margin(model, 30.0, 100000, 1234);
  CHECK(noisy.error_rate > 0.0);
}

TEST_CASE("margin report is reproducible and serializable") {
  VoltageModel model;
  MarginReport a = monte_carlo_margin(model, 12.0, 5000, 99);
  MarginReport b = monte_carlo_margin(model, 12.0, 5000, 99);
  CHECK(a.decision_errors == b.decision_errors);
  CHECK(margin_report_json(a) == margin_report_json(b));
  CHECK(margin_report_json(a).find("\"error_rate\"") != std::string::npos);

  CHECK_ERR(monte_carlo_margin(model, -1.0, 10, 1), Err::InvalidArgument);
}
