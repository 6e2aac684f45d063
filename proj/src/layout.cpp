#include "nslbp/layout.hpp"

#include "nslbp/bitrow.hpp"
#include "json.hpp"

namespace nslbp {

MappingPlan build_layout(int parallel_pixels, int bits) {
  if (parallel_pixels < 1 || bits < 1)
    fail(Err::InvalidArgument, "layout needs at least one pixel and one bit");
  if (bits > region::kPixelRows)
    fail(Err::CapacityExceeded, "pixel bit depth exceeds the P region (" +
                                    std::to_string(region::kPixelRows) + " rows)");
  if (parallel_pixels > kColumns)
    fail(Err::CapacityExceeded, "more parallel pixels than sub-array columns");
  MappingPlan plan;
  plan.columns = parallel_pixels;
  plan.bits = bits;
  return plan;
}

std::string mapping_plan_json(const MappingPlan& plan) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["columns"] = plan.columns;
  j["bits"] = plan.bits;
  j["pixel_rows"] = {plan.pixel_row(0), plan.pixel_row(plan.bits - 1)};
  j["pivot_rows"] = {plan.pivot_row(0), plan.pivot_row(plan.bits - 1)};
  j["result_row"] = region::kResultRow;
  j["lbp_row"] = region::kLbpRow;
  j["zero_rows"] = {region::kZeroRow0, region::kZeroRow1};
  j["isa_size"] = plan.isa_size();
  return j.dump(2);
}

}  // namespace nslbp
