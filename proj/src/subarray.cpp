#include "nslbp/subarray.hpp"

#include <fstream>

#include "nslbp/errors.hpp"
#include "json.hpp"

namespace nslbp {

void VoltageModel::validate() const {
  for (int k = 0; k + 1 < 4; ++k)
    if (!(level_mv[k] < level_mv[k + 1]))
      fail(Err::ConfigError, "discharge levels must be strictly increasing");
  if (!(ref_mv[0] < ref_mv[1] && ref_mv[1] < ref_mv[2]))
    fail(Err::ConfigError, "references must satisfy R1 < R2 < R3");
  // Each reference must separate its adjacent levels.
  if (!(level_mv[0] < ref_mv[0] && ref_mv[0] < level_mv[1] && level_mv[1] < ref_mv[1] &&
        ref_mv[1] < level_mv[2] && level_mv[2] < ref_mv[2] && ref_mv[2] < level_mv[3]))
    fail(Err::ConfigError, "levels and references must interleave");
  if (precharge_mv <= level_mv[3]) fail(Err::ConfigError, "precharge must exceed the top level");
}

VoltageModel load_voltage_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::IoError, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Err::ConfigError, std::string("voltage model: ") + e.what());
  }
  VoltageModel m;
  try {
    auto levels = j.at("levels_mv");
    auto refs = j.at("refs_mv");
    for (int k = 0; k < 4; ++k) m.level_mv[k] = levels.at(k).get<double>();
    for (int k = 0; k < 3; ++k) m.ref_mv[k] = refs.at(k).get<double>();
    if (j.contains("precharge_mv")) m.precharge_mv = j.at("precharge_mv").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(Err::ConfigError, std::string("voltage model: ") + e.what());
  }
  m.validate();
  return m;
}

void save_voltage_model(const std::string& path, const VoltageModel& model) {
  std::ofstream out(path);
  if (!out) fail(Err::IoError, "cannot write " + path);
  nlohmann::json j;
  j["levels_mv"] = model.level_mv;
  j["refs_mv"] = model.ref_mv;
  j["precharge_mv"] = model.precharge_mv;
  out << j.dump(2) << "\n";
}

SenseOut sense(const LevelRow& levels, const VoltageModel& model) {
  SenseOut out;
  for (int j = 0; j < kColumns; ++j) {
    bool or3 = levels[j] > model.ref_mv[0];
    bool maj3 = levels[j] > model.ref_mv[1];
    bool and3 = levels[j] > model.ref_mv[2];
    out.or3.set(j, or3);
    out.maj3.set(j, maj3);
    out.and3.set(j, and3);
    // Capacitive majority of (or3, min3, and3) realizes the parity.
    int votes = int(or3) + int(!maj3) + int(and3);
    out.xor3.set(j, votes >= 2);
  }
  out.nor3 = ~out.or3;
  out.min3 = ~out.maj3;
  out.nand3 = ~out.and3;
  return out;
}

void SubArray::check_row(int row) const {
  if (row < 0 || row >= kRows) fail(Err::RowOutOfRange, "row " + std::to_string(row));
}

void SubArray::write_row(int row, const BitRow& bits) {
  check_row(row);
  cells_[row] = bits;
}

const BitRow& SubArray::read_row(int row) const {
  check_row(row);
  return cells_[row];
}

LevelRow SubArray::activate3(int row_a, int row_b, int row_c) const {
  check_row(row_a);
  check_row(row_b);
  check_row(row_c);
  if (row_a == row_b || row_a == row_c || row_b == row_c)
    fail(Err::DuplicateRow, "three-row activation needs distinct rows");
  const BitRow& a = cells_[row_a];
  const BitRow& b = cells_[row_b];
  const BitRow& c = cells_[row_c];
  LevelRow levels;
  for (int j = 0; j < kColumns; ++j) {
    int ones = int(a.test(j)) + int(b.test(j)) + int(c.test(j));
    levels[j] = model_.level_mv[ones];
  }
  return levels;
}

std::vector<std::string> SubArray::dump_rows() const {
  std::vector<std::string> out;
  out.reserve(kRows);
  for (const BitRow& r : cells_) out.push_back(row_to_hex(r));
  return out;
}

BitRow logic2(const SubArray& sa, TwoInputOp op, int row_a, int row_b, int helper_row) {
  bool helper_ones = (op == TwoInputOp::And2 || op == TwoInputOp::Nand2);
  const BitRow& helper = sa.read_row(helper_row);
  if (helper_ones ? !helper.all() : helper.any())
    fail(Err::HelperNotInitialized,
         helper_ones ? "And2/Nand2 need an all-1 helper row" : "helper row must be all-0");
  SenseOut out = sense(sa.activate3(row_a, row_b, helper_row), sa.model());
  switch (op) {
    case TwoInputOp::Xor2: return out.xor3;
    case TwoInputOp::Or2: return out.or3;
    case TwoInputOp::Nor2: return out.nor3;
    case TwoInputOp::Xnor2: return ~out.xor3;
    case TwoInputOp::And2: return out.and3;
    case TwoInputOp::Nand2: return out.nand3;
  }
  fail(Err::InvalidArgument, "unknown 2-input op");
}

std::pair<BitRow, BitRow> full_add(const SubArray& sa, int row_a, int row_b, int row_c) {
  SenseOut out = sense(sa.activate3(row_a, row_b, row_c), sa.model());
  return {out.xor3, out.maj3};
}

}  // namespace nslbp
