#include "nslbp/network_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nslbp/errors.hpp"
#include "json.hpp"

namespace nslbp {

namespace {

using nlohmann::json;

json kernel_to_json(const LbpKernel& k) {
  json samples = json::array();
  json significance = json::array();
  for (const LbpSample& s : k.samples) {
    samples.push_back({s.row, s.col});
    significance.push_back(s.significance);
  }
  return {{"extent", k.extent},
          {"pivot", {k.pivot_row, k.pivot_col}},
          {"samples", samples},
          {"significance", significance}};
}

LbpKernel kernel_from_json(const json& j) {
  LbpKernel k;
  k.extent = j.at("extent").get<int>();
  k.pivot_row = j.at("pivot").at(0).get<int>();
  k.pivot_col = j.at("pivot").at(1).get<int>();
  const json& samples = j.at("samples");
  const json& significance = j.at("significance");
  if (samples.size() != significance.size())
    fail(Err::ConfigError, "samples and significance differ in length");
  for (size_t i = 0; i < samples.size(); ++i) {
    LbpSample s;
    s.row = samples.at(i).at(0).get<int>();
    s.col = samples.at(i).at(1).get<int>();
    s.significance = significance.at(i).get<int>();
    k.samples.push_back(s);
  }
  return k;
}

json layer_to_json(const LayerSpec& layer) {
  if (std::holds_alternative<LbpLayer>(layer)) {
    const LbpLayer& l = std::get<LbpLayer>(layer);
    json outputs = json::array();
    for (const LbpOutputSpec& out : l.outputs) {
      json kernels = json::array();
      for (const LbpKernel& k : out.kernels) kernels.push_back(kernel_to_json(k));
      json proj = json::array();
      for (const ProjEntry& e : out.proj.entries)
        proj.push_back({{"channel", e.channel}, {"sample", e.sample}, {"out_bit", e.out_bit}});
      outputs.push_back({{"kernels", kernels}, {"projection", proj}});
    }
    json j = {{"type", "lbp"}, {"joint", l.joint}, {"outputs", outputs}};
    if (l.relu_shift) j["relu_shift"] = *l.relu_shift;
    return j;
  }
  if (std::holds_alternative<AvgPoolSpec>(layer))
    return {{"type", "avg_pool"}, {"window", std::get<AvgPoolSpec>(layer).window}};
  if (std::holds_alternative<MlpSpec>(layer)) {
    const MlpSpec& m = std::get<MlpSpec>(layer);
    return {{"type", "mlp"},
            {"weight_bits", m.weight_bits},
            {"activation_bits", m.activation_bits},
            {"weights", m.weights}};
  }
  const BatchNormSpec& b = std::get<BatchNormSpec>(layer);
  json gamma = json::array();
  json beta = json::array();
  double scale = double(1ll << b.fraction_bits);
  for (int64_t g : b.gamma_fx) gamma.push_back(double(g) / scale);
  for (int64_t v : b.beta_fx) beta.push_back(double(v) / scale);
  return {{"type", "batch_norm"},
          {"fraction_bits", b.fraction_bits},
          {"gamma", gamma},
          {"beta", beta}};
}

LayerSpec layer_from_json(const json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "lbp") {
    LbpLayer l;
    l.joint = j.value("joint", false);
    if (j.contains("relu_shift")) l.relu_shift = j.at("relu_shift").get<uint32_t>();
    for (const json& out_j : j.at("outputs")) {
      LbpOutputSpec out;
      for (const json& k_j : out_j.at("kernels")) out.kernels.push_back(kernel_from_json(k_j));
      for (const json& e_j : out_j.at("projection"))
        out.proj.entries.push_back(ProjEntry{e_j.at("channel").get<int>(),
                                             e_j.at("sample").get<int>(),
                                             e_j.at("out_bit").get<int>()});
      l.outputs.push_back(std::move(out));
    }
    return l;
  }
  if (type == "avg_pool") return AvgPoolSpec{j.at("window").get<uint32_t>()};
  if (type == "mlp") {
    MlpSpec m;
    m.weight_bits = j.at("weight_bits").get<uint32_t>();
    m.activation_bits = j.at("activation_bits").get<uint32_t>();
    m.weights = j.at("weights").get<std::vector<std::vector<uint64_t>>>();
    return m;
  }
  if (type == "batch_norm") {
    BatchNormSpec b;
    b.fraction_bits = j.value("fraction_bits", 16u);
    double scale = double(1ll << b.fraction_bits);
    for (const json& g : j.at("gamma"))
      b.gamma_fx.push_back(static_cast<int64_t>(std::llround(g.get<double>() * scale)));
    for (const json& v : j.at("beta"))
      b.beta_fx.push_back(static_cast<int64_t>(std::llround(v.get<double>() * scale)));
    return b;
  }
  fail(Err::ConfigError, "unknown layer type '" + type + "'");
}

}  // namespace

NetworkSpec network_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Err::ConfigError, std::string("network spec: ") + e.what());
  }
  NetworkSpec net;
  try {
    int version = j.at("format_version").get<int>();
    if (version != 1) fail(Err::ConfigError, "unsupported format_version");
    net.name = j.value("name", std::string("net"));
    const json& input = j.at("input");
    net.input.channels = input.at("channels").get<uint32_t>();
    net.input.height = input.at("height").get<uint32_t>();
    net.input.width = input.at("width").get<uint32_t>();
    net.input.bits = input.value("bits", 8u);
    net.default_apx = j.value("apx", 0);
    for (const json& layer_j : j.at("layers")) net.layers.push_back(layer_from_json(layer_j));
  } catch (const json::exception& e) {
    fail(Err::ConfigError, std::string("network spec: ") + e.what());
  }
  return net;
}

std::string network_to_json(const NetworkSpec& net) {
  json j;
  j["format_version"] = 1;
  j["name"] = net.name;
  j["input"] = {{"channels", net.input.channels},
                {"height", net.input.height},
                {"width", net.input.width},
                {"bits", net.input.bits}};
  j["apx"] = net.default_apx;
  json layers = json::array();
  for (const LayerSpec& layer : net.layers) layers.push_back(layer_to_json(layer));
  j["layers"] = layers;
  return j.dump(2);
}

NetworkSpec load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::ConfigError, "cannot open network spec " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return network_from_json(os.str());
}

void save_network(const std::string& path, const NetworkSpec& net) {
  std::ofstream out(path);
  if (!out) fail(Err::IoError, "cannot write " + path);
  out << network_to_json(net) << "\n";
}

}  // namespace nslbp
