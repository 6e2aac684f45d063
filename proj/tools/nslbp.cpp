#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nslbp/cost_model.hpp"
#include "nslbp/errors.hpp"
#include "nslbp/image_io.hpp"
#include "nslbp/layout.hpp"
#include "nslbp/margin.hpp"
#include "nslbp/mlp_compile.hpp"
#include "nslbp/network_io.hpp"
#include "nslbp/report.hpp"
#include "nslbp/simulator.hpp"
#include "nslbp/trace.hpp"
#include "nslbp/voltage.hpp"
#include "nslbp/workload.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nslbp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;

unsigned thread_budget() {
  if (const char* env = std::getenv("NSLBP_THREADS")) {
    long n = std::atol(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return 1;
}

// Index-ordered parallel loop; results must land in preallocated slots.
template <typename Fn>
void parallel_for(size_t count, Fn&& fn) {
  unsigned threads = std::min<size_t>(thread_budget(), count);
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::IoError, "cannot write " + path.string());
  out << text;
}

json fm_to_json(const FeatureMap& fm) {
  return {{"channels", fm.channels},
          {"height", fm.height},
          {"width", fm.width},
          {"bits", fm.bits},
          {"data", fm.data}};
}

std::vector<RawImage> load_dataset(const std::string& path, const std::string& format,
                                   size_t limit) {
  std::vector<RawImage> images;
  if (format == "idx") {
    images = load_idx(path);
  } else if (format == "pgm") {
    images.push_back(load_pgm(path));
  } else {
    fail(Err::ConfigError, "format must be 'idx' or 'pgm'");
  }
  if (limit && images.size() > limit) images.resize(limit);
  if (images.empty()) fail(Err::ConfigError, "dataset is empty");
  return images;
}

OpCostTable table_or_default(const std::string& path) {
  return path.empty() ? OpCostTable::defaults() : load_cost_table(path);
}

VoltageModel voltage_or_default(const std::string& path) {
  return path.empty() ? VoltageModel{} : load_voltage_model(path);
}

struct CommonOpts {
  std::string network_path;
  std::string dataset_path;
  std::string format = "idx";
  std::string cost_table_path;
  std::string voltage_model_path;
  std::string out_dir = "out";
  int apx = -1;  // -1 keeps the network default
  uint64_t seed = 1;
  size_t limit = 0;
  int random_images = 0;

  SimOptions sim_options() const {
    SimOptions options;
    options.voltage = voltage_or_default(voltage_model_path);
    return options;
  }
};

NetworkSpec resolve_network(const CommonOpts& opts, Rng& rng) {
  if (!opts.network_path.empty()) return load_network(opts.network_path);
  if (opts.random_images > 0) {
    WorkloadParams params;
    return make_random_network(rng, params);
  }
  fail(Err::ConfigError, "need --network (or --random for generated workloads)");
}

std::vector<RawImage> resolve_images(const CommonOpts& opts, const NetworkSpec& net, Rng& rng) {
  if (!opts.dataset_path.empty()) return load_dataset(opts.dataset_path, opts.format, opts.limit);
  if (opts.random_images > 0) {
    std::vector<RawImage> images;
    for (int i = 0; i < opts.random_images; ++i)
      images.push_back(make_random_image(rng, net.input.height, net.input.width, net.input.bits));
    return images;
  }
  fail(Err::ConfigError, "need --dataset (or --random N)");
}

int cmd_compile(const CommonOpts& opts) {
  NetworkSpec net = load_network(opts.network_path);
  int apx = opts.apx >= 0 ? opts.apx : net.default_apx;
  net.validate(apx);
  fs::create_directories(opts.out_dir);

  json manifest;
  manifest["format_version"] = 1;
  manifest["network"] = net.name;
  manifest["apx"] = apx;
  json layers = json::array();
  int lbp_index = 0, mlp_index = 0;
  for (const LayerSpec& layer : net.layers) {
    if (std::holds_alternative<LbpLayer>(layer)) {
      const LbpLayer& l = std::get<LbpLayer>(layer);
      // Worst-case tile: full column occupancy at the mapped bit depth.
      MappingPlan plan = build_layout(kColumns, std::max(1, int(net.input.bits) - apx));
      std::string name = "lbp" + std::to_string(lbp_index++) + "_plan.json";
      write_file(fs::path(opts.out_dir) / name, mapping_plan_json(plan) + "\n");
      layers.push_back({{"type", "lbp"}, {"plan", name}, {"outputs", l.outputs.size()}});
    } else if (std::holds_alternative<MlpSpec>(layer)) {
      const MlpSpec& m = std::get<MlpSpec>(layer);
      size_t chunk = std::min<size_t>(m.in_features(), kColumns);
      std::vector<uint64_t> zeros(chunk, 0);
      CompiledMlp compiled = compile_mlp_layer(zeros, zeros, int(m.weight_bits),
                                               int(m.activation_bits));
      std::string name = "mlp" + std::to_string(mlp_index++) + ".asm";
      write_file(fs::path(opts.out_dir) / name, format_program(compiled.program));
      layers.push_back({{"type", "mlp"}, {"program", name},
                        {"and_ops", compiled.program.instructions.size()}});
    } else if (std::holds_alternative<AvgPoolSpec>(layer)) {
      layers.push_back({{"type", "avg_pool"}});
    } else {
      layers.push_back({{"type", "batch_norm"}});
    }
  }
  manifest["layers"] = layers;
  write_file(fs::path(opts.out_dir) / "compile_manifest.json", manifest.dump(2) + "\n");
  std::cout << "compiled " << net.name << " -> " << opts.out_dir << "\n";
  return kExitOk;
}

int cmd_run(const CommonOpts& opts, const std::string& mode) {
  Rng rng(opts.seed);
  NetworkSpec net = resolve_network(opts, rng);
  int apx = opts.apx >= 0 ? opts.apx : net.default_apx;
  net.validate(apx);
  std::vector<RawImage> images = resolve_images(opts, net, rng);
  fs::create_directories(opts.out_dir);

  json scores = json::array();
  json ofmaps = json::array();
  Trace merged;
  SimOptions options = opts.sim_options();

  std::vector<SimResult> sims(images.size());
  std::vector<ReferenceResult> refs(images.size());
  parallel_for(images.size(), [&](size_t i) {
    if (mode == "simulate") {
      sims[i] = simulate_image(net, images[i], apx, options);
    } else {
      FeatureMap fm = quantize_skip(images[i], net.input.bits, uint32_t(apx));
      refs[i] = reference_forward(net, fm, apx);
    }
  });

  for (size_t i = 0; i < images.size(); ++i) {
    const auto& score_vec = mode == "simulate" ? sims[i].scores : refs[i].scores;
    const auto& maps = mode == "simulate" ? sims[i].lbp_ofmaps : refs[i].lbp_ofmaps;
    scores.push_back({{"image", i}, {"scores", score_vec}});
    json per_image = json::array();
    for (const FeatureMap& fm : maps) per_image.push_back(fm_to_json(fm));
    ofmaps.push_back({{"image", i}, {"lbp_ofmaps", per_image}});
    if (mode == "simulate") merged.append(sims[i].trace);
  }

  write_file(fs::path(opts.out_dir) / "scores.json", scores.dump(2) + "\n");
  write_file(fs::path(opts.out_dir) / "ofmaps.json", ofmaps.dump(2) + "\n");
  if (mode == "simulate") {
    save_trace((fs::path(opts.out_dir) / "trace.jsonl").string(), merged);
    OpCostTable table = table_or_default(opts.cost_table_path);
    Report report = account(merged, table);
    report.name = net.name;
    write_file(fs::path(opts.out_dir) / "report.json", report_json(report) + "\n");
    write_file(fs::path(opts.out_dir) / "report.csv", report_csv(report));
  }
  std::cout << mode << " finished: " << images.size() << " image(s), apx " << apx << "\n";
  return kExitOk;
}

int cmd_verify(const CommonOpts& opts) {
  Rng rng(opts.seed);
  NetworkSpec net = resolve_network(opts, rng);
  int apx = opts.apx >= 0 ? opts.apx : net.default_apx;
  net.validate(apx);
  std::vector<RawImage> images = resolve_images(opts, net, rng);
  SimOptions options = opts.sim_options();

  std::vector<int> mismatches(images.size(), 0);
  parallel_for(images.size(), [&](size_t i) {
    FeatureMap fm = quantize_skip(images[i], net.input.bits, uint32_t(apx));
    ReferenceResult ref = reference_forward(net, fm, apx);
    SimResult sim = simulate(net, fm, apx, options);
    bool ok = ref.scores == sim.scores && ref.lbp_ofmaps.size() == sim.lbp_ofmaps.size();
    if (ok)
      for (size_t l = 0; l < ref.lbp_ofmaps.size(); ++l)
        if (!(ref.lbp_ofmaps[l] == sim.lbp_ofmaps[l])) ok = false;
    mismatches[i] = ok ? 0 : 1;
  });

  int bad = 0;
  for (size_t i = 0; i < images.size(); ++i) {
    if (mismatches[i]) {
      ++bad;
      std::cerr << "mismatch on image " << i << "\n";
    }
  }
  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    json summary = {{"images", images.size()}, {"apx", apx}, {"mismatches", bad}};
    write_file(fs::path(opts.out_dir) / "verify.json", summary.dump(2) + "\n");
  }
  if (bad) {
    std::cerr << "verify FAILED: " << bad << "/" << images.size() << " image(s) differ\n";
    return kExitMismatch;
  }
  std::cout << "verify OK: " << images.size() << " image(s), apx " << apx << "\n";
  return kExitOk;
}

int cmd_margin(const std::string& voltage_path, const std::vector<double>& sigmas,
               uint64_t trials, uint64_t seed, const std::string& out_dir) {
  VoltageModel model = voltage_or_default(voltage_path);
  fs::create_directories(out_dir);
  json all = json::array();
  for (double sigma : sigmas) {
    MarginReport report = monte_carlo_margin(model, sigma, trials, seed);
    all.push_back(json::parse(margin_report_json(report)));
    std::cout << "sigma " << sigma << " mV: error rate " << report.error_rate << "\n";
  }
  write_file(fs::path(out_dir) / "margin.json", all.dump(2) + "\n");
  return kExitOk;
}

int cmd_report(const std::string& trace_path, const std::string& cost_path,
               const std::string& name, const std::string& out_dir) {
  Trace trace = load_trace(trace_path);
  OpCostTable table = table_or_default(cost_path);
  Report report = account(trace, table);
  report.name = name;
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "report.json", report_json(report) + "\n");
  write_file(fs::path(out_dir) / "report.csv", report_csv(report));
  std::cout << "energy " << report.energy_pj() << " pJ over " << report.total_cycles
            << " cycles\n";
  return kExitOk;
}

int cmd_calibrate(double target, const std::string& base_path, const std::string& out_path) {
  OpCostTable base = table_or_default(base_path);
  OpCostTable fitted = calibrate(base, target);
  save_cost_table(out_path, fitted);
  std::cout << "in-array energy fitted to " << fitted.cost(EventClass::InArrayCycle).energy_fj
            << " fJ for " << target << " TOPS/W\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional simulator and compiler for an in-SRAM LBP accelerator"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string mode = "simulate";

  CLI::App* compile = app.add_subcommand("compile", "emit mapping plans and MLP programs");
  compile->add_option("--network", opts.network_path, "network spec JSON")->required();
  compile->add_option("--apx", opts.apx, "override approximated bits");
  compile->add_option("--out", opts.out_dir, "output directory");

  CLI::App* run = app.add_subcommand("run", "run inference and emit artifacts");
  run->add_option("--network", opts.network_path, "network spec JSON");
  run->add_option("--dataset", opts.dataset_path, "IDX file or PGM image");
  run->add_option("--format", opts.format, "dataset format: idx|pgm");
  run->add_option("--mode", mode, "reference|simulate")
      ->check(CLI::IsMember({"reference", "simulate"}));
  run->add_option("--apx", opts.apx, "override approximated bits");
  run->add_option("--cost-table", opts.cost_table_path, "cost table JSON");
  run->add_option("--voltage-model", opts.voltage_model_path, "voltage model JSON");
  run->add_option("--seed", opts.seed, "seed for generated workloads");
  run->add_option("--limit", opts.limit, "max images to process");
  run->add_option("--random", opts.random_images, "use N generated images");
  run->add_option("--out", opts.out_dir, "output directory");

  CLI::App* verify = app.add_subcommand("verify", "diff simulator against the reference");
  verify->add_option("--network", opts.network_path, "network spec JSON");
  verify->add_option("--dataset", opts.dataset_path, "IDX file or PGM image");
  verify->add_option("--format", opts.format, "dataset format: idx|pgm");
  verify->add_option("--apx", opts.apx, "override approximated bits");
  verify->add_option("--voltage-model", opts.voltage_model_path, "voltage model JSON");
  verify->add_option("--seed", opts.seed, "seed for generated workloads");
  verify->add_option("--limit", opts.limit, "max images to process");
  verify->add_option("--random", opts.random_images, "use N generated images");
  verify->add_option("--out", opts.out_dir, "output directory");

  std::string voltage_path;
  std::vector<double> sigmas{0.0, 5.0, 15.0, 30.0};
  uint64_t trials = 100000;
  uint64_t margin_seed = 1;
  std::string margin_out = "out";
  CLI::App* margin = app.add_subcommand("margin", "Monte-Carlo sensing margin analysis");
  margin->add_option("--voltage-model", voltage_path, "voltage model JSON");
  margin->add_option("--sigma", sigmas, "noise sigmas in mV");
  margin->add_option("--trials", trials, "trials per sigma");
  margin->add_option("--seed", margin_seed, "noise seed");
  margin->add_option("--out", margin_out, "output directory");

  std::string trace_path, report_name = "run";
  std::string report_cost, report_out = "out";
  CLI::App* report = app.add_subcommand("report", "account an existing trace");
  report->add_option("--trace", trace_path, "trace JSONL")->required();
  report->add_option("--cost-table", report_cost, "cost table JSON");
  report->add_option("--name", report_name, "report label");
  report->add_option("--out", report_out, "output directory");

  double target = 37.4;
  std::string calib_base, calib_out = "cost_table.json";
  CLI::App* calib = app.add_subcommand("calibrate", "fit the in-array energy to a TOPS/W target");
  calib->add_option("--target", target, "target TOPS/W");
  calib->add_option("--cost-table", calib_base, "base table JSON");
  calib->add_option("--out", calib_out, "output path");

  try {
    app.parse(argc, argv);
    if (compile->parsed()) return cmd_compile(opts);
    if (run->parsed()) return cmd_run(opts, mode);
    if (verify->parsed()) return cmd_verify(opts);
    if (margin->parsed()) return cmd_margin(voltage_path, sigmas, trials, margin_seed, margin_out);
    if (report->parsed()) return cmd_report(trace_path, report_cost, report_name, report_out);
    if (calib->parsed()) return cmd_calibrate(target, calib_base, calib_out);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
