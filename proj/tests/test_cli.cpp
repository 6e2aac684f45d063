#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "nslbp/image_io.hpp"
#include "nslbp/network_io.hpp"
#include "nslbp/workload.hpp"

#ifndef NSLBP_CLI_PATH
#define NSLBP_CLI_PATH "nslbp"
#endif

namespace fs = std::filesystem;
using namespace nslbp;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(NSLBP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("verify exits zero on matching random workloads") {
  TempDir dir("nslbp_cli_verify");
  Rng rng(7);
  NetworkSpec net = make_random_network(rng);
  fs::path spec = dir.path / "net.json";
  save_network(spec.string(), net);
  std::vector<RawImage> images;
  for (int i = 0; i < 10; ++i) images.push_back(make_random_image(rng, 28, 28, 8));
  fs::path data = dir.path / "images.idx";
  save_idx(data.string(), images);

  int code = run_cli("verify --network " + spec.string() + " --dataset " + data.string() +
                     " --format idx --apx 1 --out " + (dir.path / "v").string());
  CHECK(code == 0);
}

TEST_CASE("missing files are configuration errors") {
  CHECK(run_cli("verify --network /nonexistent/net.json --random 1") == 2);
  CHECK(run_cli("run --network /nonexistent/net.json --dataset /nonexistent/x.idx") == 2);
  CHECK(run_cli("report --trace /nonexistent/trace.jsonl") == 2);
  CHECK(run_cli("bogus-subcommand") == 2);
}

TEST_CASE("same seed produces byte-identical artifacts") {
  TempDir dir("nslbp_cli_determinism");
  std::string base = "run --random 2 --seed 11 --mode simulate --out ";
  CHECK(run_cli(base + (dir.path / "a").string()) == 0);
  CHECK(run_cli(base + (dir.path / "b").string()) == 0);
  for (const char* name : {"scores.json", "ofmaps.json", "trace.jsonl", "report.json",
                           "report.csv"}) {
    CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
    CHECK_FALSE(slurp(dir.path / "a" / name).empty());
  }
}

TEST_CASE("compile emits plans and programs") {
  TempDir dir("nslbp_cli_compile");
  Rng rng(19);
  NetworkSpec net = make_random_network(rng);
  fs::path spec = dir.path / "net.json";
  save_network(spec.string(), net);
  CHECK(run_cli("compile --network " + spec.string() + " --out " + (dir.path / "c").string()) ==
        0);
  CHECK(fs::exists(dir.path / "c" / "compile_manifest.json"));
  CHECK(fs::exists(dir.path / "c" / "lbp0_plan.json"));
  CHECK(fs::exists(dir.path / "c" / "mlp0.asm"));
  std::string asm_text = slurp(dir.path / "c" / "mlp0.asm");
  CHECK(asm_text.find("carry") != std::string::npos);
}

TEST_CASE("reference and simulate modes produce identical scores") {
  TempDir dir("nslbp_cli_modes");
  Rng rng(23);
  NetworkSpec net = make_random_network(rng);
  fs::path spec = dir.path / "net.json";
  save_network(spec.string(), net);
  std::vector<RawImage> images;
  for (int i = 0; i < 3; ++i) images.push_back(make_random_image(rng, 28, 28, 8));
  fs::path data = dir.path / "images.idx";
  save_idx(data.string(), images);

  std::string common = " --network " + spec.string() + " --dataset " + data.string() +
                       " --format idx --apx 2 --out ";
  CHECK(run_cli("run --mode reference" + common + (dir.path / "ref").string()) == 0);
  CHECK(run_cli("run --mode simulate" + common + (dir.path / "sim").string()) == 0);
  CHECK(slurp(dir.path / "ref" / "scores.json") == slurp(dir.path / "sim" / "scores.json"));
  CHECK(slurp(dir.path / "ref" / "ofmaps.json") == slurp(dir.path / "sim" / "ofmaps.json"));
}

TEST_CASE("margin subcommand writes the sweep") {
  TempDir dir("nslbp_cli_margin");
  CHECK(run_cli("margin --trials 2000 --seed 5 --out " + (dir.path / "m").string()) == 0);
  std::string text = slurp(dir.path / "m" / "margin.json");
  CHECK(text.find("\"error_rate\"") != std::string::npos);
}
