#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "tvrls");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = tvrls::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tvrls_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "cfg.json";
  std::ofstream(p) << body;
  return p;
}

const char* small_cfg =
    R"({"n":6,"p":2,"seed":3,"schedule":{"kind":"fading","mu":0.9,"k_cut":9,"j_cut":1},)"
    R"("data":{"mode":"pe","steps":25},"trials":1})";

TEST(Cli, RunWritesTracesAndMeta) {
  const fs::path dir = scratch("run");
  const fs::path cfg = write_config(dir, small_cfg);
  const Result r = invoke({"run", "--config", cfg.string(), "--out", (dir / "o").string(),
                           "--svg", "--set", "schedule.mu=0.95"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("fr: final_error="), std::string::npos);
  EXPECT_NE(r.out.find("k_rank=2"), std::string::npos);
  for (const char* f : {"trace_classical.csv", "trace_fr.csv", "trace_r1fr.csv", "trace.svg",
                        "meta.json"}) {
    EXPECT_TRUE(fs::exists(dir / "o" / f)) << f;
  }
  const auto meta = nlohmann::json::parse(read_file(dir / "o" / "meta.json"));
  EXPECT_EQ(meta["config"]["schedule"]["mu"], 0.95);
  EXPECT_EQ(meta["seed"], 3);
  EXPECT_TRUE(meta.contains("version"));
  EXPECT_TRUE(meta.contains("wall_time_s"));
  EXPECT_EQ(meta["overrides"][0], "schedule.mu=0.95");
}

TEST(Cli, MetaReproducesCsv) {
  const fs::path dir = scratch("meta");
  const fs::path cfg = write_config(dir, small_cfg);
  ASSERT_EQ(invoke({"run", "--config", cfg.string(), "--out", (dir / "a").string()}).code, 0);
  ASSERT_EQ(invoke({"run", "--config", (dir / "a" / "meta.json").string(), "--out",
                    (dir / "b").string()})
                .code,
            0);
  auto strip = [](const std::string& s) {
    std::stringstream in(s), out;
    std::string line;
    while (std::getline(in, line)) out << line.substr(0, line.rfind(',')) << '\n';
    return out.str();
  };
  EXPECT_EQ(strip(read_file(dir / "a" / "trace_fr.csv")),
            strip(read_file(dir / "b" / "trace_fr.csv")));
}

TEST(Cli, MonteCarloRun) {
  const fs::path dir = scratch("mc");
  const fs::path cfg = write_config(dir, small_cfg);
  const Result r = invoke({"run", "--config", cfg.string(), "--out", dir.string(), "--set",
                           "trials=5", "--set", "data.noise_std=1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(dir / "mc_r1fr.csv").substr(0, 18), "k,mean,ci_lo,ci_hi");
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("codes");
  Result r = invoke({"run", "--config", (dir / "missing.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing.json"), std::string::npos);

  const fs::path cfg = write_config(dir, small_cfg);
  EXPECT_EQ(invoke({"run", "--config", cfg.string(), "--set", "schedule.mu=2"}).code, 1);
  EXPECT_EQ(invoke({"run", "--config", cfg.string(), "--set", "nope=2"}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);

  // Regularization cut before the data reaches full rank.
  r = invoke({"run", "--config", cfg.string(), "--out", (dir / "np").string(), "--set",
              "schedule.k_cut=1", "--set", "estimators=[\"fr\"]"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("step 1"), std::string::npos) << r.err;

  EXPECT_EQ(invoke({"run", "--config", cfg.string(), "--out", "/proc/forbidden"}).code, 3);
}

TEST(Cli, ValidateConfigAgreesWithRunners) {
  const fs::path dir = scratch("validate");
  const fs::path cfg = write_config(dir, small_cfg);
  EXPECT_EQ(invoke({"validate-config", "--config", cfg.string()}).code, 0);
  for (const char* bad : {"n=0", "schedule.mu=1.5", "trials=0", "data.mode=\"x\"", "extra=1"}) {
    const int v = invoke({"validate-config", "--config", cfg.string(), "--set", bad}).code;
    const int run = invoke({"run", "--config", cfg.string(), "--out", (dir / "o").string(),
                            "--set", bad})
                        .code;
    EXPECT_EQ(v, 1) << bad;
    EXPECT_EQ(run, 1) << bad;
  }
}

TEST(Cli, Example1Desk) {
  const fs::path dir = scratch("ex1");
  const Result r = invoke({"example1", "--scale", "desk", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t csvs = 0, svgs = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    csvs += e.path().extension() == ".csv";
    svgs += e.path().extension() == ".svg";
  }
  EXPECT_EQ(csvs, 6u);
  EXPECT_EQ(svgs, 1u);
}

TEST(Cli, Example2Desk) {
  const fs::path dir = scratch("ex2");
  const Result r =
      invoke({"example2", "--scale", "desk", "--out", dir.string(), "--set", "trials=10"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* tag : {"0.01", "1", "100"}) {
    const std::string svg = read_file(dir / ("example2_r0_" + std::string(tag) + ".svg"));
    EXPECT_NE(svg.find("<polygon"), std::string::npos) << tag;
  }
}

TEST(Cli, BenchDesk) {
  const fs::path dir = scratch("bench");
  const Result r = invoke({"bench", "--out", dir.string(), "--set", "n=30", "--set",
                           "data.steps=80", "--set", "schedule.k_cut=25"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "timing.csv"));
  EXPECT_TRUE(fs::exists(dir / "timing.svg"));
  const auto meta = nlohmann::json::parse(read_file(dir / "meta.json"));
  EXPECT_EQ(meta["machine_dependent"], true);
}

}  // namespace
