#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "evenlab/errors.hpp"
#include "evenlab_app/cli.hpp"
#include "evenlab_app/config.hpp"
#include "evenlab_app/experiments.hpp"
#include "evenlab_app/report.hpp"

using namespace evenlab;
using namespace evenlab::app;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("evenlab_app_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ignored;
    fs::remove_all(path_, ignored);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int cli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::vector<const char*> argv{"evenlab"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), err);
  if (err_text) *err_text = err.str();
  return code;
}

Json load(const std::string& p) { return Json::parse(slurp(p)); }

}  // namespace

TEST(Report, SeventeenDigits) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(3.0), "3");
  EXPECT_EQ(format_number(1.0 / 0.0), "null");
  EXPECT_EQ(format_number(std::nan("")), "null");
}

TEST(Report, RenderKeepsScalarArraysOnOneLine) {
  Json j;
  j["a"] = Json::array({1, 2.5, "x"});
  j["b"] = 0.1;
  EXPECT_EQ(render_json(j), "{\n  \"a\": [1, 2.5, \"x\"],\n  \"b\": 0.10000000000000001\n}");
  EXPECT_EQ(render_json(j, -1), "{\"a\":[1, 2.5, \"x\"],\"b\":0.10000000000000001}");
  EXPECT_EQ(Json::parse(render_json(j))["b"].get<double>(), 0.1);
}

TEST(Report, PlotTableRejectsNonSweepReports) {
  Json j;
  j["experiment"] = "mc-loss";
  EXPECT_THROW(emit_plot_table(j), ValidationError);
}

TEST(Report, WriteOutputIsAtomicAndReportsBadPaths) {
  TempDir dir;
  write_output(dir.file("r.json"), "abc");
  EXPECT_EQ(slurp(dir.file("r.json")), "abc");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++entries;
  EXPECT_EQ(entries, 1u);
  EXPECT_THROW(write_output(dir.file("missing/r.json"), "abc"), ValidationError);
}

TEST(Config, KindNamesRoundTrip) {
  for (ExperimentKind k : all_kinds()) EXPECT_EQ(parse_kind(to_string(k)), k);
  EXPECT_THROW(parse_kind("nope"), ValidationError);
  EXPECT_THROW(parse_format("xml"), ValidationError);
}

TEST(Config, ValidationNamesTheField) {
  ExperimentConfig cfg;
  cfg.trials = 0;
  try {
    validate_config(cfg);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("config.trials"), std::string::npos);
  }
  cfg = ExperimentConfig{};
  cfg.scheme = "lecun";
  EXPECT_THROW(validate_config(cfg), ValidationError);
  cfg = ExperimentConfig{};
  cfg.widths = {4, 0, 1};
  EXPECT_THROW(validate_config(cfg), ValidationError);
  cfg = ExperimentConfig{};
  cfg.targets = "zeros";
  EXPECT_THROW(validate_config(cfg), ValidationError);
  cfg = ExperimentConfig{};
  cfg.rho = 1.5;
  EXPECT_THROW(validate_config(cfg), ValidationError);
}

TEST(Experiments, InputPresets) {
  EXPECT_EQ(parse_input("ones", 3, 2.0), Vector::Constant(3, 2.0));
  Vector ramp(4);
  ramp << 0.25, 0.5, 0.75, 1.0;
  EXPECT_EQ(parse_input("ramp", 4, 1.0), ramp);
  Vector alt(3);
  alt << 1, -1, 1;
  EXPECT_EQ(parse_input("alternating", 3, 1.0), alt);
  Vector e1 = Vector::Zero(3);
  e1(0) = 0.5;
  EXPECT_EQ(parse_input("e1", 3, 0.5), e1);
  Vector list(2);
  list << 0.5, -0.25;
  EXPECT_EQ(parse_input("0.5,-0.25", 2, 1.0), list);
  EXPECT_THROW(parse_input("0.5", 2, 1.0), ValidationError);
  EXPECT_THROW(parse_input("0.5,abc", 2, 1.0), ValidationError);
}

TEST(Experiments, RealizableTargetsAreFitExactly) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::Landscape;
  cfg.widths = {3, 2, 3};
  cfg.targets = "realizable";
  cfg.starts = 3;
  const RunResult r = run_experiment(cfg);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.report["oracle"]["min_loss"].get<double>(), 1e-20);
}

TEST(Experiments, DepthSweepTable) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::DepthSweep;
  cfg.widths = {8, 8, 1};
  cfg.trials = 20'000;
  const RunResult r = run_experiment(cfg);
  const std::string csv = emit_plot_table(r.report);
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "experiment,H,p_hat,ci_lo,ci_hi,target,ratio,ratio_ci_lo,ratio_ci_hi");
  EXPECT_EQ(lines[1].substr(0, 14), "depth-sweep,1,");
  EXPECT_EQ(lines[1].substr(lines[1].size() - 3), ",,,");  // no ratio at the first depth
  EXPECT_EQ(lines[4].substr(0, 14), "depth-sweep,4,");
}

TEST(Cli, ExitCodes) {
  std::string err;
  EXPECT_EQ(cli({"--help"}), kExitPass);
  EXPECT_EQ(cli({"path-prob", "--bogus"}, &err), kExitUsage);
  EXPECT_EQ(cli({}, &err), kExitUsage);
  EXPECT_NE(err.find("no experiment"), std::string::npos);
  EXPECT_EQ(cli({"path-prob", "--widths", "4,0,1"}, &err), kExitUsage);
  EXPECT_EQ(cli({"path-prob", "--widths", "4,4,4,1", "--path", "0,9,0", "--trials", "2000"}, &err), kExitUsage);
  EXPECT_NE(err.find("structural"), std::string::npos);
  EXPECT_EQ(cli({"mc-loss", "--widths", "101,100,100,1", "--trials", "2000"}, &err), kExitCapacity);
  EXPECT_EQ(cli({"mc-loss", "--trials", "2000", "--format", "csv"}, &err), kExitUsage);

  TempDir dir;
  // narrow nets under extreme clamps sit far from 1/4: a verdict failure
  EXPECT_EQ(cli({"cond-weights", "--widths", "4,4,4,1", "--trials", "10000", "--compare-width", "0", "--out",
                 dir.file("c.json")}),
            kExitVerdictFail);
  EXPECT_FALSE(load(dir.file("c.json"))["pass"].get<bool>());
}

TEST(Cli, FlagBeatsFileBeatsDefault) {
  TempDir dir;
  {
    std::ofstream f(dir.file("run.toml"));
    f << "experiment = \"path-prob\"\ntrials = 3000\nseed = 5\nwidths = [6, 6, 1]\n";
  }
  ASSERT_EQ(cli({"--config", dir.file("run.toml"), "--seed", "9", "--out", dir.file("r.json")}), kExitPass);
  const Json cfg = load(dir.file("r.json"))["config"];
  EXPECT_EQ(cfg["experiment"], "path-prob");
  EXPECT_EQ(cfg["trials"], 3000);  // file
  EXPECT_EQ(cfg["seed"], 9);       // flag
  EXPECT_EQ(cfg["widths"], Json::array({6, 6, 1}));
  EXPECT_EQ(cfg["z"], 4);  // default

  // a subcommand wins over the file's experiment key
  ASSERT_EQ(cli({"depth-sweep", "--config", dir.file("run.toml"), "--h-max", "2", "--out", dir.file("d.json")}),
            kExitPass);
  EXPECT_EQ(load(dir.file("d.json"))["experiment"], "depth-sweep");
}

TEST(Cli, ReportsAreByteIdenticalAndConfigsRoundTrip) {
  TempDir dir;
  const std::vector<std::string> base = {"path-prob", "--widths", "5,5,5,1", "--trials", "4000", "--seed", "3"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
  };
  ASSERT_EQ(cli(with({"--out", dir.file("a.json")})), kExitPass);
  ASSERT_EQ(cli(with({"--out", dir.file("b.json")})), kExitPass);
  EXPECT_EQ(slurp(dir.file("a.json")), slurp(dir.file("b.json")));

  ASSERT_EQ(cli(with({"--save-config", dir.file("a.toml")})), kExitPass);
  ASSERT_EQ(cli({"--config", dir.file("a.toml"), "--out", dir.file("c.json")}), kExitPass);
  EXPECT_EQ(slurp(dir.file("a.json")), slurp(dir.file("c.json")));

  // a different seed must change the estimate
  ASSERT_EQ(cli({"path-prob", "--widths", "5,5,5,1", "--trials", "4000", "--seed", "4", "--out",
                 dir.file("d.json")}),
            kExitPass);
  EXPECT_NE(load(dir.file("a.json"))["rows"][0]["successes"], load(dir.file("d.json"))["rows"][0]["successes"]);
}

TEST(Cli, WallTimeIsOptIn) {
  TempDir dir;
  ASSERT_EQ(cli({"intervals", "--containment-max", "10", "--out", dir.file("a.json")}), kExitPass);
  EXPECT_FALSE(load(dir.file("a.json")).contains("wall_time_seconds"));
  ASSERT_EQ(cli({"intervals", "--containment-max", "10", "--record-wall-time", "--out", dir.file("b.json")}),
            kExitPass);
  EXPECT_TRUE(load(dir.file("b.json")).contains("wall_time_seconds"));
}
