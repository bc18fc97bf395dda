#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"
#include "support.hpp"

using namespace svcharme;
using namespace svcharme::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = SVCHARME_CONFIG_DIR;

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "svcharme");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const std::string& name, const Json& doc) {
  const fs::path path = dir / name;
  std::ofstream(path) << doc.dump(2);
  return path;
}

Json load(const fs::path& path) { return parse_json_text(read_file(path)); }

}  // namespace

TEST(Cli, VersionAndHelp) {
  EXPECT_EQ(invoke({"--version"}).code, 0);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"frobnicate", "x.json"}).code, cli::kExitUsage);
}

TEST(Cli, CheckReferencePasses) {
  const fs::path dir = scratch_dir("cli_check");
  const Invocation r = invoke({"--out", dir.string(), "check", (kConfigs / "reference.json").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const Json report = load(dir / "check_report.json");
  EXPECT_TRUE(report.at("pass").get<bool>());
  EXPECT_TRUE(fs::exists(dir / "check_manifest.json"));
}

TEST(Cli, CheckFailuresExitOne) {
  for (const char* name : {"explosive.json", "periodic.json", "student_t_iota4.json"}) {
    const fs::path dir = scratch_dir("cli_check_fail");
    const Invocation r = invoke({"--out", dir.string(), "check", (kConfigs / name).string()});
    EXPECT_EQ(r.code, cli::kExitFailed) << name << r.err;
    EXPECT_FALSE(load(dir / "check_report.json").at("pass").get<bool>()) << name;
  }
}

TEST(Cli, MalformedConfigsExitTwo) {
  const fs::path dir = scratch_dir("cli_bad");
  Json doc = load(kConfigs / "reference.json");
  doc["simulate"]["bogus"] = 1;
  Invocation r = invoke({"--out", dir.string(), "simulate", write_config(dir, "unknown.json", doc).string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("/simulate/bogus"), std::string::npos) << r.err;

  doc = load(kConfigs / "reference.json");
  doc["model"]["transition_matrix"] = Json::array({Json::array({0.5, 0.6}), Json::array({0.2, 0.8})});
  r = invoke({"--out", dir.string(), "check", write_config(dir, "rows.json", doc).string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("/model/transition_matrix"), std::string::npos) << r.err;

  std::ofstream(dir / "syntax.json") << "{ \"model\": ";
  r = invoke({"--out", dir.string(), "check", (dir / "syntax.json").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;

  r = invoke({"--out", dir.string(), "check", (dir / "missing.json").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
}

TEST(Cli, SimulateIsDeterministicAcrossThreadsAndReplay) {
  const fs::path a = scratch_dir("cli_sim_a");
  const fs::path b = scratch_dir("cli_sim_b");
  const fs::path c = scratch_dir("cli_sim_c");
  const std::string config = (kConfigs / "reference.json").string();
  ASSERT_EQ(invoke({"--out", a.string(), "--threads", "1", "simulate", config}).code, 0);
  ASSERT_EQ(invoke({"--out", b.string(), "--threads", "8", "simulate", config}).code, 0);
  ASSERT_EQ(invoke({"--out", c.string(), "simulate", (a / "simulate_manifest.json").string()}).code, 0);
  for (int r = 0; r < 4; ++r) {
    const std::string file = "path_r" + std::to_string(r) + ".csv";
    const std::string reference = read_file(a / file);
    ASSERT_FALSE(reference.empty());
    EXPECT_EQ(reference, read_file(b / file)) << file;
    EXPECT_EQ(reference, read_file(c / file)) << file;
  }
  EXPECT_NE(read_file(a / "path_r0.csv"), read_file(a / "path_r1.csv"));
  const Json ma = load(a / "simulate_manifest.json");
  const Json mc = load(c / "simulate_manifest.json");
  EXPECT_EQ(ma.at("config_hash"), mc.at("config_hash"));
  EXPECT_EQ(ma.at("seeds"), mc.at("seeds"));
}

TEST(Cli, SeedOverrideChangesOutputAndHash) {
  const fs::path a = scratch_dir("cli_seed_a");
  const fs::path b = scratch_dir("cli_seed_b");
  const std::string config = (kConfigs / "reference.json").string();
  ASSERT_EQ(invoke({"--out", a.string(), "simulate", config}).code, 0);
  ASSERT_EQ(invoke({"--out", b.string(), "--seed", "43", "simulate", config}).code, 0);
  EXPECT_NE(read_file(a / "path_r0.csv"), read_file(b / "path_r0.csv"));
  const Json mb = load(b / "simulate_manifest.json");
  EXPECT_NE(load(a / "simulate_manifest.json").at("config_hash"), mb.at("config_hash"));
  EXPECT_EQ(mb.at("config").at("simulate").at("seed"), 43);
}

TEST(Cli, SimulateRefusesFailingConfigUnlessForced) {
  const fs::path dir = scratch_dir("cli_explosive");
  const std::string config = (kConfigs / "explosive.json").string();
  EXPECT_EQ(invoke({"--out", dir.string(), "simulate", config}).code, cli::kExitFailed);
  EXPECT_FALSE(fs::exists(dir / "path_r0.csv"));
  const Invocation forced = invoke({"--out", dir.string(), "simulate", config, "--force"});
  EXPECT_EQ(forced.code, cli::kExitFailed);
  const Json manifest = load(dir / "simulate_manifest.json");
  EXPECT_TRUE(manifest.at("forced").get<bool>());
  EXPECT_GE(manifest.at("diverged_count").get<int>(), 95);
}

TEST(Cli, DensityOnZeroEntryConfig) {
  const fs::path dir = scratch_dir("cli_density");
  Json doc = load(kConfigs / "zero_entry.json");
  doc["density"]["u_grid"] = Json{{"min", -4}, {"max", 6}, {"points", 11}};
  doc["density"]["small_set"]["grid_points"] = 5;
  const Invocation r = invoke({"--out", dir.string(), "density", write_config(dir, "z.json", doc).string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const std::string csv = read_file(dir / "density.csv");
  EXPECT_NE(csv.find("u,density,fbar"), std::string::npos);
  const Json report = load(dir / "small_set_report.json");
  bool saw_unreachable = false;
  for (const Json& entry : report.at("entries")) {
    EXPECT_TRUE(entry.at("consistent").get<bool>());
    if (!entry.at("reachable").get<bool>()) {
      saw_unreachable = true;
      EXPECT_EQ(entry.at("minimum").get<double>(), 0.0);
    }
  }
  EXPECT_TRUE(saw_unreachable);
}
