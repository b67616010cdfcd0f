#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>

#include "support.hpp"

using namespace gsr;
using namespace gsr::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("gsr_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result gsr(const std::string& args, const std::string& env = "") {
    const auto err = (dir_ / "stderr").string();
    const std::string cmd = env + " " GSR_CLI " " + args + " 2>" + err;
    Result r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.err = read_file(err);
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string corpus(const std::string& rel) { return corpus_path(rel); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CheckValid) {
  const auto r = gsr("check " + corpus("examples/listing1.gsr"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.err, "");
}

TEST_F(Cli, CheckFixtureReportsCode) {
  const auto r = gsr("check " + corpus("fixtures/v05_start_not_child.gsr"));
  EXPECT_EQ(r.status, 1);
  EXPECT_EQ(r.err.rfind("V5:", 0), 0u) << r.err;
}

TEST_F(Cli, CheckJson) {
  const auto r = gsr("--format json check " + corpus("fixtures/v07_logical_arity.gsr"));
  EXPECT_EQ(r.status, 1);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j.at("valid").get<bool>());
  EXPECT_EQ(j.at("diagnostics").at(0).at("code"), "V7");
  EXPECT_EQ(j.at("diagnostics").at(0).at("line"), 7);
}

TEST_F(Cli, UsageAndIoErrors) {
  EXPECT_EQ(gsr("").status, 2);
  EXPECT_EQ(gsr("frobnicate").status, 2);
  EXPECT_EQ(gsr("check " + path("absent.gsr")).status, 2);
  EXPECT_EQ(gsr("sim --script " + corpus("scripts/nominal.json")).status, 2);
  EXPECT_EQ(gsr("--help").status, 0);
}

TEST_F(Cli, FmtIsCanonical) {
  const auto file = corpus("examples/guarded_approach.gsr");
  const auto r = gsr("fmt " + file);
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, print(load_diagram(file)));
}

TEST_F(Cli, CompileMatchesLibrary) {
  const auto file = corpus("examples/two_robot_drop.gsr");
  EXPECT_EQ(gsr("compile " + file + " -o " + path("net.json")).status, 0);
  EXPECT_EQ(read_file(path("net.json")), net_to_json(compile(load_diagram(file), builtin_catalog())));
}

TEST_F(Cli, SimReproducesGoldensByteForByte) {
  for (const auto& run : golden_runs()) {
    SCOPED_TRACE(run.golden);
    std::string args = "sim --diagram " + corpus(run.diagram) + " --script " + corpus(run.script);
    for (const auto& [k, v] : run.bindings) args += " --bind " + k + "=" + v;
    const auto first = gsr(args);
    const auto second = gsr(args);
    EXPECT_EQ(first.status, 0) << first.err;
    EXPECT_EQ(first.out, read_file(corpus(run.golden)));
    EXPECT_EQ(second.out, first.out);
  }
}

TEST_F(Cli, SimFromCompiledNet) {
  ASSERT_EQ(gsr("compile " + corpus("examples/listing1.gsr") + " -o " + path("n.json")).status, 0);
  const auto r = gsr("sim --net " + path("n.json") + " --script " + corpus("scripts/nominal.json") + " --trace " +
                     path("t.jsonl"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(read_file(path("t.jsonl")), read_file(corpus("golden/listing1.nominal.jsonl")));
}

TEST_F(Cli, SimDomainErrors) {
  const auto missing = gsr("sim --diagram " + corpus("examples/two_robot_drop.gsr") + " --script " +
                           corpus("scripts/nominal.json"));
  EXPECT_EQ(missing.status, 1);
  EXPECT_EQ(missing.err.rfind("MissingBinding:", 0), 0u) << missing.err;

  const auto channel = gsr("sim --diagram " + corpus("examples/guarded_approach.gsr") + " --script " +
                           corpus("scripts/nominal.json"));
  EXPECT_EQ(channel.status, 1);
  EXPECT_EQ(channel.err.rfind("MissingChannel:", 0), 0u) << channel.err;
}

TEST_F(Cli, SimMaxTicks) {
  const auto r = gsr("sim --diagram " + corpus("examples/listing1.gsr") + " --script " +
                     corpus("scripts/nominal.json") + " --max-ticks 10");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("{\"end\":\"max_ticks\",\"tick\":9,\"root\":\"Running\"}"), std::string::npos) << r.out;
}

TEST_F(Cli, GenThenInstantiate) {
  const auto file = corpus("examples/two_robot_drop.gsr");
  ASSERT_EQ(gsr("gen " + file + " -o " + path("out")).status, 0);
  const auto d = load_diagram(file);
  EXPECT_EQ(read_file(path("out/listing.txt")), listing(d, builtin_catalog()));

  const auto partial = gsr("instantiate --template " + path("out/template.json") + " --bind leftRobotGoal=G");
  EXPECT_EQ(partial.status, 1);
  EXPECT_NE(partial.err.find("leftRobotStart, rightRobotGoal, rightRobotStart"), std::string::npos) << partial.err;

  const auto full = gsr("instantiate --template " + path("out/template.json") +
                        " --bind leftRobotGoal=a --bind leftRobotStart=b --bind rightRobotGoal=c"
                        " --bind rightRobotStart=d");
  EXPECT_EQ(full.status, 0) << full.err;
  const BindingSet b{{"leftRobotGoal", std::string("a")},
                     {"leftRobotStart", std::string("b")},
                     {"rightRobotGoal", std::string("c")},
                     {"rightRobotStart", std::string("d")}};
  EXPECT_EQ(full.out, net_to_json(compile(substitute(d, b), builtin_catalog())));

  EXPECT_EQ(gsr("instantiate --template " + path("out/template.json") + " --bind nobody=1").status, 1);
  EXPECT_EQ(gsr("instantiate --template " + path("out/template.json") + " --bind =1").status, 2);
}

TEST_F(Cli, Suggest) {
  const auto r = gsr("suggest --kind frame " + corpus("examples/listing1.gsr"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "1 lwr.getHomePosition()\n2 LWR.origin()\n3 frame(string)\n");
  EXPECT_EQ(gsr("suggest --kind colour " + corpus("examples/listing1.gsr")).status, 2);
}

TEST_F(Cli, CatalogFromEnvironment) {
  {
    std::FILE* f = std::fopen(path("empty.json").c_str(), "w");
    std::fputs("{}", f);
    std::fclose(f);
  }
  const auto file = corpus("examples/listing1.gsr");
  EXPECT_EQ(gsr("check " + file, "GSR_CATALOG=" + path("empty.json")).status, 1);
  EXPECT_EQ(gsr("--catalog " + path("empty.json") + " check " + file).status, 1);
  {
    std::FILE* f = std::fopen(path("bad.json").c_str(), "w");
    std::fputs(R"({"device_types": 3})", f);
    std::fclose(f);
  }
  const auto bad = gsr("--catalog " + path("bad.json") + " check " + file);
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.err.find("/device_types"), std::string::npos);
}
