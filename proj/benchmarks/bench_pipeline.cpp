#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "gsr/codegen.hpp"
#include "gsr/dsl.hpp"
#include "gsr/sim.hpp"
#include "gsr/validate.hpp"

namespace {

std::string slurp(const std::string& relative) {
  std::ifstream in(std::string(GSR_CORPUS_DIR) + "/" + relative, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string& two_robot_source() {
  static const std::string text = slurp("examples/two_robot_drop.gsr");
  return text;
}

gsr::Diagram two_robot() { return *gsr::parse(two_robot_source()).diagram; }

const gsr::BindingSet kBindings{{"leftRobotStart", std::string("L0")},
                                {"leftRobotGoal", std::string("L1")},
                                {"rightRobotStart", std::string("R0")},
                                {"rightRobotGoal", std::string("R1")}};

// A flat diagram with n waits chained by Start handlers, for scaling runs.
gsr::Diagram chain(int n) {
  gsr::Diagram d;
  d.name = "Chain";
  for (int i = 0; i < n; ++i) {
    const std::string id = "w" + std::to_string(i);
    d.commands.push_back(gsr::Command{gsr::WaitCommand{id, 2, {}}});
    d.states.push_back({id + "Done", id, gsr::StateKind::CommandCompleted, 0.0});
    if (i + 1 < n) {
      d.handlers.push_back({"", d.name, id + "Done", gsr::Trigger::Entered,
                            {gsr::EffectKind::Start, "w" + std::to_string(i + 1)}});
    }
  }
  d.starters.push_back({"entry", {"w0"}});
  return d;
}

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gsr::parse(two_robot_source()));
}
BENCHMARK(BM_Parse);

void BM_Validate(benchmark::State& state) {
  const auto d = two_robot();
  for (auto _ : state) benchmark::DoNotOptimize(gsr::validate(d, gsr::builtin_catalog()));
}
BENCHMARK(BM_Validate);

void BM_Compile(benchmark::State& state) {
  const auto d = two_robot();
  for (auto _ : state) benchmark::DoNotOptimize(gsr::compile(d, gsr::builtin_catalog()));
}
BENCHMARK(BM_Compile);

void BM_Generate(benchmark::State& state) {
  const auto d = two_robot();
  for (auto _ : state) benchmark::DoNotOptimize(gsr::generate(d, gsr::builtin_catalog()));
}
BENCHMARK(BM_Generate);

void BM_SimulateStuck(benchmark::State& state) {
  const auto tmpl = gsr::generate(two_robot(), gsr::builtin_catalog());
  const auto net = gsr::instantiate(tmpl, kBindings);
  const auto script = gsr::script_from_json(slurp("scripts/stuck.json"));
  for (auto _ : state) benchmark::DoNotOptimize(gsr::run(net, script));
}
BENCHMARK(BM_SimulateStuck);

void BM_SimulateChain(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto net = gsr::compile(chain(n), gsr::builtin_catalog());
  gsr::SensorScript script;
  script.ticks = 2 * n + 2;
  for (auto _ : state) benchmark::DoNotOptimize(gsr::run(net, script));
  state.SetComplexityN(n);
}
BENCHMARK(BM_SimulateChain)->RangeMultiplier(4)->Range(4, 256)->Complexity();

}  // namespace

BENCHMARK_MAIN();
