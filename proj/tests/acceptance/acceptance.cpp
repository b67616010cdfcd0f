// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace gsr;
using namespace gsr::testing;

namespace {

struct Failed {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Failed{why};
}

const TickRecord* find_status(const Trace& trace, const std::string& command, Status status,
                              int* count = nullptr) {
  const TickRecord* first = nullptr;
  int n = 0;
  for (const auto& r : trace.records) {
    for (const auto& l : r.lifecycle) {
      if (l.command == command && l.status == status) {
        if (!first) first = &r;
        ++n;
      }
    }
  }
  if (count) *count = n;
  return first;
}

Trace trace_of(const std::string& diagram_file, const std::string& script_file,
               const std::map<std::string, std::string>& bindings = {}) {
  const auto diagram = load_diagram(corpus_path(diagram_file));
  auto tmpl = generate(diagram, builtin_catalog());
  const Net net = instantiate(tmpl, bind_text(tmpl.required_bindings, bindings));
  return run(net, script_from_json(read_file(corpus_path(script_file))));
}

std::size_t count_effects(const Trace& trace, EffectKind kind) {
  std::size_t n = 0;
  for (const auto& r : trace.records) {
    n += static_cast<std::size_t>(std::count_if(r.effects.begin(), r.effects.end(),
                                                [&](const EffectRecord& e) { return e.effect == kind; }));
  }
  return n;
}

const std::map<std::string, std::string> kTwoRobotBindings{
    {"leftRobotStart", "L0"}, {"leftRobotGoal", "L1"}, {"rightRobotStart", "R0"}, {"rightRobotGoal", "R1"}};

std::string criterion1() {
  const auto trace = trace_of("examples/listing1.gsr", "scripts/nominal.json");
  int n = 0;
  const auto* r = find_status(trace, "closeRT", Status::Running, &n);
  require(r != nullptr, "closeRT never ran");
  require(n == 1, "closeRT started " + std::to_string(n) + " times");
  require(r->tick == 30, "closeRT started at tick " + std::to_string(r->tick));
  return "closeRT -> Running once, at tick 30";
}

std::string criterion2() {
  const auto never = trace_of("examples/concept_screen_canvas.gsr", "scripts/torque_never.json");
  const auto* done = find_status(never, "ptpRT", Status::Completed);
  const auto* open = find_status(never, "open", Status::Running);
  require(done && open, "ptpRT or open missing from the torque_never trace");
  require(open->tick == done->tick, "open started at " + std::to_string(open->tick) + ", ptpRT completed at " +
                                        std::to_string(done->tick));

  const auto script = script_from_json(read_file(corpus_path("scripts/torque_at_20.json")));
  std::int64_t k = -1;
  for (std::int64_t t = 0; t < script.ticks && k < 0; ++t) {
    if (std::get<bool>(script.value_at("lbrLeft.torque", t))) k = t;
  }
  require(k >= 0 && k < done->tick, "torque script does not trip before completion");
  const auto tripped = trace_of("examples/concept_screen_canvas.gsr", "scripts/torque_at_20.json");
  int n = 0;
  const auto* early = find_status(tripped, "open", Status::Running, &n);
  require(early && early->tick == k && n == 1, "open did not start exactly once at tick " + std::to_string(k));
  return "open at " + std::to_string(done->tick) + " (completion) and at " + std::to_string(k) + " (torque)";
}

std::string criterion3() {
  for (const auto& run : golden_runs()) {
    if (run.diagram != "examples/two_robot_drop.gsr") continue;
    require(replay(run) == read_file(corpus_path(run.golden)), run.golden + " differs");
  }
  const auto nominal = trace_of("examples/two_robot_drop.gsr", "scripts/nominal.json", kTwoRobotBindings);
  const auto* left = find_status(nominal, "openLeft", Status::Running);
  const auto* right = find_status(nominal, "openRight", Status::Running);
  require(left && right && left == right, "gripper commands not Running in one record");
  require(count_effects(nominal, EffectKind::Stop) == 0, "nominal run has a Stop");
  require(nominal.end == EndReason::RootTerminal && nominal.root == Status::Completed, "nominal run did not complete");

  const auto spike = trace_of("examples/two_robot_drop.gsr", "scripts/early_spike.json", kTwoRobotBindings);
  require(count_effects(spike, EffectKind::Stop) == 0, "early spike run has a Stop");

  const auto stuck = trace_of("examples/two_robot_drop.gsr", "scripts/stuck.json", kTwoRobotBindings);
  const auto* opened = find_status(stuck, "openGrippers", Status::Completed);
  const auto* stopped = find_status(stuck, "moveParallel", Status::Stopped);
  require(opened && stopped && stopped->tick > opened->tick, "moveParallel not stopped after the grippers opened");
  require(find_status(stuck, "moveLeft", Status::Stopped) == stopped &&
              find_status(stuck, "moveRight", Status::Stopped) == stopped,
          "LIN children not stopped in the moveParallel record");
  return "3 goldens byte-equal; stuck run stops all three at tick " + std::to_string(stopped->tick);
}

std::string criterion4() {
  const auto& catalog = builtin_catalog();
  const auto diagram = load_diagram(corpus_path("examples/two_robot_drop.gsr"));
  const auto tmpl = generate(diagram, catalog);
  std::vector<std::string> names;
  for (const auto& r : tmpl.required_bindings) names.push_back(r.name);
  require(names == std::vector<std::string>{"leftRobotGoal", "leftRobotStart", "rightRobotGoal", "rightRobotStart"},
          "unexpected required_bindings");
  const auto all = bind_text(tmpl.required_bindings, kTwoRobotBindings);

  for (unsigned mask = 1; mask < (1u << names.size()); ++mask) {
    BindingSet partial;
    std::vector<std::string> absent;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (mask & (1u << i)) {
        absent.push_back(names[i]);
      } else {
        partial[names[i]] = all.at(names[i]);
      }
    }
    try {
      instantiate(tmpl, partial);
      require(false, "no MissingBinding with mask " + std::to_string(mask));
    } catch (const MissingBinding& e) {
      require(e.missing() == absent, "MissingBinding names the wrong variables");
    }
  }
  require(instantiate(tmpl, all) == compile(substitute(diagram, all), catalog),
          "instantiate differs from compile(substitute)");
  return "4 sorted bindings; 15 missing subsets named exactly; instantiate == compile(substitute)";
}

std::string criterion5() {
  std::size_t n = 0;
  for (const auto& name : corpus_files("examples", ".gsr")) {
    const auto text = listing(load_diagram(corpus_path("examples/" + name)), builtin_catalog());
    std::vector<std::size_t> at;
    for (const char* s : {"parameters", "atomic states", "logical states", "event effects", "start"}) {
      at.push_back(text.find("\nsection " + std::string(s) + "\n"));
      require(at.back() != std::string::npos, name + ": no section " + s);
    }
    require(std::is_sorted(at.begin(), at.end()), name + ": sections out of order");
    ++n;
  }
  return std::to_string(n) + " corpus listings in section order";
}

std::string criterion6() {
  std::mt19937 rng(6);
  std::size_t checked = 0;
  for (int i = 0; i < 200; ++i) {
    const auto c = random_logic_case(rng);
    const Net net = compile(c.diagram, builtin_catalog());
    const auto oracle = logic_oracle(c);
    Simulator sim(net, c.script, SimConfig{std::nullopt, false});
    for (const auto& row : oracle) {
      require(!sim.finished(), "run ended early in case " + std::to_string(i));
      const auto tick = sim.next_tick();
      sim.step();
      for (const auto& [id, expected] : row) {
        const bool actual = sim.activity().at(static_cast<std::size_t>(net.state_index(id)));
        require(actual == expected, "case " + std::to_string(i) + ", tick " + std::to_string(tick) + ": " + id);
        ++checked;
      }
    }
  }
  return "200 nets, " + std::to_string(checked) + " logical activities, 0 mismatches";
}

std::string criterion7() {
  std::mt19937 rng(7);
  std::size_t first_fires = 0, stops = 0, raises = 0;
  for (int i = 0; i < 500; ++i) {
    const auto c = random_effect_case(rng);
    const Net net = compile(c.diagram, builtin_catalog());
    const std::string where = "case " + std::to_string(i);
    std::map<std::string, bool> first;
    for (const auto& h : c.diagram.handlers) first[h.id] = is_first(h.trigger);
    std::map<std::string, int> fired;
    std::map<std::string, std::int64_t> raised_at;  // raised state -> last raise tick

    Simulator sim(net, c.script, SimConfig{60, true});
    while (!sim.finished()) {
      std::map<std::string, Status> before;
      for (std::size_t k = 0; k < net.lifecycle.size(); ++k) before[net.lifecycle[k].id] = sim.status(k).status;
      const auto record = sim.step();

      std::set<std::string> expected_stopped;
      for (const auto& e : record.effects) {
        if (first.at(e.handler)) {
          require(++fired[e.handler] <= 1, where + ": " + e.handler + " fired twice");
          ++first_fires;
        }
        if (e.effect == EffectKind::Stop) {
          ++stops;
          for (const auto& d : subtree(c.diagram, e.target)) {
            if (!is_terminal(before.at(d))) expected_stopped.insert(d);
          }
        }
      }
      std::set<std::string> stopped;
      for (const auto& l : record.lifecycle) {
        if (l.status == Status::Stopped) stopped.insert(l.command);
      }
      require(stopped == expected_stopped, where + ": Stop closure differs at tick " + std::to_string(record.tick));

      for (std::size_t s = 0; s < net.states.size(); ++s) {
        if (net.states[s].logical || net.states[s].kind != StateKind::Raised) continue;
        const auto& id = net.states[s].id;
        const bool expect = raised_at.count(id) && raised_at.at(id) == record.tick - 1;
        require(sim.activity()[s] == expect, where + ": " + id + " wrong at tick " + std::to_string(record.tick));
      }
      for (const auto& e : record.effects) {
        if (e.effect == EffectKind::Raise) {
          raised_at[e.target] = record.tick;
          ++raises;
        }
      }
    }
  }
  require(first_fires > 0 && stops > 0 && raises > 0, "generator exercised too few effects");

  std::size_t goldens = 0;
  for (const auto& run : golden_runs()) {
    const auto expected = read_file(corpus_path(run.golden));
    require(replay(run) == expected && replay(run) == expected, run.golden + " not reproduced twice");
    ++goldens;
  }
  std::ostringstream out;
  out << "500 runs (" << first_fires << " first fires, " << stops << " stops, " << raises << " raises); "
      << goldens << " goldens reproduced twice";
  return out.str();
}

std::string criterion8() {
  std::set<std::string> covered;
  for (const auto& name : corpus_files("fixtures", ".gsr")) {
    const auto path = corpus_path("fixtures/" + name);
    const auto expected = expected_code(path);
    const auto codes = error_codes(path);
    require(codes == std::set<std::string>{expected}, name + " does not report exactly " + expected);
    covered.insert(expected);
  }
  for (int v = 1; v <= 11; ++v) {
    require(covered.count("V" + std::to_string(v)) == 1, "no fixture for V" + std::to_string(v));
  }
  for (const char* name : {"listing1.gsr", "concept_screen_canvas.gsr", "two_robot_drop.gsr"}) {
    const auto path = corpus_path(std::string("examples/") + name);
    auto parsed = parse(read_file(path), path);
    require(parsed.ok(), std::string(name) + " does not parse");
    const auto report = validate(*parsed.diagram, builtin_catalog(), parsed.spans);
    require(report.diagnostics.empty(), std::string(name) + " has diagnostics");
  }
  return std::to_string(covered.size()) + " fixtures, one code each; scenarios validate clean";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"1 listing1 replay", criterion1},
      {"2 concept canvas OR start", criterion2},
      {"3 two-robot goldens", criterion3},
      {"4 binding contract", criterion4},
      {"5 listing section order", criterion5},
      {"6 logical-state oracle", criterion6},
      {"7 effect semantics", criterion7},
      {"8 validation corpus", criterion8},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    try {
      std::cout << "PASS criterion " << name << ": " << check() << "\n";
    } catch (const Failed& f) {
      ++failures;
      std::cout << "FAIL criterion " << name << ": " << f.why << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL criterion " << name << ": exception: " << e.what() << "\n";
    }
  }
  return failures == 0 ? 0 : 1;
}
