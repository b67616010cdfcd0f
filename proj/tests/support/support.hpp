#pragma once

// Helpers shared by the unit tests and the acceptance runner: corpus access,
// golden replay, and seeded generators of random diagrams with their oracles.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gsr/codegen.hpp"
#include "gsr/dsl.hpp"
#include "gsr/sim.hpp"
#include "gsr/validate.hpp"

namespace gsr::testing {

std::string corpus_path(const std::string& relative);
std::string read_file(const std::string& path);

/// Parses a file, throwing gsr::Error with the diagnostics when it fails.
Diagram load_diagram(const std::string& path);

/// Sorted file names (not paths) of the corpus directory `sub` ending in `ext`.
std::vector<std::string> corpus_files(const std::string& sub, const std::string& ext);

/// Error codes reported for a fixture (parse codes when parsing fails).
std::set<std::string> error_codes(const std::string& path);
/// Code named on the fixture's `// expect: X` first line.
std::string expected_code(const std::string& path);

struct GoldenRun {
  std::string diagram;  // paths relative to the corpus root
  std::string script;
  std::map<std::string, std::string> bindings;
  std::string golden;
};

std::vector<GoldenRun> golden_runs();

/// Compiles, binds and simulates one manifest entry; returns the JSONL trace.
std::string replay(const GoldenRun& run);

/// Binds textual values through parse_binding_value.
BindingSet bind_text(const std::vector<RequiredBinding>& required,
                     const std::map<std::string, std::string>& values);

// ---------------------------------------------------------------------------
// Logical-state nets
// ---------------------------------------------------------------------------

/// Bool inputs feeding up to three logical operators, kept alive by a long
/// wait so every tick of the script is simulated.
struct LogicCase {
  Diagram diagram;
  SensorScript script;
  std::vector<std::string> inputs;  // SensorTrue state ids, channel "in.<i>"
};

LogicCase random_logic_case(std::mt19937& rng);

/// Truth-table/latch evaluation of every logical state, computed straight
/// from the script. Result[tick][logical id].
std::vector<std::map<std::string, bool>> logic_oracle(const LogicCase& c);

// ---------------------------------------------------------------------------
// Handler nets
// ---------------------------------------------------------------------------

/// A random but valid command tree with command states, bool sensors,
/// logical states and handlers of every effect kind.
struct EffectCase {
  Diagram diagram;
  SensorScript script;
};

EffectCase random_effect_case(std::mt19937& rng);

/// `command` and every command nested below it, found by walking the
/// diagram tree. The diagram name stands for the root.
std::set<std::string> subtree(const Diagram& diagram, const std::string& command);

}  // namespace gsr::testing
