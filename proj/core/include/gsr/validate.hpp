#pragma once

#include <vector>

#include "gsr/catalog.hpp"
#include "gsr/diagnostic.hpp"
#include "gsr/model.hpp"

namespace gsr {

/// Rule codes (stable):
///   V0  identifiers unique
///   V1  at least one command            V1b transaction without children (warning)
///   V2  at least one starter with a target
///   V3  runtime command has exactly one actuator and one action
///   V4  starter targets are top-level commands
///   V5  Start targets and auto-starts are children of their scope
///   V6  Stop/Cancel target the scope or a descendant; Raise targets a raised
///       state of the scope
///   V7  logical states: arity and acyclicity
///   V8  catalog compatibility of types and state kind/owner pairs
///   V9  parameters: known names, required present, kinds, factories resolve
///   V10 variable names unique
///   V11 every referenced id resolves
///   W1  command can never be started (warning)
///   W2  handler on a state that can never change (warning)
struct ValidationReport {
  std::vector<Diagnostic> diagnostics;

  bool is_valid() const { return !has_errors(diagnostics); }
  std::size_t count(std::string_view code) const;
};

/// Checks every well-formedness rule. Never throws for malformed diagrams;
/// `spans` locates diagnostics when the diagram came from source text.
ValidationReport validate(const Diagram& diagram, const Catalog& catalog,
                          const SourceMap& spans = SourceMap{});

/// Commands reachable from the starters through auto-starts and Start effects.
std::vector<std::string> reachable_commands(const Diagram& diagram);

}  // namespace gsr
