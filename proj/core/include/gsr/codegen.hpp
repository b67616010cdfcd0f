#pragma once

// Late-bound command templates: a net skeleton with slots for `$var`
// parameters, the bindings it needs, and a builder listing.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gsr/catalog.hpp"
#include "gsr/net.hpp"

namespace gsr {

class MissingBinding : public Error {
 public:
  explicit MissingBinding(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

class KindMismatch : public Error {
 public:
  KindMismatch(const std::string& variable, ValueKind expected, const Literal& given);
  const std::string& variable() const noexcept { return variable_; }
  ValueKind expected() const noexcept { return expected_; }

 private:
  std::string variable_;
  ValueKind expected_;
};

struct RequiredBinding {
  std::string name;
  ValueKind kind = ValueKind::String;
  bool operator==(const RequiredBinding&) const = default;
};

struct CommandTemplate {
  Net net_skeleton;
  std::vector<RequiredBinding> required_bindings;  // sorted by name
  std::string listing;
};

using BindingSet = std::map<std::string, Literal>;

/// Variables of a net, sorted by name, with the kind each slot expects.
std::vector<RequiredBinding> required_bindings(const Net& net);

/// Precondition: the diagram validates against `catalog`.
CommandTemplate generate(const Diagram& diagram, const Catalog& catalog);

/// Fills every slot. Throws MissingBinding naming all absent variables,
/// KindMismatch for a value of the wrong kind, or Error for a binding that
/// names no variable of the template.
Net instantiate(const CommandTemplate& tmpl, const BindingSet& bindings);

/// The diagram with each bound `$var` replaced by its constant.
Diagram substitute(const Diagram& diagram, const BindingSet& bindings);

/// Builder listing alone. Sections, in order: parameters, atomic states,
/// logical states, event effects, start.
std::string listing(const Diagram& diagram, const Catalog& catalog);

/// `template.json`: required_bindings and net_skeleton. The listing is kept
/// in a separate file and is not part of the document.
std::string template_to_json(const CommandTemplate& tmpl);
CommandTemplate template_from_json(std::string_view text);

/// Reads a command-line binding value (`true`, `12`, `0.5`, `"text"` or bare
/// text) as a literal of `kind`. Throws KindMismatch when it cannot.
Literal parse_binding_value(const std::string& variable, std::string_view text, ValueKind kind);

}  // namespace gsr
