#pragma once

// Core domain types of the command model: diagrams, commands, states,
// event handlers and parameter bindings. Values only; no I/O, no execution.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gsr {

class Catalog;

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownEntity : public Error {
 public:
  explicit UnknownEntity(const std::string& id)
      : Error("unknown entity '" + id + "'"), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// A literal as written in a diagram. Frames and other opaque values are
/// strings.
using Literal = std::variant<bool, std::int64_t, double, std::string>;

/// Canonical text of a literal (strings quoted and escaped, reals always carry
/// a decimal point or exponent so they re-read as reals).
std::string format_literal(const Literal& value);
std::string quote_string(std::string_view text);

struct Parameter;

struct Constant {
  Literal value;
  bool operator==(const Constant&) const = default;
};

/// Late-bound value: must be supplied through a binding before the command
/// can be instantiated.
struct Variable {
  std::string name;
  bool operator==(const Variable&) const = default;
};

/// Catalog call `@receiver.function(args...)`; receiver empty for global and
/// type-level factories.
struct FactoryCall {
  std::string receiver;
  std::string function;
  std::vector<Parameter> args;
  bool operator==(const FactoryCall&) const;
};

using Binding = std::variant<Constant, FactoryCall, Variable>;

struct Parameter {
  std::string name;  // empty for positional factory arguments
  Binding binding;
  bool operator==(const Parameter&) const = default;
};

inline bool FactoryCall::operator==(const FactoryCall&) const = default;

std::string format_binding(const Binding& binding);

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

enum class StateKind {
  CommandStarted,
  CommandCompleted,
  CommandCancelled,
  ActionProgressAtLeast,
  SensorTrue,
  SensorGreater,
  SensorLess,
  ActuatorError,
  Raised,
};

std::string_view to_string(StateKind kind);
std::optional<StateKind> parse_state_kind(std::string_view text);
/// Kinds that take a numeric argument (percent or threshold).
bool has_argument(StateKind kind);

/// An atomic state nested in a command (or the diagram root). `owner` names
/// the command, action, actuator or sensor that provides it; for Raised it is
/// the scope command the state is declared in.
struct DeclaredState {
  std::string id;
  std::string owner;
  StateKind kind = StateKind::CommandCompleted;
  double argument = 0.0;  // percent for ActionProgressAtLeast, threshold for comparisons
  bool operator==(const DeclaredState&) const = default;
};

enum class LogicOp { And, Or, Not, Ever };

std::string_view to_string(LogicOp op);
std::optional<LogicOp> parse_logic_op(std::string_view text);

struct LogicalState {
  std::string id;
  LogicOp op = LogicOp::And;
  std::vector<std::string> inputs;
  bool operator==(const LogicalState&) const = default;
};

// ---------------------------------------------------------------------------
// Devices and commands
// ---------------------------------------------------------------------------

struct Sensor {
  std::string id;
  std::string sensor_type;
  std::string channel;
  bool operator==(const Sensor&) const = default;
};

struct Actuator {
  std::string id;
  std::string device_type;
  std::vector<Sensor> sensors;
  std::vector<Parameter> config;
  bool operator==(const Actuator&) const = default;
};

struct Action {
  std::string id;
  std::string action_type;
  std::vector<Parameter> params;
  bool operator==(const Action&) const = default;
};

struct Command;

/// Pairs one actuator with one action. Stored as lists so that malformed
/// input survives parsing and is rejected by validation instead.
struct RuntimeCommand {
  std::string id;
  std::vector<Actuator> actuators;
  std::vector<Action> actions;
  std::vector<DeclaredState> states;
  bool operator==(const RuntimeCommand&) const = default;
};

struct AutoStart {
  std::string child;
  std::optional<std::string> guard;
  bool operator==(const AutoStart&) const = default;
};

struct TransactionCommand {
  std::string id;
  std::vector<Command> children;
  std::vector<AutoStart> auto_start;
  std::vector<DeclaredState> states;
  bool operator==(const TransactionCommand&) const;
};

struct WaitCommand {
  std::string id;
  std::int64_t duration_ticks = 0;
  std::vector<DeclaredState> states;
  bool operator==(const WaitCommand&) const = default;
};

struct Command {
  std::variant<RuntimeCommand, TransactionCommand, WaitCommand> node;

  const std::string& id() const;
  const std::vector<DeclaredState>& states() const;
  std::vector<DeclaredState>& states();
  bool is_transaction() const { return std::holds_alternative<TransactionCommand>(node); }
  bool operator==(const Command&) const = default;
};

inline bool TransactionCommand::operator==(const TransactionCommand&) const = default;

// ---------------------------------------------------------------------------
// Scheduling
// ---------------------------------------------------------------------------

enum class Trigger { Entered, FirstEntered, Left, FirstLeft };
enum class EffectKind { Start, Stop, Cancel, Raise, External };

std::string_view to_string(Trigger trigger);
std::string_view to_string(EffectKind effect);
std::optional<Trigger> parse_trigger(std::string_view text);
std::optional<EffectKind> parse_effect(std::string_view text);
bool is_first(Trigger trigger);

struct Effect {
  EffectKind kind = EffectKind::Start;
  std::string target;  // command or raised-state id; the tag for External
  bool operator==(const Effect&) const = default;
};

struct EventHandler {
  std::string id;  // may be empty (anonymous handler)
  std::string scope;  // owning command id, or the diagram name for the root
  std::string source;  // state id
  Trigger trigger = Trigger::Entered;
  Effect effect;
  bool operator==(const EventHandler&) const = default;
};

/// Handler label used in traces and listings: its id, or `#<index>`.
std::string handler_label(const EventHandler& handler, std::size_t index);

struct Starter {
  std::string id;
  std::vector<std::string> targets;
  bool operator==(const Starter&) const = default;
};

/// Top level of a command specification; compiles to a root transaction
/// named after the diagram.
struct Diagram {
  std::string name;
  std::vector<Command> commands;
  std::vector<Starter> starters;
  std::vector<Sensor> top_sensors;
  std::vector<DeclaredState> states;  // root-scope states
  std::vector<EventHandler> handlers;
  std::vector<LogicalState> logical_states;
  bool operator==(const Diagram&) const = default;
};

// ---------------------------------------------------------------------------
// Lookup
// ---------------------------------------------------------------------------

enum class EntityCategory {
  Diagram,
  Command,
  Actuator,
  Action,
  Sensor,
  State,
  Logical,
  Handler,
  Starter,
};

std::string_view to_string(EntityCategory category);

struct EntityRef {
  EntityCategory category = EntityCategory::Diagram;
  const void* ptr = nullptr;
  std::string container;  // enclosing command id (diagram name at the root)
};

/// Id lookup over a diagram. Holds pointers into the diagram, which must
/// outlive the index. When ids collide the first declaration wins; the
/// collisions are listed in `duplicates()`.
class DiagramIndex {
 public:
  explicit DiagramIndex(const Diagram& diagram);

  const Diagram& diagram() const { return *diagram_; }
  const EntityRef* find(std::string_view id) const;
  const EntityRef& at(std::string_view id) const;  // throws UnknownEntity

  const Command* command(std::string_view id) const;
  const Actuator* actuator(std::string_view id) const;
  const Action* action(std::string_view id) const;
  const Sensor* sensor(std::string_view id) const;
  const DeclaredState* state(std::string_view id) const;
  const LogicalState* logical(std::string_view id) const;
  bool is_state(std::string_view id) const;  // declared or logical

  /// Parent command id; the diagram name for top-level commands; nullopt for
  /// the root or unknown ids.
  std::optional<std::string> parent(std::string_view command_id) const;
  bool is_root(std::string_view id) const { return id == diagram_->name; }
  /// True when `id` is `ancestor` or nested somewhere below it.
  bool is_descendant_or_self(std::string_view id, std::string_view ancestor) const;
  /// Ids of the direct children of a command (top-level commands for the root).
  std::vector<std::string> children(std::string_view command_id) const;

  /// Runtime command owning an actuator, action or sensor.
  std::optional<std::string> owning_command(std::string_view entity_id) const;
  /// Actuator a nested sensor belongs to.
  std::optional<std::string> sensor_actuator(std::string_view sensor_id) const;

  /// Commands in pre-order (declaration order, parents before children).
  const std::vector<const Command*>& commands_preorder() const { return preorder_; }
  /// Declared states in tree order: root states, then each command's states in
  /// command pre-order.
  const std::vector<const DeclaredState*>& declared_states() const { return declared_; }

  struct Duplicate {
    std::string id;
    EntityCategory first;
    EntityCategory second;
  };
  const std::vector<Duplicate>& duplicates() const { return duplicates_; }

 private:
  void add(const std::string& id, EntityCategory category, const void* ptr,
           const std::string& container);
  void walk(const Command& command, const std::string& parent);

  const Diagram* diagram_;
  std::map<std::string, EntityRef, std::less<>> entities_;
  std::map<std::string, std::string, std::less<>> parents_;
  std::map<std::string, std::string, std::less<>> sensor_actuators_;
  std::vector<const Command*> preorder_;
  std::vector<const DeclaredState*> declared_;
  std::vector<Duplicate> duplicates_;
};

/// One legal state that an entity makes available. `owner` is the entity the
/// state must be declared on; `via_factory` names the catalog factory that
/// would add a not-yet-declared sensor providing it.
struct ProvidedState {
  StateKind kind;
  std::optional<std::string> owner;
  std::optional<std::string> via_factory;
  bool operator==(const ProvidedState&) const = default;
};

/// State kinds admissible for an entity of the diagram, in a fixed order.
/// Throws UnknownEntity when `entity_id` does not resolve.
std::vector<ProvidedState> provided_states(const DiagramIndex& index, std::string_view entity_id,
                                           const Catalog& catalog);

/// nullopt when `state` may be declared on its owner; otherwise the reason.
std::optional<std::string> check_state_owner(const DiagramIndex& index, const DeclaredState& state,
                                             const Catalog& catalog);

/// Every Variable occurrence in the diagram, in traversal order, with the
/// `entity.param` path it occurs at.
struct VariableUse {
  std::string name;
  std::string path;
};
std::vector<VariableUse> variable_uses(const Diagram& diagram);

}  // namespace gsr
