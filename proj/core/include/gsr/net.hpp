#pragma once

// Flattened executable form of a diagram: one lifecycle node per command plus
// the synthetic root, one state node per state in evaluation order, and the
// resolved handler table.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gsr/catalog.hpp"
#include "gsr/model.hpp"

namespace gsr {

class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> cycle);
  const std::vector<std::string>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class UnboundFactory : public Error {
 public:
  UnboundFactory(const std::string& path, const std::string& function);
};

struct NetValue;

/// Placeholder left where a diagram has a `$var` parameter.
struct Slot {
  std::string name;
  ValueKind kind = ValueKind::String;
  bool operator==(const Slot&) const = default;
};

/// Resolved catalog factory call; evaluated by the runtime, opaque here.
struct Call {
  std::string receiver;
  std::string function;
  ValueKind returns = ValueKind::String;
  std::vector<NetValue> args;
  bool operator==(const Call&) const;
};

struct NetValue {
  std::variant<Literal, Slot, Call> value;

  bool is_concrete() const;  // no Slot anywhere inside
  std::string text() const;  // `12`, `"a"`, `$goal`, `@lwr.origin()`
  bool operator==(const NetValue&) const = default;
};

inline bool Call::operator==(const Call&) const = default;

struct NamedValue {
  std::string name;
  NetValue value;
  bool operator==(const NamedValue&) const = default;
};

enum class NodeKind { Transaction, Runtime, Wait };
std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);

struct NetAutoStart {
  int child = -1;  // lifecycle index
  int guard = -1;  // state index, -1 when unguarded
  bool operator==(const NetAutoStart&) const = default;
};

struct NetOutput {
  NetValue channel;
  NetValue value;
  bool operator==(const NetOutput&) const = default;
};

struct LifecycleNode {
  std::string id;
  NodeKind kind = NodeKind::Transaction;
  int parent = -1;  // -1 for the root
  std::vector<int> children;
  std::vector<NetAutoStart> auto_start;

  // Runtime commands only.
  std::string actuator;
  std::string device_type;
  std::string action;
  std::string action_type;
  std::vector<NamedValue> config;  // actuator configuration
  std::vector<NamedValue> params;  // action parameters, catalog defaults filled in
  std::optional<NetOutput> output;  // written when the action completes

  // Runtime and wait commands: duration in ticks (0 = instantaneous) and the
  // braking time after a cancel request.
  NetValue duration{Literal{std::int64_t{0}}};
  NetValue brake{Literal{std::int64_t{0}}};

  bool operator==(const LifecycleNode&) const = default;
};

struct StateNode {
  std::string id;
  bool logical = false;
  bool declared = true;  // false for materialized command states

  // Atomic states.
  StateKind kind = StateKind::CommandCompleted;
  double argument = 0.0;
  int command = -1;  // lifecycle index for command, progress and raised states
  std::string channel;  // input channel for sensor and actuator-error states

  // Logical states.
  LogicOp op = LogicOp::And;
  std::vector<int> inputs;  // state indices, all smaller than this node's index

  bool operator==(const StateNode&) const = default;
};

struct NetHandler {
  std::string label;  // id or `#<index>`
  int scope = -1;  // lifecycle index
  int source = -1;  // state index
  Trigger trigger = Trigger::Entered;
  EffectKind effect = EffectKind::Start;
  int target = -1;  // lifecycle index (Start/Stop/Cancel) or state index (Raise)
  std::string tag;  // External only
  bool operator==(const NetHandler&) const = default;
};

enum class ChannelDirection { Input, Output };

struct Channel {
  std::string name;
  ChannelDirection direction = ChannelDirection::Input;
  ValueKind kind = ValueKind::Bool;  // Bool or Real
  bool operator==(const Channel&) const = default;
};

struct Net {
  std::string name;
  std::vector<LifecycleNode> lifecycle;  // pre-order, root at index 0
  std::vector<StateNode> states;  // evaluation order
  std::vector<NetHandler> handlers;  // declaration order
  std::vector<int> start_set;  // lifecycle indices started with the root
  std::vector<Channel> channels;  // sorted by name, unique

  int lifecycle_index(std::string_view id) const;  // -1 when absent
  int state_index(std::string_view id) const;
  /// True when no Slot remains (required before simulation).
  bool is_concrete() const;
  bool operator==(const Net&) const = default;
};

/// Flattens a valid diagram. Throws CycleError or UnboundFactory on input that
/// validation would have rejected.
Net compile(const Diagram& diagram, const Catalog& catalog);

/// Checks that every index inside the net is in range and that logical
/// inputs precede their readers. Throws Error describing the first problem.
void check_net(const Net& net);

/// Ids of the state nodes in evaluation order.
std::vector<std::string> evaluation_order(const Net& net);

/// Recomputes `channels` from the lifecycle and state nodes; used after slots
/// are filled in.
void derive_channels(Net& net);

/// Canonical JSON text (stable key order, two-space indent, trailing newline).
std::string net_to_json(const Net& net);
/// Throws Error on malformed documents.
Net net_from_json(std::string_view text);

}  // namespace gsr
