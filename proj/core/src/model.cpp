#include "gsr/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <functional>

#include "gsr/catalog.hpp"

namespace gsr {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<std::string_view, Enum>, N>& table,
                           std::string_view text) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, Enum>, N>& table,
                         Enum value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::array<std::pair<std::string_view, StateKind>, 9> kStateKinds{{
    {"CommandStarted", StateKind::CommandStarted},
    {"CommandCompleted", StateKind::CommandCompleted},
    {"CommandCancelled", StateKind::CommandCancelled},
    {"ActionProgressAtLeast", StateKind::ActionProgressAtLeast},
    {"SensorTrue", StateKind::SensorTrue},
    {"SensorGreater", StateKind::SensorGreater},
    {"SensorLess", StateKind::SensorLess},
    {"ActuatorError", StateKind::ActuatorError},
    {"Raised", StateKind::Raised},
}};

constexpr std::array<std::pair<std::string_view, LogicOp>, 4> kLogicOps{{
    {"and", LogicOp::And},
    {"or", LogicOp::Or},
    {"not", LogicOp::Not},
    {"ever", LogicOp::Ever},
}};

constexpr std::array<std::pair<std::string_view, Trigger>, 4> kTriggers{{
    {"entered", Trigger::Entered},
    {"first_entered", Trigger::FirstEntered},
    {"left", Trigger::Left},
    {"first_left", Trigger::FirstLeft},
}};

constexpr std::array<std::pair<std::string_view, EffectKind>, 5> kEffects{{
    {"start", EffectKind::Start},
    {"stop", EffectKind::Stop},
    {"cancel", EffectKind::Cancel},
    {"raise", EffectKind::Raise},
    {"external", EffectKind::External},
}};

constexpr std::array<std::pair<std::string_view, EntityCategory>, 9> kCategories{{
    {"diagram", EntityCategory::Diagram},
    {"command", EntityCategory::Command},
    {"actuator", EntityCategory::Actuator},
    {"action", EntityCategory::Action},
    {"sensor", EntityCategory::Sensor},
    {"state", EntityCategory::State},
    {"logical state", EntityCategory::Logical},
    {"handler", EntityCategory::Handler},
    {"starter", EntityCategory::Starter},
}};

}  // namespace

std::string_view to_string(StateKind kind) { return name_of(kStateKinds, kind); }
std::optional<StateKind> parse_state_kind(std::string_view text) { return lookup(kStateKinds, text); }
bool has_argument(StateKind kind) {
  return kind == StateKind::ActionProgressAtLeast || kind == StateKind::SensorGreater ||
         kind == StateKind::SensorLess;
}

std::string_view to_string(LogicOp op) { return name_of(kLogicOps, op); }
std::optional<LogicOp> parse_logic_op(std::string_view text) { return lookup(kLogicOps, text); }

std::string_view to_string(Trigger trigger) { return name_of(kTriggers, trigger); }
std::string_view to_string(EffectKind effect) { return name_of(kEffects, effect); }
std::optional<Trigger> parse_trigger(std::string_view text) { return lookup(kTriggers, text); }
std::optional<EffectKind> parse_effect(std::string_view text) { return lookup(kEffects, text); }
bool is_first(Trigger trigger) {
  return trigger == Trigger::FirstEntered || trigger == Trigger::FirstLeft;
}

std::string_view to_string(EntityCategory category) { return name_of(kCategories, category); }

std::string handler_label(const EventHandler& handler, std::size_t index) {
  if (!handler.id.empty()) return handler.id;
  return "#" + std::to_string(index);
}

// ---------------------------------------------------------------------------
// Literal formatting
// ---------------------------------------------------------------------------

std::string quote_string(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  out.push_back('"');
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string format_literal(const Literal& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          std::array<char, 64> buf{};
          auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
          std::string text(buf.data(), end);
          if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
          return text;
        } else {
          return quote_string(v);
        }
      },
      value);
}

std::string format_binding(const Binding& binding) {
  return std::visit(
      [](const auto& b) -> std::string {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return format_literal(b.value);
        } else if constexpr (std::is_same_v<T, Variable>) {
          return "$" + b.name;
        } else {
          std::string out = "@";
          if (!b.receiver.empty()) out += b.receiver + ".";
          out += b.function + "(";
          for (std::size_t i = 0; i < b.args.size(); ++i) {
            if (i) out += ", ";
            out += format_binding(b.args[i].binding);
          }
          return out + ")";
        }
      },
      binding);
}

// ---------------------------------------------------------------------------
// Command accessors
// ---------------------------------------------------------------------------

const std::string& Command::id() const {
  return std::visit([](const auto& c) -> const std::string& { return c.id; }, node);
}

const std::vector<DeclaredState>& Command::states() const {
  return std::visit([](const auto& c) -> const std::vector<DeclaredState>& { return c.states; },
                    node);
}

std::vector<DeclaredState>& Command::states() {
  return std::visit([](auto& c) -> std::vector<DeclaredState>& { return c.states; }, node);
}

// ---------------------------------------------------------------------------
// DiagramIndex
// ---------------------------------------------------------------------------

DiagramIndex::DiagramIndex(const Diagram& diagram) : diagram_(&diagram) {
  add(diagram.name, EntityCategory::Diagram, &diagram, "");
  for (const auto& sensor : diagram.top_sensors) {
    add(sensor.id, EntityCategory::Sensor, &sensor, diagram.name);
  }
  for (const auto& state : diagram.states) {
    add(state.id, EntityCategory::State, &state, diagram.name);
    declared_.push_back(&state);
  }
  for (const auto& command : diagram.commands) walk(command, diagram.name);
  for (const auto& logical : diagram.logical_states) {
    add(logical.id, EntityCategory::Logical, &logical, diagram.name);
  }
  for (const auto& handler : diagram.handlers) {
    if (!handler.id.empty()) add(handler.id, EntityCategory::Handler, &handler, handler.scope);
  }
  for (const auto& starter : diagram.starters) {
    add(starter.id, EntityCategory::Starter, &starter, diagram.name);
  }
}

void DiagramIndex::add(const std::string& id, EntityCategory category, const void* ptr,
                       const std::string& container) {
  auto [it, inserted] = entities_.try_emplace(id, EntityRef{category, ptr, container});
  if (!inserted) duplicates_.push_back({id, it->second.category, category});
}

void DiagramIndex::walk(const Command& command, const std::string& parent) {
  const std::string& id = command.id();
  add(id, EntityCategory::Command, &command, parent);
  parents_.try_emplace(id, parent);
  preorder_.push_back(&command);
  for (const auto& state : command.states()) {
    add(state.id, EntityCategory::State, &state, id);
    declared_.push_back(&state);
  }
  if (const auto* runtime = std::get_if<RuntimeCommand>(&command.node)) {
    for (const auto& actuator : runtime->actuators) {
      add(actuator.id, EntityCategory::Actuator, &actuator, id);
      for (const auto& sensor : actuator.sensors) {
        add(sensor.id, EntityCategory::Sensor, &sensor, id);
        sensor_actuators_.try_emplace(sensor.id, actuator.id);
      }
    }
    for (const auto& action : runtime->actions) add(action.id, EntityCategory::Action, &action, id);
  } else if (const auto* tx = std::get_if<TransactionCommand>(&command.node)) {
    for (const auto& child : tx->children) walk(child, id);
  }
}

const EntityRef* DiagramIndex::find(std::string_view id) const {
  auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

const EntityRef& DiagramIndex::at(std::string_view id) const {
  const auto* ref = find(id);
  if (!ref) throw UnknownEntity(std::string(id));
  return *ref;
}

namespace {
template <typename T>
const T* typed(const EntityRef* ref, EntityCategory category) {
  if (!ref || ref->category != category) return nullptr;
  return static_cast<const T*>(ref->ptr);
}
}  // namespace

const Command* DiagramIndex::command(std::string_view id) const {
  return typed<Command>(find(id), EntityCategory::Command);
}
const Actuator* DiagramIndex::actuator(std::string_view id) const {
  return typed<Actuator>(find(id), EntityCategory::Actuator);
}
const Action* DiagramIndex::action(std::string_view id) const {
  return typed<Action>(find(id), EntityCategory::Action);
}
const Sensor* DiagramIndex::sensor(std::string_view id) const {
  return typed<Sensor>(find(id), EntityCategory::Sensor);
}
const DeclaredState* DiagramIndex::state(std::string_view id) const {
  return typed<DeclaredState>(find(id), EntityCategory::State);
}
const LogicalState* DiagramIndex::logical(std::string_view id) const {
  return typed<LogicalState>(find(id), EntityCategory::Logical);
}
bool DiagramIndex::is_state(std::string_view id) const {
  return state(id) != nullptr || logical(id) != nullptr;
}

std::optional<std::string> DiagramIndex::parent(std::string_view command_id) const {
  auto it = parents_.find(command_id);
  if (it == parents_.end()) return std::nullopt;
  return it->second;
}

bool DiagramIndex::is_descendant_or_self(std::string_view id, std::string_view ancestor) const {
  if (id == ancestor) return true;
  if (is_root(ancestor)) return command(id) != nullptr;
  std::optional<std::string> cursor = parent(id);
  while (cursor) {
    if (*cursor == ancestor) return true;
    cursor = parent(*cursor);
  }
  return false;
}

std::vector<std::string> DiagramIndex::children(std::string_view command_id) const {
  std::vector<std::string> out;
  const std::vector<Command>* list = nullptr;
  if (is_root(command_id)) {
    list = &diagram_->commands;
  } else if (const auto* cmd = command(command_id)) {
    if (const auto* tx = std::get_if<TransactionCommand>(&cmd->node)) list = &tx->children;
  }
  if (list) {
    for (const auto& child : *list) out.push_back(child.id());
  }
  return out;
}

std::optional<std::string> DiagramIndex::owning_command(std::string_view entity_id) const {
  const auto* ref = find(entity_id);
  if (!ref) return std::nullopt;
  switch (ref->category) {
    case EntityCategory::Actuator:
    case EntityCategory::Action:
      return ref->container;
    case EntityCategory::Sensor:
      if (sensor_actuators_.count(entity_id)) return ref->container;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

std::optional<std::string> DiagramIndex::sensor_actuator(std::string_view sensor_id) const {
  auto it = sensor_actuators_.find(sensor_id);
  if (it == sensor_actuators_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// provided_states
// ---------------------------------------------------------------------------

namespace {

std::vector<StateKind> sensor_state_kinds(ValueKind kind) {
  if (kind == ValueKind::Bool) return {StateKind::SensorTrue};
  return {StateKind::SensorGreater, StateKind::SensorLess};
}

}  // namespace

std::vector<ProvidedState> provided_states(const DiagramIndex& index, std::string_view entity_id,
                                           const Catalog& catalog) {
  const EntityRef& ref = index.at(entity_id);
  const std::string owner(entity_id);
  std::vector<ProvidedState> out;
  switch (ref.category) {
    case EntityCategory::Diagram:
    case EntityCategory::Command:
      for (StateKind kind : {StateKind::CommandStarted, StateKind::CommandCompleted,
                             StateKind::CommandCancelled, StateKind::Raised}) {
        out.push_back({kind, owner, std::nullopt});
      }
      break;
    case EntityCategory::Action: {
      const auto* action = static_cast<const Action*>(ref.ptr);
      if (const auto* type = catalog.action(action->action_type)) {
        for (StateKind kind : type->provides) out.push_back({kind, owner, std::nullopt});
      }
      break;
    }
    case EntityCategory::Sensor: {
      const auto* sensor = static_cast<const Sensor*>(ref.ptr);
      if (const auto* type = catalog.sensor(sensor->sensor_type)) {
        for (StateKind kind : sensor_state_kinds(type->kind)) {
          out.push_back({kind, owner, std::nullopt});
        }
      }
      break;
    }
    case EntityCategory::Actuator: {
      const auto* actuator = static_cast<const Actuator*>(ref.ptr);
      const auto* device = catalog.device(actuator->device_type);
      if (!device) break;
      for (StateKind kind : device->states) out.push_back({kind, owner, std::nullopt});
      // Declared sensors provide their states on the sensor itself.
      for (const auto& sensor : actuator->sensors) {
        if (const auto* type = catalog.sensor(sensor.sensor_type)) {
          for (StateKind kind : sensor_state_kinds(type->kind)) {
            out.push_back({kind, sensor.id, std::nullopt});
          }
        }
      }
      // Sensors the device offers but the diagram has not declared yet.
      for (const auto& offer : device->sensors) {
        const bool declared = std::any_of(
            actuator->sensors.begin(), actuator->sensors.end(),
            [&](const Sensor& s) { return s.sensor_type == offer.sensor_type; });
        if (declared) continue;
        if (const auto* type = catalog.sensor(offer.sensor_type)) {
          for (StateKind kind : sensor_state_kinds(type->kind)) {
            out.push_back({kind, std::nullopt, offer.factory});
          }
        }
      }
      break;
    }
    default:
      break;
  }
  return out;
}

std::optional<std::string> check_state_owner(const DiagramIndex& index, const DeclaredState& state,
                                             const Catalog& catalog) {
  const EntityRef* ref = index.find(state.owner);
  if (!ref) return "owner '" + state.owner + "' does not resolve";
  const auto provided = provided_states(index, state.owner, catalog);
  const bool legal = std::any_of(provided.begin(), provided.end(), [&](const ProvidedState& p) {
    return p.kind == state.kind && p.owner == state.owner;
  });
  if (!legal) {
    return std::string("state kind ") + std::string(to_string(state.kind)) + " is not provided by " +
           std::string(to_string(ref->category)) + " '" + state.owner + "'";
  }
  if (state.kind == StateKind::ActionProgressAtLeast &&
      (state.argument < 0.0 || state.argument > 100.0)) {
    return "progress percent " + format_literal(state.argument) + " outside [0, 100]";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Variables
// ---------------------------------------------------------------------------

namespace {

void collect_vars(const Binding& binding, const std::string& path, std::vector<VariableUse>& out) {
  if (const auto* var = std::get_if<Variable>(&binding)) {
    out.push_back({var->name, path});
  } else if (const auto* call = std::get_if<FactoryCall>(&binding)) {
    for (std::size_t i = 0; i < call->args.size(); ++i) {
      collect_vars(call->args[i].binding, path + ".arg" + std::to_string(i), out);
    }
  }
}

void collect_params(const std::string& owner, const std::vector<Parameter>& params,
                    std::vector<VariableUse>& out) {
  for (const auto& p : params) collect_vars(p.binding, owner + "." + p.name, out);
}

void collect_command(const Command& command, std::vector<VariableUse>& out) {
  if (const auto* runtime = std::get_if<RuntimeCommand>(&command.node)) {
    for (const auto& actuator : runtime->actuators) collect_params(actuator.id, actuator.config, out);
    for (const auto& action : runtime->actions) collect_params(action.id, action.params, out);
  } else if (const auto* tx = std::get_if<TransactionCommand>(&command.node)) {
    for (const auto& child : tx->children) collect_command(child, out);
  }
}

}  // namespace

std::vector<VariableUse> variable_uses(const Diagram& diagram) {
  std::vector<VariableUse> out;
  for (const auto& command : diagram.commands) collect_command(command, out);
  return out;
}

}  // namespace gsr
