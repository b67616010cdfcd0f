#include "gsr/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace gsr {

std::size_t ValidationReport::count(std::string_view code) const {
  return static_cast<std::size_t>(std::count_if(
      diagnostics.begin(), diagnostics.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

std::vector<std::string> reachable_commands(const Diagram& diagram) {
  DiagramIndex index(diagram);
  std::set<std::string> reached;
  std::vector<std::string> work;
  auto reach = [&](const std::string& id) {
    if (index.command(id) && reached.insert(id).second) work.push_back(id);
  };
  for (const auto& starter : diagram.starters) {
    for (const auto& target : starter.targets) reach(target);
  }
  auto start_effects_of = [&](const std::string& scope) {
    for (const auto& h : diagram.handlers) {
      if (h.scope == scope && h.effect.kind == EffectKind::Start) reach(h.effect.target);
    }
  };
  start_effects_of(diagram.name);
  while (!work.empty()) {
    std::string id = work.back();
    work.pop_back();
    const Command* cmd = index.command(id);
    if (const auto* tx = std::get_if<TransactionCommand>(&cmd->node)) {
      for (const auto& as : tx->auto_start) {
        const auto children = index.children(id);
        if (std::find(children.begin(), children.end(), as.child) != children.end()) {
          reach(as.child);
        }
      }
    }
    start_effects_of(id);
  }
  std::vector<std::string> out;
  for (const Command* cmd : index.commands_preorder()) {
    if (reached.count(cmd->id())) out.push_back(cmd->id());
  }
  return out;
}

namespace {

class Validator {
 public:
  Validator(const Diagram& d, const Catalog& catalog, const SourceMap& spans)
      : d_(d), catalog_(catalog), spans_(spans), index_(d) {}

  ValidationReport run() {
    unique_ids();
    commands_present();
    starters();
    runtime_arity();
    starter_targets();
    start_scope();
    stop_scope();
    logical_states();
    catalog_types();
    parameters();
    variables();
    references();
    warnings();
    return std::move(report_);
  }

 private:
  void error(const std::string& code, const std::string& key, std::string message) {
    report_.diagnostics.push_back({Severity::Error, code, std::move(message), spans_.get(key)});
  }
  void warning(const std::string& code, const std::string& key, std::string message) {
    report_.diagnostics.push_back({Severity::Warning, code, std::move(message), spans_.get(key)});
  }
  static std::string handler_key(std::size_t i) { return "handler#" + std::to_string(i); }
  std::string handler_name(std::size_t i) const {
    return "handler " + handler_label(d_.handlers[i], i);
  }
  static std::string q(const std::string& s) { return "'" + s + "'"; }

  bool is_command_or_root(const std::string& id) const {
    return index_.is_root(id) || index_.command(id) != nullptr;
  }

  template <typename F>
  void each_runtime(F&& fn) const {
    for (const Command* cmd : index_.commands_preorder()) {
      if (const auto* rt = std::get_if<RuntimeCommand>(&cmd->node)) fn(*rt);
    }
  }
  template <typename F>
  void each_transaction(F&& fn) const {
    for (const Command* cmd : index_.commands_preorder()) {
      if (const auto* tx = std::get_if<TransactionCommand>(&cmd->node)) fn(*tx);
    }
  }

  // V0
  void unique_ids() {
    for (const auto& dup : index_.duplicates()) {
      error("V0", dup.id,
            "identifier " + q(dup.id) + " declared twice (as " + std::string(to_string(dup.first)) +
                " and as " + std::string(to_string(dup.second)) + ")");
    }
  }

  // V1, V1b
  void commands_present() {
    if (d_.commands.empty()) {
      error("V1", d_.name, "diagram " + q(d_.name) + " contains no command");
    }
    each_transaction([&](const TransactionCommand& tx) {
      if (tx.children.empty()) {
        warning("V1b", tx.id, "transaction " + q(tx.id) + " has no child commands");
      }
    });
  }

  // V2
  void starters() {
    if (d_.commands.empty()) return;  // V1 already covers an empty diagram
    const bool any = std::any_of(d_.starters.begin(), d_.starters.end(),
                                 [](const Starter& s) { return !s.targets.empty(); });
    if (!any) error("V2", d_.name, "diagram " + q(d_.name) + " has no starter with a target");
  }

  // V3
  void runtime_arity() {
    each_runtime([&](const RuntimeCommand& rt) {
      if (rt.actuators.size() != 1 || rt.actions.size() != 1) {
        error("V3", rt.id,
              "runtime command " + q(rt.id) + " must contain exactly one actuator and one action "
              "(has " + std::to_string(rt.actuators.size()) + " actuator(s), " +
                  std::to_string(rt.actions.size()) + " action(s))");
      }
    });
  }

  // V4
  void starter_targets() {
    for (const auto& s : d_.starters) {
      for (const auto& target : s.targets) {
        if (!index_.find(target)) continue;  // V11
        const auto parent = index_.parent(target);
        if (!index_.command(target) || !parent || *parent != d_.name) {
          error("V4", s.id, "starter " + q(s.id) + " targets " + q(target) +
                                ", which is not a top-level command");
        }
      }
    }
  }

  // V5
  void start_scope() {
    for (std::size_t i = 0; i < d_.handlers.size(); ++i) {
      const auto& h = d_.handlers[i];
      if (h.effect.kind != EffectKind::Start) continue;
      if (!is_command_or_root(h.scope) || !index_.find(h.effect.target)) continue;  // V11
      const auto parent = index_.parent(h.effect.target);
      if (!index_.command(h.effect.target) || !parent || *parent != h.scope) {
        error("V5", handler_key(i),
              handler_name(i) + " starts " + q(h.effect.target) + ", which is not a child of its scope " +
                  q(h.scope));
      }
    }
    each_transaction([&](const TransactionCommand& tx) {
      for (const auto& as : tx.auto_start) {
        if (!index_.find(as.child)) continue;  // V11
        const auto parent = index_.parent(as.child);
        if (!index_.command(as.child) || !parent || *parent != tx.id) {
          error("V5", tx.id, "transaction " + q(tx.id) + " auto-starts " + q(as.child) +
                                 ", which is not one of its children");
        }
      }
    });
  }

  // V6
  void stop_scope() {
    for (std::size_t i = 0; i < d_.handlers.size(); ++i) {
      const auto& h = d_.handlers[i];
      if (!is_command_or_root(h.scope) || !index_.find(h.effect.target)) continue;  // V11
      switch (h.effect.kind) {
        case EffectKind::Stop:
        case EffectKind::Cancel:
          if (!is_command_or_root(h.effect.target) ||
              !index_.is_descendant_or_self(h.effect.target, h.scope)) {
            error("V6", handler_key(i),
                  handler_name(i) + " " + std::string(to_string(h.effect.kind)) + "s " +
                      q(h.effect.target) + ", which is neither its scope " + q(h.scope) +
                      " nor a descendant of it");
          }
          break;
        case EffectKind::Raise: {
          const DeclaredState* st = index_.state(h.effect.target);
          if (!st || st->kind != StateKind::Raised || st->owner != h.scope) {
            error("V6", handler_key(i),
                  handler_name(i) + " raises " + q(h.effect.target) +
                      ", which is not a Raised state declared in its scope " + q(h.scope));
          }
          break;
        }
        default:
          break;
      }
    }
  }

  // V7
  void logical_states() {
    for (const auto& ls : d_.logical_states) {
      const std::size_t n = ls.inputs.size();
      const bool unary = ls.op == LogicOp::Not || ls.op == LogicOp::Ever;
      if (unary && n != 1) {
        error("V7", ls.id, std::string(to_string(ls.op)) + " state " + q(ls.id) +
                               " takes exactly one input (has " + std::to_string(n) + ")");
      } else if (!unary && n < 2) {
        error("V7", ls.id, std::string(to_string(ls.op)) + " state " + q(ls.id) +
                               " takes at least two inputs (has " + std::to_string(n) + ")");
      }
    }
    // Cycle detection over logical-to-logical edges.
    enum class Mark { None, Active, Done };
    std::map<std::string, Mark> marks;
    std::set<std::string> reported;
    std::vector<std::string> stack;
    std::function<void(const LogicalState&)> visit = [&](const LogicalState& ls) {
      marks[ls.id] = Mark::Active;
      stack.push_back(ls.id);
      for (const auto& input : ls.inputs) {
        const LogicalState* next = index_.logical(input);
        if (!next) continue;
        const Mark m = marks[input];
        if (m == Mark::Active) {
          auto from = std::find(stack.begin(), stack.end(), input);
          std::string cycle;
          std::set<std::string> members(from, stack.end());
          for (auto it = from; it != stack.end(); ++it) cycle += *it + " -> ";
          cycle += input;
          const std::string key = *std::min_element(from, stack.end());
          if (reported.insert(key).second) {
            error("V7", key, "logical states form a cycle: " + cycle);
          }
        } else if (m == Mark::None) {
          visit(*next);
        }
      }
      stack.pop_back();
      marks[ls.id] = Mark::Done;
    };
    for (const auto& ls : d_.logical_states) {
      if (marks[ls.id] == Mark::None) visit(ls);
    }
  }

  // V8
  void catalog_types() {
    for (const auto& s : d_.top_sensors) {
      const auto* type = catalog_.sensor(s.sensor_type);
      if (!type) {
        error("V8", s.id, "unknown sensor type " + q(s.sensor_type));
      } else if (!type->standalone) {
        error("V8", s.id, "sensor type " + q(s.sensor_type) +
                              " must be attached to an actuator that provides it");
      }
    }
    each_runtime([&](const RuntimeCommand& rt) {
      for (const auto& a : rt.actuators) {
        const auto* device = catalog_.device(a.device_type);
        if (!device) {
          error("V8", a.id, "unknown device type " + q(a.device_type));
        }
        for (const auto& s : a.sensors) {
          if (!catalog_.sensor(s.sensor_type)) {
            error("V8", s.id, "unknown sensor type " + q(s.sensor_type));
            continue;
          }
          if (!device) continue;
          const bool offered = std::any_of(device->sensors.begin(), device->sensors.end(),
                                           [&](const SensorOffer& o) { return o.sensor_type == s.sensor_type; });
          if (!offered) {
            error("V8", s.id, "device type " + q(a.device_type) + " provides no sensor of type " +
                                  q(s.sensor_type));
          }
        }
      }
      for (const auto& a : rt.actions) {
        const auto* type = catalog_.action(a.action_type);
        if (!type) {
          error("V8", a.id, "unknown action type " + q(a.action_type));
          continue;
        }
        for (const auto& act : rt.actuators) {
          if (!catalog_.device(act.device_type)) continue;
          if (std::find(type->devices.begin(), type->devices.end(), act.device_type) ==
              type->devices.end()) {
            error("V8", a.id, "action type " + q(a.action_type) + " cannot be executed by device type " +
                                  q(act.device_type));
          }
        }
      }
    });
    auto check_states = [&](const std::vector<DeclaredState>& states, const std::string& container) {
      for (const auto& st : states) {
        if (!index_.find(st.owner)) continue;  // V11
        if (st.kind == StateKind::Raised && st.owner != container) {
          error("V8", st.id, "raised state " + q(st.id) + " must be owned by the command it is declared in");
          continue;
        }
        if (auto problem = check_state_owner(index_, st, catalog_)) {
          error("V8", st.id, "state " + q(st.id) + ": " + *problem);
        }
      }
    };
    check_states(d_.states, d_.name);
    for (const Command* cmd : index_.commands_preorder()) check_states(cmd->states(), cmd->id());
  }

  // V9
  void parameters() {
    each_runtime([&](const RuntimeCommand& rt) {
      for (const auto& a : rt.actuators) {
        if (const auto* device = catalog_.device(a.device_type)) {
          check_params(a.id, a.config, device->config, {});
        }
      }
      for (const auto& a : rt.actions) {
        const auto* type = catalog_.action(a.action_type);
        if (!type) continue;
        std::set<std::string> concrete;
        if (type->duration_param) concrete.insert(*type->duration_param);
        if (type->brake_param) concrete.insert(*type->brake_param);
        if (type->output) {
          concrete.insert(type->output->channel_param);
          concrete.insert(type->output->value_param);
        }
        check_params(a.id, a.params, type->params, concrete);
      }
    });
  }

  void check_params(const std::string& owner, const std::vector<Parameter>& given,
                    const std::vector<ParamSpec>& specs, const std::set<std::string>& no_factory) {
    for (const auto& p : given) {
      const std::string key = owner + "." + p.name;
      auto spec = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.name == p.name; });
      if (spec == specs.end()) {
        error("V9", key, q(owner) + " has no parameter " + q(p.name));
        continue;
      }
      if (no_factory.count(p.name) && std::holds_alternative<FactoryCall>(p.binding)) {
        error("V9", key, "parameter " + q(owner + "." + p.name) +
                             " drives execution and must be a constant or a variable");
        continue;
      }
      check_binding(key, p.binding, spec->kind);
    }
    for (const auto& spec : specs) {
      if (!spec.required) continue;
      const bool present = std::any_of(given.begin(), given.end(),
                                       [&](const Parameter& p) { return p.name == spec.name; });
      if (!present) error("V9", owner, q(owner) + " is missing required parameter " + q(spec.name));
    }
  }

  void check_binding(const std::string& key, const Binding& binding, ValueKind expected) {
    if (const auto* c = std::get_if<Constant>(&binding)) {
      if (!literal_fits(c->value, expected)) {
        error("V9", key, "value " + format_literal(c->value) + " for " + q(key) + " is not of kind " +
                             std::string(to_string(expected)));
      }
      return;
    }
    const auto* call = std::get_if<FactoryCall>(&binding);
    if (!call) return;  // variables are checked at instantiation
    const Factory* f = catalog_.factory(call->function);
    if (!f) {
      error("V9", key, "unknown factory " + q(call->function) + " in " + q(key));
      return;
    }
    if (f->returns != expected && !(expected == ValueKind::Real && f->returns == ValueKind::Int)) {
      error("V9", key, "factory " + q(call->function) + " returns " + std::string(to_string(f->returns)) +
                           ", " + q(key) + " needs " + std::string(to_string(expected)));
    }
    check_receiver(key, *call, *f);
    if (call->args.size() != f->args.size()) {
      error("V9", key, "factory " + q(call->function) + " takes " + std::to_string(f->args.size()) +
                           " argument(s), got " + std::to_string(call->args.size()));
      return;
    }
    for (std::size_t i = 0; i < call->args.size(); ++i) {
      check_binding(key, call->args[i].binding, f->args[i]);
    }
  }

  void check_receiver(const std::string& key, const FactoryCall& call, const Factory& f) {
    auto owns = [&](const std::string& type) {
      return std::find(f.owners.begin(), f.owners.end(), type) != f.owners.end();
    };
    if (f.owners.empty()) {
      if (!call.receiver.empty()) {
        error("V9", key, "global factory " + q(f.name) + " takes no receiver");
      }
      return;
    }
    if (call.receiver.empty()) {
      error("V9", key, "factory " + q(f.name) + " needs a receiver");
      return;
    }
    if (f.is_static) {
      if (!owns(call.receiver)) {
        error("V9", key, "factory " + q(f.name) + " is not defined for type " + q(call.receiver));
      }
      return;
    }
    const EntityRef* ref = index_.find(call.receiver);
    if (!ref) return;  // V11
    std::vector<std::string> types;
    if (const auto* a = index_.actuator(call.receiver)) types.push_back(a->device_type);
    if (const auto* a = index_.action(call.receiver)) types.push_back(a->action_type);
    if (const auto* s = index_.sensor(call.receiver)) {
      types.push_back(s->sensor_type);
      if (const auto* st = catalog_.sensor(s->sensor_type)) {
        types.push_back(st->kind == ValueKind::Bool ? "bool_sensor" : "real_sensor");
      }
    }
    if (std::none_of(types.begin(), types.end(), owns)) {
      error("V9", key, "factory " + q(f.name) + " is not available on " + q(call.receiver));
    }
  }

  // V10
  void variables() {
    std::map<std::string, std::string> seen;
    for (const auto& use : variable_uses(d_)) {
      auto [it, inserted] = seen.try_emplace(use.name, use.path);
      if (!inserted) {
        error("V10", use.path.substr(0, use.path.find('.', use.path.find('.') + 1)),
              "variable " + q("$" + use.name) + " used at " + q(use.path) + " is already bound at " +
                  q(it->second));
      }
    }
  }

  // V11
  void references() {
    auto must_resolve = [&](const std::string& id, const std::string& key, const std::string& what) {
      if (!index_.find(id)) {
        error("V11", key, what + " " + q(id) + " does not resolve");
        return false;
      }
      return true;
    };
    auto must_be_state = [&](const std::string& id, const std::string& key, const std::string& what) {
      if (must_resolve(id, key, what) && !index_.is_state(id)) {
        error("V11", key, what + " " + q(id) + " does not name a state");
      }
    };
    for (const DeclaredState* st : index_.declared_states()) {
      must_resolve(st->owner, st->id, "owner of state " + q(st->id) + ",");
    }
    for (const auto& ls : d_.logical_states) {
      for (const auto& input : ls.inputs) must_be_state(input, ls.id, "input of " + q(ls.id) + ",");
    }
    for (std::size_t i = 0; i < d_.handlers.size(); ++i) {
      const auto& h = d_.handlers[i];
      const std::string key = handler_key(i);
      if (must_resolve(h.scope, key, "scope") && !is_command_or_root(h.scope)) {
        error("V11", key, "scope " + q(h.scope) + " of " + handler_name(i) + " is not a command");
      }
      must_be_state(h.source, key, "state");
      if (h.effect.kind != EffectKind::External) must_resolve(h.effect.target, key, "effect target");
    }
    for (const auto& s : d_.starters) {
      for (const auto& t : s.targets) must_resolve(t, s.id, "starter target");
    }
    each_transaction([&](const TransactionCommand& tx) {
      for (const auto& as : tx.auto_start) {
        must_resolve(as.child, tx.id, "auto-start command");
        if (as.guard) must_be_state(*as.guard, tx.id, "start condition");
      }
    });
    std::function<void(const std::string&, const Binding&)> receivers =
        [&](const std::string& key, const Binding& b) {
          const auto* call = std::get_if<FactoryCall>(&b);
          if (!call) return;
          const Factory* f = catalog_.factory(call->function);
          if (!call->receiver.empty() && f && !f->is_static) {
            must_resolve(call->receiver, key, "factory receiver");
          }
          for (const auto& arg : call->args) receivers(key, arg.binding);
        };
    each_runtime([&](const RuntimeCommand& rt) {
      for (const auto& a : rt.actuators) {
        for (const auto& p : a.config) receivers(a.id + "." + p.name, p.binding);
      }
      for (const auto& a : rt.actions) {
        for (const auto& p : a.params) receivers(a.id + "." + p.name, p.binding);
      }
    });
  }

  // W1, W2
  void warnings() {
    const auto reachable = reachable_commands(d_);
    const std::set<std::string> reached(reachable.begin(), reachable.end());
    for (const Command* cmd : index_.commands_preorder()) {
      if (!reached.count(cmd->id())) {
        warning("W1", cmd->id(), "command " + q(cmd->id()) + " is never started");
      }
    }
    std::set<std::string> raised;
    for (const auto& h : d_.handlers) {
      if (h.effect.kind == EffectKind::Raise) raised.insert(h.effect.target);
    }
    for (std::size_t i = 0; i < d_.handlers.size(); ++i) {
      const DeclaredState* st = index_.state(d_.handlers[i].source);
      if (!st) continue;
      bool constant = false;
      switch (st->kind) {
        case StateKind::Raised:
          constant = !raised.count(st->id);
          break;
        case StateKind::CommandStarted:
        case StateKind::CommandCompleted:
        case StateKind::CommandCancelled:
          constant = index_.command(st->owner) && !reached.count(st->owner);
          break;
        case StateKind::ActionProgressAtLeast: {
          const auto cmd = index_.owning_command(st->owner);
          constant = cmd && !reached.count(*cmd);
          break;
        }
        default:
          break;
      }
      if (constant) {
        warning("W2", handler_key(i),
                handler_name(i) + " listens to " + q(st->id) + ", which can never change");
      }
    }
  }

  const Diagram& d_;
  const Catalog& catalog_;
  const SourceMap& spans_;
  DiagramIndex index_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const Diagram& diagram, const Catalog& catalog, const SourceMap& spans) {
  return Validator(diagram, catalog, spans).run();
}

}  // namespace gsr
