#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include "gsr/net.hpp"

namespace gsr {

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

CycleError::CycleError(std::vector<std::string> cycle)
    : Error("logical states form a cycle: " + join(cycle, " -> ")), cycle_(std::move(cycle)) {}

UnboundFactory::UnboundFactory(const std::string& path, const std::string& function)
    : Error("factory '" + function + "' used by '" + path + "' is not in the catalog") {}

bool NetValue::is_concrete() const {
  if (std::holds_alternative<Slot>(value)) return false;
  if (const auto* call = std::get_if<Call>(&value)) {
    return std::all_of(call->args.begin(), call->args.end(),
                       [](const NetValue& v) { return v.is_concrete(); });
  }
  return true;
}

std::string NetValue::text() const {
  if (const auto* lit = std::get_if<Literal>(&value)) return format_literal(*lit);
  if (const auto* slot = std::get_if<Slot>(&value)) return "$" + slot->name;
  const auto& call = std::get<Call>(value);
  std::string out = "@";
  if (!call.receiver.empty()) out += call.receiver + ".";
  out += call.function + "(";
  for (std::size_t i = 0; i < call.args.size(); ++i) {
    if (i) out += ", ";
    out += call.args[i].text();
  }
  return out + ")";
}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Transaction: return "transaction";
    case NodeKind::Runtime: return "runtime";
    case NodeKind::Wait: return "wait";
  }
  return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  for (NodeKind k : {NodeKind::Transaction, NodeKind::Runtime, NodeKind::Wait}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

int Net::lifecycle_index(std::string_view id) const {
  for (std::size_t i = 0; i < lifecycle.size(); ++i) {
    if (lifecycle[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int Net::state_index(std::string_view id) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

bool Net::is_concrete() const {
  auto all = [](const std::vector<NamedValue>& vs) {
    return std::all_of(vs.begin(), vs.end(), [](const NamedValue& v) { return v.value.is_concrete(); });
  };
  return std::all_of(lifecycle.begin(), lifecycle.end(), [&](const LifecycleNode& n) {
    return all(n.config) && all(n.params) && n.duration.is_concrete() && n.brake.is_concrete() &&
           (!n.output || (n.output->channel.is_concrete() && n.output->value.is_concrete()));
  });
}

void check_net(const Net& net) {
  const int commands = static_cast<int>(net.lifecycle.size());
  const int states = static_cast<int>(net.states.size());
  auto fail = [](const std::string& what) { throw Error("net: " + what); };
  auto command = [&](int i, const std::string& where) {
    if (i < 0 || i >= commands) fail(where + " refers to missing command " + std::to_string(i));
  };
  auto state = [&](int i, const std::string& where) {
    if (i < 0 || i >= states) fail(where + " refers to missing state " + std::to_string(i));
  };
  if (net.lifecycle.empty() || net.lifecycle[0].parent != -1) fail("lifecycle must start with the root");
  for (int i = 0; i < commands; ++i) {
    const auto& n = net.lifecycle[static_cast<std::size_t>(i)];
    if (i > 0) {
      command(n.parent, n.id);
      if (n.parent >= i) fail(n.id + " precedes its parent");
    }
    for (int c : n.children) {
      command(c, n.id);
      if (net.lifecycle[static_cast<std::size_t>(c)].parent != i) fail(n.id + " lists a foreign child");
    }
    for (const auto& a : n.auto_start) {
      command(a.child, n.id);
      if (a.guard != -1) state(a.guard, n.id);
    }
  }
  for (int i = 0; i < states; ++i) {
    const auto& s = net.states[static_cast<std::size_t>(i)];
    for (int in : s.inputs) {
      state(in, s.id);
      if (in >= i) fail(s.id + " reads a state evaluated after it");
    }
    if (!s.logical && s.command != -1) command(s.command, s.id);
  }
  for (const auto& h : net.handlers) {
    command(h.scope, h.label);
    state(h.source, h.label);
    if (h.effect == EffectKind::Raise) {
      state(h.target, h.label);
    } else if (h.effect != EffectKind::External) {
      command(h.target, h.label);
    }
  }
  for (int s : net.start_set) command(s, "start set");
  for (std::size_t i = 1; i < net.channels.size(); ++i) {
    if (!(net.channels[i - 1].name < net.channels[i].name)) fail("channels not sorted and unique");
  }
}

std::vector<std::string> evaluation_order(const Net& net) {
  std::vector<std::string> out;
  out.reserve(net.states.size());
  for (const auto& s : net.states) out.push_back(s.id);
  return out;
}

void derive_channels(Net& net) {
  std::map<std::string, Channel> by_name;
  for (const auto& c : net.channels) {
    if (c.direction == ChannelDirection::Input) by_name.emplace(c.name, c);
  }
  for (const auto& node : net.lifecycle) {
    if (!node.output) continue;
    const auto* name = std::get_if<Literal>(&node.output->channel.value);
    if (!name || !std::holds_alternative<std::string>(*name)) continue;
    ValueKind kind = ValueKind::Bool;
    if (const auto* lit = std::get_if<Literal>(&node.output->value.value)) {
      if (!std::holds_alternative<bool>(*lit)) kind = ValueKind::Real;
    } else if (const auto* slot = std::get_if<Slot>(&node.output->value.value)) {
      if (slot->kind != ValueKind::Bool) kind = ValueKind::Real;
    }
    by_name.emplace(std::get<std::string>(*name), Channel{std::get<std::string>(*name), ChannelDirection::Output, kind});
  }
  net.channels.clear();
  for (auto& [name, channel] : by_name) net.channels.push_back(std::move(channel));
}

namespace {

class Compiler {
 public:
  Compiler(const Diagram& d, const Catalog& catalog) : d_(d), catalog_(catalog), index_(d) {}

  Net run() {
    net_.name = d_.name;
    lifecycle();
    atomic_states();
    logical_states();
    link_lifecycle();
    handlers();
    input_channels();
    derive_channels(net_);
    return std::move(net_);
  }

 private:
  // Pre-order lifecycle nodes, root first.
  void lifecycle() {
    LifecycleNode root;
    root.id = d_.name;
    root.kind = NodeKind::Transaction;
    net_.lifecycle.push_back(root);
    for (const auto& cmd : d_.commands) add_command(cmd, 0);
  }

  void add_command(const Command& cmd, int parent) {
    const int self = static_cast<int>(net_.lifecycle.size());
    net_.lifecycle.emplace_back();
    net_.lifecycle[parent].children.push_back(self);
    {
      LifecycleNode& node = net_.lifecycle[self];
      node.id = cmd.id();
      node.parent = parent;
    }
    if (const auto* rt = std::get_if<RuntimeCommand>(&cmd.node)) {
      fill_runtime(net_.lifecycle[self], *rt);
    } else if (const auto* w = std::get_if<WaitCommand>(&cmd.node)) {
      net_.lifecycle[self].kind = NodeKind::Wait;
      net_.lifecycle[self].duration = NetValue{Literal{w->duration_ticks}};
    } else {
      const auto& tx = std::get<TransactionCommand>(cmd.node);
      net_.lifecycle[self].kind = NodeKind::Transaction;
      for (const auto& child : tx.children) add_command(child, self);
    }
  }

  void fill_runtime(LifecycleNode& node, const RuntimeCommand& rt) {
    node.kind = NodeKind::Runtime;
    if (!rt.actuators.empty()) {
      const Actuator& a = rt.actuators.front();
      node.actuator = a.id;
      node.device_type = a.device_type;
      if (const auto* device = catalog_.device(a.device_type)) {
        node.config = values(a.id, a.config, device->config);
      }
    }
    if (rt.actions.empty()) return;
    const Action& act = rt.actions.front();
    node.action = act.id;
    node.action_type = act.action_type;
    const ActionType* type = catalog_.action(act.action_type);
    if (!type) return;
    node.params = values(act.id, act.params, type->params);
    auto find = [&](const std::string& name) -> const NetValue* {
      for (const auto& p : node.params) {
        if (p.name == name) return &p.value;
      }
      return nullptr;
    };
    if (type->duration_param) {
      if (const NetValue* v = find(*type->duration_param)) node.duration = *v;
    }
    if (type->brake_param) {
      if (const NetValue* v = find(*type->brake_param)) node.brake = *v;
    }
    if (type->output) {
      const NetValue* channel = find(type->output->channel_param);
      const NetValue* value = find(type->output->value_param);
      if (channel && value) node.output = NetOutput{*channel, *value};
    }
  }

  std::vector<NamedValue> values(const std::string& owner, const std::vector<Parameter>& given,
                                 const std::vector<ParamSpec>& specs) {
    std::vector<NamedValue> out;
    for (const auto& spec : specs) {
      auto it = std::find_if(given.begin(), given.end(), [&](const Parameter& p) { return p.name == spec.name; });
      if (it != given.end()) {
        out.push_back({spec.name, value(owner + "." + spec.name, it->binding, spec.kind)});
      } else if (spec.default_value) {
        out.push_back({spec.name, NetValue{*spec.default_value}});
      }
    }
    return out;
  }

  NetValue value(const std::string& path, const Binding& binding, ValueKind kind) {
    if (const auto* c = std::get_if<Constant>(&binding)) return NetValue{c->value};
    if (const auto* v = std::get_if<Variable>(&binding)) return NetValue{Slot{v->name, kind}};
    const auto& call = std::get<FactoryCall>(binding);
    const Factory* f = catalog_.factory(call.function);
    if (!f || f->args.size() != call.args.size()) throw UnboundFactory(path, call.function);
    Call out{call.receiver, call.function, f->returns, {}};
    for (std::size_t i = 0; i < call.args.size(); ++i) {
      out.args.push_back(value(path, call.args[i].binding, f->args[i]));
    }
    return NetValue{std::move(out)};
  }

  int command_index(const std::string& id) const { return net_.lifecycle_index(id); }

  void atomic_states() {
    // Declared states in tree order; the first declaration of a command's
    // lifecycle kind stands in for the materialized node.
    std::set<std::pair<int, StateKind>> declared_lifecycle;
    for (const DeclaredState* st : index_.declared_states()) {
      StateNode node;
      node.id = st->id;
      node.kind = st->kind;
      node.argument = st->argument;
      switch (st->kind) {
        case StateKind::CommandStarted:
        case StateKind::CommandCompleted:
        case StateKind::CommandCancelled:
        case StateKind::Raised:
          node.command = command_index(st->owner);
          if (st->kind != StateKind::Raised) declared_lifecycle.insert({node.command, st->kind});
          break;
        case StateKind::ActionProgressAtLeast:
          node.command = command_index(index_.owning_command(st->owner).value_or(""));
          break;
        case StateKind::SensorTrue:
        case StateKind::SensorGreater:
        case StateKind::SensorLess:
          if (const Sensor* s = index_.sensor(st->owner)) node.channel = s->channel;
          break;
        case StateKind::ActuatorError:
          node.channel = st->owner + ".error";
          break;
      }
      net_.states.push_back(std::move(node));
    }
    for (std::size_t i = 0; i < net_.lifecycle.size(); ++i) {
      const int cmd = static_cast<int>(i);
      for (auto [kind, suffix] : {std::pair{StateKind::CommandStarted, ".started"},
                                  std::pair{StateKind::CommandCompleted, ".completed"},
                                  std::pair{StateKind::CommandCancelled, ".cancelled"}}) {
        if (declared_lifecycle.count({cmd, kind})) continue;
        StateNode node;
        node.id = net_.lifecycle[i].id + suffix;
        node.declared = false;
        node.kind = kind;
        node.command = cmd;
        net_.states.push_back(std::move(node));
      }
    }
  }

  // Kahn's algorithm over logical-to-logical edges; ties go to the earlier
  // declaration.
  void logical_states() {
    const auto& logicals = d_.logical_states;
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < logicals.size(); ++i) position.emplace(logicals[i].id, i);
    std::vector<int> pending(logicals.size(), 0);
    std::vector<std::vector<std::size_t>> readers(logicals.size());
    for (std::size_t i = 0; i < logicals.size(); ++i) {
      for (const auto& input : logicals[i].inputs) {
        auto it = position.find(input);
        if (it == position.end()) continue;
        ++pending[i];
        readers[it->second].push_back(i);
      }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < logicals.size(); ++i) {
      if (pending[i] == 0) ready.push(i);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
      const std::size_t i = ready.top();
      ready.pop();
      order.push_back(i);
      for (std::size_t r : readers[i]) {
        if (--pending[r] == 0) ready.push(r);
      }
    }
    if (order.size() != logicals.size()) throw CycleError(find_cycle(pending, position));
    for (std::size_t i : order) {
      StateNode node;
      node.id = logicals[i].id;
      node.logical = true;
      node.op = logicals[i].op;
      for (const auto& input : logicals[i].inputs) node.inputs.push_back(state(input));
      net_.states.push_back(std::move(node));
    }
  }

  std::vector<std::string> find_cycle(const std::vector<int>& pending,
                                      const std::map<std::string, std::size_t>& position) const {
    // Walk backwards along unresolved inputs until a node repeats.
    std::size_t at = 0;
    while (pending[at] == 0) ++at;
    std::vector<std::size_t> path;
    std::vector<bool> seen(pending.size(), false);
    while (!seen[at]) {
      seen[at] = true;
      path.push_back(at);
      for (const auto& input : d_.logical_states[at].inputs) {
        auto it = position.find(input);
        if (it != position.end() && pending[it->second] != 0) {
          at = it->second;
          break;
        }
      }
    }
    std::vector<std::string> cycle;
    auto from = std::find(path.begin(), path.end(), at);
    for (auto it = from; it != path.end(); ++it) cycle.push_back(d_.logical_states[*it].id);
    cycle.push_back(d_.logical_states[at].id);
    std::reverse(cycle.begin(), cycle.end());
    return cycle;
  }

  int state(const std::string& id) const {
    const int i = net_.state_index(id);
    if (i < 0) throw UnknownEntity(id);
    return i;
  }

  void link_lifecycle() {
    for (const Command* cmd : index_.commands_preorder()) {
      const auto* tx = std::get_if<TransactionCommand>(&cmd->node);
      if (!tx) continue;
      LifecycleNode& node = net_.lifecycle[static_cast<std::size_t>(command_index(tx->id))];
      for (const auto& as : tx->auto_start) {
        node.auto_start.push_back({command_index(as.child), as.guard ? state(*as.guard) : -1});
      }
    }
    std::set<int> start;
    for (const auto& s : d_.starters) {
      for (const auto& target : s.targets) {
        const int i = command_index(target);
        if (i > 0 && start.insert(i).second) net_.start_set.push_back(i);
      }
    }
    std::sort(net_.start_set.begin(), net_.start_set.end());
  }

  void handlers() {
    for (std::size_t i = 0; i < d_.handlers.size(); ++i) {
      const auto& h = d_.handlers[i];
      NetHandler out;
      out.label = handler_label(h, i);
      out.scope = command_index(h.scope);
      out.source = state(h.source);
      out.trigger = h.trigger;
      out.effect = h.effect.kind;
      switch (h.effect.kind) {
        case EffectKind::Raise:
          out.target = state(h.effect.target);
          break;
        case EffectKind::External:
          out.tag = h.effect.target;
          break;
        default:
          out.target = command_index(h.effect.target);
          break;
      }
      if (out.scope < 0) throw UnknownEntity(h.scope);
      if (out.target < 0 && h.effect.kind != EffectKind::External) throw UnknownEntity(h.effect.target);
      net_.handlers.push_back(std::move(out));
    }
  }

  void input_channels() {
    std::map<std::string, ValueKind> inputs;
    auto add_sensor = [&](const Sensor& s) {
      const SensorType* type = catalog_.sensor(s.sensor_type);
      inputs.emplace(s.channel, type ? type->kind : ValueKind::Real);
    };
    for (const auto& s : d_.top_sensors) add_sensor(s);
    for (const Command* cmd : index_.commands_preorder()) {
      if (const auto* rt = std::get_if<RuntimeCommand>(&cmd->node)) {
        for (const auto& a : rt->actuators) {
          for (const auto& s : a.sensors) add_sensor(s);
        }
      }
    }
    for (const auto& node : net_.states) {
      if (!node.logical && node.kind == StateKind::ActuatorError) inputs.emplace(node.channel, ValueKind::Bool);
    }
    for (const auto& [name, kind] : inputs) {
      net_.channels.push_back({name, ChannelDirection::Input, kind});
    }
  }

  const Diagram& d_;
  const Catalog& catalog_;
  DiagramIndex index_;
  Net net_;
};

}  // namespace

Net compile(const Diagram& diagram, const Catalog& catalog) { return Compiler(diagram, catalog).run(); }

}  // namespace gsr
