#include "gsr/net.hpp"
#include "json_util.hpp"

namespace gsr {

using nlohmann::ordered_json;

namespace detail {

ordered_json literal_to_json(const Literal& lit) {
  return std::visit([](const auto& v) { return ordered_json(v); }, lit);
}

Literal literal_from_json(const ordered_json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error("expected a literal, got " + j.dump());
}

}  // namespace detail

namespace {

using detail::literal_from_json;
using detail::literal_to_json;

const ordered_json& member(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("net: missing member '") + key + "'");
  return j.at(key);
}

ordered_json value_to_json(const NetValue& v) {
  if (const auto* lit = std::get_if<Literal>(&v.value)) return {{"literal", literal_to_json(*lit)}};
  if (const auto* slot = std::get_if<Slot>(&v.value)) {
    return {{"slot", slot->name}, {"kind", std::string(to_string(slot->kind))}};
  }
  const auto& call = std::get<Call>(v.value);
  ordered_json args = ordered_json::array();
  for (const auto& a : call.args) args.push_back(value_to_json(a));
  return {{"call", call.function},
          {"receiver", call.receiver},
          {"returns", std::string(to_string(call.returns))},
          {"args", args}};
}

ValueKind kind_from_json(const ordered_json& j) {
  auto kind = parse_value_kind(j.get<std::string>());
  if (!kind) throw Error("net: unknown value kind " + j.dump());
  return *kind;
}

NetValue value_from_json(const ordered_json& j) {
  if (j.contains("literal")) return NetValue{literal_from_json(j.at("literal"))};
  if (j.contains("slot")) return NetValue{Slot{j.at("slot").get<std::string>(), kind_from_json(member(j, "kind"))}};
  Call call;
  call.function = member(j, "call").get<std::string>();
  call.receiver = member(j, "receiver").get<std::string>();
  call.returns = kind_from_json(member(j, "returns"));
  for (const auto& a : member(j, "args")) call.args.push_back(value_from_json(a));
  return NetValue{std::move(call)};
}

ordered_json named_to_json(const std::vector<NamedValue>& values) {
  ordered_json out = ordered_json::array();
  for (const auto& v : values) out.push_back({{"name", v.name}, {"value", value_to_json(v.value)}});
  return out;
}

std::vector<NamedValue> named_from_json(const ordered_json& j) {
  std::vector<NamedValue> out;
  for (const auto& v : j) out.push_back({member(v, "name").get<std::string>(), value_from_json(member(v, "value"))});
  return out;
}

template <typename T, typename Parse>
T parse_enum(const ordered_json& j, Parse parse, const char* what) {
  auto v = parse(j.get<std::string>());
  if (!v) throw Error(std::string("net: unknown ") + what + " " + j.dump());
  return *v;
}

}  // namespace

std::string net_to_json(const Net& net) {
  ordered_json j;
  j["name"] = net.name;
  ordered_json lifecycle = ordered_json::array();
  for (const auto& n : net.lifecycle) {
    ordered_json node;
    node["id"] = n.id;
    node["kind"] = std::string(to_string(n.kind));
    node["parent"] = n.parent;
    node["children"] = n.children;
    ordered_json autos = ordered_json::array();
    for (const auto& a : n.auto_start) autos.push_back({{"child", a.child}, {"guard", a.guard}});
    node["auto_start"] = autos;
    if (n.kind == NodeKind::Runtime) {
      node["actuator"] = n.actuator;
      node["device_type"] = n.device_type;
      node["action"] = n.action;
      node["action_type"] = n.action_type;
      node["config"] = named_to_json(n.config);
      node["params"] = named_to_json(n.params);
      if (n.output) {
        node["output"] = {{"channel", value_to_json(n.output->channel)},
                          {"value", value_to_json(n.output->value)}};
      }
    }
    if (n.kind != NodeKind::Transaction) {
      node["duration"] = value_to_json(n.duration);
      node["brake"] = value_to_json(n.brake);
    }
    lifecycle.push_back(std::move(node));
  }
  j["lifecycle"] = std::move(lifecycle);

  ordered_json states = ordered_json::array();
  for (const auto& s : net.states) {
    ordered_json node;
    node["id"] = s.id;
    if (s.logical) {
      node["op"] = std::string(to_string(s.op));
      node["inputs"] = s.inputs;
    } else {
      node["kind"] = std::string(to_string(s.kind));
      node["declared"] = s.declared;
      if (has_argument(s.kind)) node["argument"] = s.argument;
      if (s.command >= 0) node["command"] = s.command;
      if (!s.channel.empty()) node["channel"] = s.channel;
    }
    states.push_back(std::move(node));
  }
  j["states"] = std::move(states);

  ordered_json handlers = ordered_json::array();
  for (const auto& h : net.handlers) {
    ordered_json node;
    node["label"] = h.label;
    node["scope"] = h.scope;
    node["source"] = h.source;
    node["trigger"] = std::string(to_string(h.trigger));
    node["effect"] = std::string(to_string(h.effect));
    if (h.effect == EffectKind::External) {
      node["tag"] = h.tag;
    } else {
      node["target"] = h.target;
    }
    handlers.push_back(std::move(node));
  }
  j["handlers"] = std::move(handlers);
  j["start_set"] = net.start_set;

  ordered_json channels = ordered_json::array();
  for (const auto& c : net.channels) {
    channels.push_back({{"name", c.name},
                        {"direction", c.direction == ChannelDirection::Input ? "input" : "output"},
                        {"kind", std::string(to_string(c.kind))}});
  }
  j["channels"] = std::move(channels);
  return j.dump(2) + "\n";
}

Net net_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(std::string("net: invalid JSON: ") + e.what());
  }
  try {
    Net net;
    net.name = member(j, "name").get<std::string>();
    for (const auto& n : member(j, "lifecycle")) {
      LifecycleNode node;
      node.id = member(n, "id").get<std::string>();
      node.kind = parse_enum<NodeKind>(member(n, "kind"), parse_node_kind, "node kind");
      node.parent = member(n, "parent").get<int>();
      node.children = member(n, "children").get<std::vector<int>>();
      for (const auto& a : member(n, "auto_start")) {
        node.auto_start.push_back({member(a, "child").get<int>(), member(a, "guard").get<int>()});
      }
      if (node.kind == NodeKind::Runtime) {
        node.actuator = member(n, "actuator").get<std::string>();
        node.device_type = member(n, "device_type").get<std::string>();
        node.action = member(n, "action").get<std::string>();
        node.action_type = member(n, "action_type").get<std::string>();
        node.config = named_from_json(member(n, "config"));
        node.params = named_from_json(member(n, "params"));
        if (n.contains("output")) {
          const auto& o = n.at("output");
          node.output = NetOutput{value_from_json(member(o, "channel")), value_from_json(member(o, "value"))};
        }
      }
      if (node.kind != NodeKind::Transaction) {
        node.duration = value_from_json(member(n, "duration"));
        node.brake = value_from_json(member(n, "brake"));
      }
      net.lifecycle.push_back(std::move(node));
    }
    for (const auto& s : member(j, "states")) {
      StateNode node;
      node.id = member(s, "id").get<std::string>();
      if (s.contains("op")) {
        node.logical = true;
        node.op = parse_enum<LogicOp>(s.at("op"), parse_logic_op, "logic op");
        node.inputs = member(s, "inputs").get<std::vector<int>>();
      } else {
        node.kind = parse_enum<StateKind>(member(s, "kind"), parse_state_kind, "state kind");
        node.declared = member(s, "declared").get<bool>();
        if (s.contains("argument")) node.argument = s.at("argument").get<double>();
        if (s.contains("command")) node.command = s.at("command").get<int>();
        if (s.contains("channel")) node.channel = s.at("channel").get<std::string>();
      }
      net.states.push_back(std::move(node));
    }
    for (const auto& h : member(j, "handlers")) {
      NetHandler node;
      node.label = member(h, "label").get<std::string>();
      node.scope = member(h, "scope").get<int>();
      node.source = member(h, "source").get<int>();
      node.trigger = parse_enum<Trigger>(member(h, "trigger"), parse_trigger, "trigger");
      node.effect = parse_enum<EffectKind>(member(h, "effect"), parse_effect, "effect");
      if (node.effect == EffectKind::External) {
        node.tag = member(h, "tag").get<std::string>();
      } else {
        node.target = member(h, "target").get<int>();
      }
      net.handlers.push_back(std::move(node));
    }
    net.start_set = member(j, "start_set").get<std::vector<int>>();
    for (const auto& c : member(j, "channels")) {
      Channel ch;
      ch.name = member(c, "name").get<std::string>();
      const auto dir = member(c, "direction").get<std::string>();
      if (dir != "input" && dir != "output") throw Error("net: unknown channel direction '" + dir + "'");
      ch.direction = dir == "input" ? ChannelDirection::Input : ChannelDirection::Output;
      ch.kind = kind_from_json(member(c, "kind"));
      net.channels.push_back(std::move(ch));
    }
    check_net(net);
    return net;
  } catch (const ordered_json::exception& e) {
    throw Error(std::string("net: malformed document: ") + e.what());
  }
}

}  // namespace gsr
