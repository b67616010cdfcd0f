#include "gsr/codegen.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "json_util.hpp"

namespace gsr {

using nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string setter_name(const std::string& var) {
  std::string out = "set" + var;
  if (out.size() > 3) out[3] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[3])));
  return out;
}

// Visits every value slot of a net: configuration, parameters, durations and
// outputs.
template <typename N, typename F>
void each_value(N& net, F&& fn) {
  for (auto& node : net.lifecycle) {
    for (auto& v : node.config) fn(v.value);
    for (auto& v : node.params) fn(v.value);
    fn(node.duration);
    fn(node.brake);
    if (node.output) {
      fn(node.output->channel);
      fn(node.output->value);
    }
  }
}

void collect_slots(const NetValue& v, std::map<std::string, ValueKind>& out) {
  if (const auto* slot = std::get_if<Slot>(&v.value)) {
    out.emplace(slot->name, slot->kind);
  } else if (const auto* call = std::get_if<Call>(&v.value)) {
    for (const auto& a : call->args) collect_slots(a, out);
  }
}

void fill_slots(NetValue& v, const BindingSet& bindings) {
  if (const auto* slot = std::get_if<Slot>(&v.value)) {
    auto it = bindings.find(slot->name);
    if (it != bindings.end()) v.value = it->second;
  } else if (auto* call = std::get_if<Call>(&v.value)) {
    for (auto& a : call->args) fill_slots(a, bindings);
  }
}

std::vector<RequiredBinding> required_of(const Net& net) {
  std::map<std::string, ValueKind> slots;
  each_value(net, [&](const NetValue& v) { collect_slots(v, slots); });
  std::vector<RequiredBinding> out;
  for (const auto& [name, kind] : slots) out.push_back({name, kind});
  return out;
}

// ---------------------------------------------------------------------------
// Listing
// ---------------------------------------------------------------------------

class ListingWriter {
 public:
  ListingWriter(const Diagram& d, const Catalog& catalog)
      : d_(d), catalog_(catalog), index_(d), net_(compile(d, catalog)) {}

  std::string run() {
    out_ << "template " << d_.name << "\n";
    parameters();
    atomic_states();
    logical_states();
    effects();
    start();
    return out_.str();
  }

 private:
  void section(std::string_view name) { out_ << "\nsection " << name << "\n"; }

  std::string params(const std::vector<Parameter>& given, const std::vector<ParamSpec>* specs) {
    std::vector<std::string> parts;
    if (specs) {
      for (const auto& spec : *specs) {
        auto it = std::find_if(given.begin(), given.end(), [&](const Parameter& p) { return p.name == spec.name; });
        if (it != given.end()) {
          parts.push_back(spec.name + " = " + format_binding(it->binding));
        } else if (spec.default_value) {
          parts.push_back(spec.name + " = " + format_literal(*spec.default_value));
        }
      }
    } else {
      for (const auto& p : given) parts.push_back(p.name + " = " + format_binding(p.binding));
    }
    return "(" + join(parts, ", ") + ")";
  }

  void parameters() {
    section("parameters");
    for (const auto& r : required_of(net_)) {
      out_ << "  variable " << r.name << ": " << to_string(r.kind) << " setter " << setter_name(r.name) << "\n";
    }
  }

  void state_line(const DeclaredState& st) {
    out_ << "  state " << st.id << " = " << to_string(st.kind) << "(" << st.owner;
    if (has_argument(st.kind)) out_ << ", " << format_literal(st.argument);
    out_ << ")\n";
  }

  void sensor_line(const Sensor& s, const std::string& on) {
    out_ << "  sensor " << s.id << " = " << (on.empty() ? "" : on + ".") << s.sensor_type << " channel "
         << quote_string(s.channel) << "\n";
  }

  void entity(const Command& cmd) {
    if (const auto* rt = std::get_if<RuntimeCommand>(&cmd.node)) {
      std::vector<std::string> parts;
      for (const auto& a : rt->actuators) {
        const auto* device = catalog_.device(a.device_type);
        out_ << "  actuator " << a.id << " = " << a.device_type << params(a.config, device ? &device->config : nullptr)
             << "\n";
        for (const auto& s : a.sensors) sensor_line(s, a.id);
        parts.push_back(a.id);
      }
      for (const auto& a : rt->actions) {
        const auto* type = catalog_.action(a.action_type);
        out_ << "  action " << a.id << " = " << a.action_type << params(a.params, type ? &type->params : nullptr)
             << "\n";
        parts.push_back(a.id);
      }
      out_ << "  runtime " << rt->id << " = runtime(" << join(parts, ", ") << ")\n";
    } else if (const auto* w = std::get_if<WaitCommand>(&cmd.node)) {
      out_ << "  wait " << w->id << " = wait(" << w->duration_ticks << ")\n";
    } else {
      const auto& tx = std::get<TransactionCommand>(cmd.node);
      std::vector<std::string> children;
      for (const auto& child : tx.children) {
        entity(child);
        children.push_back(child.id());
      }
      out_ << "  transaction " << tx.id << " = transaction(" << join(children, ", ") << ")\n";
    }
    for (const auto& st : cmd.states()) state_line(st);
  }

  // Inner commands before the transaction that contains them; the root last.
  void atomic_states() {
    section("atomic states");
    for (const auto& s : d_.top_sensors) sensor_line(s, "");
    std::vector<std::string> top;
    for (const auto& cmd : d_.commands) {
      entity(cmd);
      top.push_back(cmd.id());
    }
    out_ << "  transaction " << d_.name << " = transaction(" << join(top, ", ") << ")\n";
    for (const auto& st : d_.states) state_line(st);
  }

  void logical_states() {
    section("logical states");
    for (const auto& node : net_.states) {
      if (!node.logical) continue;
      std::vector<std::string> inputs;
      for (int i : node.inputs) inputs.push_back(net_.states[static_cast<std::size_t>(i)].id);
      out_ << "  state " << node.id << " = " << to_string(node.op) << "(" << join(inputs, ", ") << ")\n";
    }
  }

  void effects() {
    section("event effects");
    for (std::size_t i = 0; i < d_.handlers.size(); ++i) {
      const auto& h = d_.handlers[i];
      out_ << "  effect " << handler_label(h, i) << " in " << h.scope << ": on " << h.source << " "
           << to_string(h.trigger) << " " << to_string(h.effect.kind) << " "
           << (h.effect.kind == EffectKind::External ? quote_string(h.effect.target) : h.effect.target) << "\n";
    }
  }

  void start() {
    section("start");
    for (const Command* cmd : index_.commands_preorder()) {
      const auto* tx = std::get_if<TransactionCommand>(&cmd->node);
      if (!tx || tx->auto_start.empty()) continue;
      std::vector<std::string> parts;
      for (const auto& as : tx->auto_start) parts.push_back(as.guard ? as.child + " when " + *as.guard : as.child);
      out_ << "  autostart " << tx->id << ": " << join(parts, ", ") << "\n";
    }
    for (const auto& s : d_.starters) out_ << "  starter " << s.id << " -> " << join(s.targets, ", ") << "\n";
    std::vector<std::string> setters;
    for (const auto& r : required_of(net_)) setters.push_back(setter_name(r.name));
    out_ << "  create " << d_.name;
    if (!setters.empty()) out_ << " after " << join(setters, ", ");
    out_ << "\n";
  }

  const Diagram& d_;
  const Catalog& catalog_;
  DiagramIndex index_;
  Net net_;
  std::ostringstream out_;
};

Binding substitute_binding(const Binding& b, const BindingSet& bindings) {
  if (const auto* v = std::get_if<Variable>(&b)) {
    auto it = bindings.find(v->name);
    return it == bindings.end() ? b : Binding{Constant{it->second}};
  }
  if (const auto* call = std::get_if<FactoryCall>(&b)) {
    FactoryCall out = *call;
    for (auto& arg : out.args) arg.binding = substitute_binding(arg.binding, bindings);
    return out;
  }
  return b;
}

void substitute_command(Command& cmd, const BindingSet& bindings) {
  if (auto* rt = std::get_if<RuntimeCommand>(&cmd.node)) {
    for (auto& a : rt->actuators) {
      for (auto& p : a.config) p.binding = substitute_binding(p.binding, bindings);
    }
    for (auto& a : rt->actions) {
      for (auto& p : a.params) p.binding = substitute_binding(p.binding, bindings);
    }
  } else if (auto* tx = std::get_if<TransactionCommand>(&cmd.node)) {
    for (auto& child : tx->children) substitute_command(child, bindings);
  }
}

}  // namespace

MissingBinding::MissingBinding(std::vector<std::string> missing)
    : Error("missing bindings: " + join(missing, ", ")), missing_(std::move(missing)) {}

KindMismatch::KindMismatch(const std::string& variable, ValueKind expected, const Literal& given)
    : Error("variable '" + variable + "' expects " + std::string(to_string(expected)) + ", got " +
            format_literal(given)),
      variable_(variable),
      expected_(expected) {}

std::vector<RequiredBinding> required_bindings(const Net& net) { return required_of(net); }

std::string listing(const Diagram& diagram, const Catalog& catalog) {
  return ListingWriter(diagram, catalog).run();
}

CommandTemplate generate(const Diagram& diagram, const Catalog& catalog) {
  CommandTemplate out;
  out.net_skeleton = compile(diagram, catalog);
  out.required_bindings = required_of(out.net_skeleton);
  out.listing = listing(diagram, catalog);
  return out;
}

Net instantiate(const CommandTemplate& tmpl, const BindingSet& bindings) {
  std::vector<std::string> missing;
  for (const auto& r : tmpl.required_bindings) {
    auto it = bindings.find(r.name);
    if (it == bindings.end()) {
      missing.push_back(r.name);
    } else if (!literal_fits(it->second, r.kind)) {
      throw KindMismatch(r.name, r.kind, it->second);
    }
  }
  if (!missing.empty()) throw MissingBinding(std::move(missing));
  for (const auto& [name, _] : bindings) {
    const bool known = std::any_of(tmpl.required_bindings.begin(), tmpl.required_bindings.end(),
                                   [&](const RequiredBinding& r) { return r.name == name; });
    if (!known) throw Error("template has no variable '" + name + "'");
  }
  Net net = tmpl.net_skeleton;
  each_value(net, [&](NetValue& v) { fill_slots(v, bindings); });
  derive_channels(net);
  return net;
}

Diagram substitute(const Diagram& diagram, const BindingSet& bindings) {
  Diagram out = diagram;
  for (auto& cmd : out.commands) substitute_command(cmd, bindings);
  return out;
}

std::string template_to_json(const CommandTemplate& tmpl) {
  ordered_json j;
  ordered_json required = ordered_json::array();
  for (const auto& r : tmpl.required_bindings) {
    required.push_back({{"name", r.name}, {"kind", std::string(to_string(r.kind))}});
  }
  j["required_bindings"] = std::move(required);
  j["net_skeleton"] = ordered_json::parse(net_to_json(tmpl.net_skeleton));
  return j.dump(2) + "\n";
}

CommandTemplate template_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(std::string("template: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("required_bindings") || !j.contains("net_skeleton")) {
    throw Error("template: needs 'required_bindings' and 'net_skeleton'");
  }
  CommandTemplate out;
  out.net_skeleton = net_from_json(j.at("net_skeleton").dump());
  try {
    for (const auto& r : j.at("required_bindings")) {
      auto kind = parse_value_kind(r.at("kind").get<std::string>());
      if (!kind) throw Error("template: unknown kind " + r.at("kind").dump());
      out.required_bindings.push_back({r.at("name").get<std::string>(), *kind});
    }
  } catch (const ordered_json::exception& e) {
    throw Error(std::string("template: malformed required_bindings: ") + e.what());
  }
  return out;
}

Literal parse_binding_value(const std::string& variable, std::string_view text, ValueKind kind) {
  auto fail = [&]() -> Literal { throw KindMismatch(variable, kind, std::string(text)); };
  auto parse_int = [&](std::int64_t& out) {
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && p == text.data() + text.size();
  };
  switch (kind) {
    case ValueKind::Bool:
      if (text == "true") return true;
      if (text == "false") return false;
      return fail();
    case ValueKind::Int: {
      std::int64_t v = 0;
      if (parse_int(v)) return v;
      return fail();
    }
    case ValueKind::Real: {
      std::int64_t i = 0;
      if (parse_int(i)) return static_cast<double>(i);
      try {
        std::size_t used = 0;
        const std::string s(text);
        const double d = std::stod(s, &used);
        if (used == s.size()) return d;
      } catch (const std::exception&) {
      }
      return fail();
    }
    case ValueKind::String:
    case ValueKind::Frame: {
      std::string s(text);
      if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
      return s;
    }
    default:
      return fail();
  }
}

}  // namespace gsr
