#include "gsr/catalog.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>

#include <json.hpp>

namespace gsr {

namespace detail {
std::string_view default_catalog_text();
}

namespace {

using json = nlohmann::json;

constexpr std::array<std::pair<std::string_view, ValueKind>, 8> kValueKinds{{
    {"bool", ValueKind::Bool},
    {"int", ValueKind::Int},
    {"real", ValueKind::Real},
    {"string", ValueKind::String},
    {"frame", ValueKind::Frame},
    {"real_sensor", ValueKind::RealSensor},
    {"bool_sensor", ValueKind::BoolSensor},
    {"state", ValueKind::State},
}};

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid catalog";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

/// Collects schema problems while walking the document.
class Loader {
 public:
  std::vector<std::string> problems;

  void fail(const std::string& path, const std::string& message) {
    problems.push_back(path + ": " + message);
  }

  const json* object_member(const json& parent, const std::string& path, const char* key,
                            bool required) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (required) fail(path, std::string("missing member '") + key + "'");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string_at(const json& value, const std::string& path) {
    if (!value.is_string()) {
      fail(path, "expected a string");
      return std::nullopt;
    }
    return value.get<std::string>();
  }

  std::optional<ValueKind> kind_at(const json& value, const std::string& path) {
    auto text = string_at(value, path);
    if (!text) return std::nullopt;
    auto kind = parse_value_kind(*text);
    if (!kind) fail(path, "unknown value kind '" + *text + "'");
    return kind;
  }

  std::optional<Literal> literal_at(const json& value, const std::string& path) {
    if (value.is_boolean()) return Literal{value.get<bool>()};
    if (value.is_number_integer()) return Literal{value.get<std::int64_t>()};
    if (value.is_number_float()) return Literal{value.get<double>()};
    if (value.is_string()) return Literal{value.get<std::string>()};
    fail(path, "expected a literal");
    return std::nullopt;
  }

  std::vector<StateKind> state_kinds(const json* list, const std::string& path) {
    std::vector<StateKind> out;
    if (!list) return out;
    if (!list->is_array()) {
      fail(path, "expected an array");
      return out;
    }
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string item_path = path + "/" + std::to_string(i);
      auto text = string_at((*list)[i], item_path);
      if (!text) continue;
      auto kind = parse_state_kind(*text);
      if (!kind) {
        fail(item_path, "unknown state kind '" + *text + "'");
        continue;
      }
      out.push_back(*kind);
    }
    return out;
  }

  std::vector<std::string> strings(const json* list, const std::string& path) {
    std::vector<std::string> out;
    if (!list) return out;
    if (!list->is_array()) {
      fail(path, "expected an array");
      return out;
    }
    for (std::size_t i = 0; i < list->size(); ++i) {
      if (auto s = string_at((*list)[i], path + "/" + std::to_string(i))) out.push_back(*s);
    }
    return out;
  }

  std::vector<ParamSpec> params(const json* list, const std::string& path) {
    std::vector<ParamSpec> out;
    if (!list) return out;
    if (!list->is_array()) {
      fail(path, "expected an array");
      return out;
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string item_path = path + "/" + std::to_string(i);
      const json& item = (*list)[i];
      if (!item.is_object()) {
        fail(item_path, "expected an object");
        continue;
      }
      ParamSpec spec;
      if (const auto* name = object_member(item, item_path, "name", true)) {
        if (auto s = string_at(*name, item_path + "/name")) spec.name = *s;
      }
      if (const auto* kind = object_member(item, item_path, "kind", true)) {
        if (auto k = kind_at(*kind, item_path + "/kind")) spec.kind = *k;
      }
      if (const auto* required = object_member(item, item_path, "required", false)) {
        if (required->is_boolean()) {
          spec.required = required->get<bool>();
        } else {
          fail(item_path + "/required", "expected a boolean");
        }
      }
      if (const auto* def = object_member(item, item_path, "default", false)) {
        spec.default_value = literal_at(*def, item_path + "/default");
        if (spec.default_value && !literal_fits(*spec.default_value, spec.kind)) {
          fail(item_path + "/default", "default does not match kind " +
                                           std::string(to_string(spec.kind)));
        }
      }
      if (!spec.name.empty() && !seen.insert(spec.name).second) {
        fail(item_path + "/name", "duplicate parameter '" + spec.name + "'");
      }
      out.push_back(std::move(spec));
    }
    return out;
  }

  template <typename F>
  void each_entry(const json& doc, const char* key, F&& fn) {
    auto it = doc.find(key);
    if (it == doc.end()) return;
    const std::string path = std::string("/") + key;
    if (!it->is_object()) {
      fail(path, "expected an object");
      return;
    }
    for (auto entry = it->begin(); entry != it->end(); ++entry) {
      const std::string entry_path = path + "/" + entry.key();
      if (!entry->is_object()) {
        fail(entry_path, "expected an object");
        continue;
      }
      fn(entry.key(), *entry, entry_path);
    }
  }
};

}  // namespace

std::string_view to_string(ValueKind kind) {
  for (const auto& [name, v] : kValueKinds) {
    if (v == kind) return name;
  }
  return "?";
}

std::optional<ValueKind> parse_value_kind(std::string_view text) {
  for (const auto& [name, v] : kValueKinds) {
    if (name == text) return v;
  }
  return std::nullopt;
}

bool literal_fits(const Literal& literal, ValueKind kind) {
  switch (kind) {
    case ValueKind::Bool:
      return std::holds_alternative<bool>(literal);
    case ValueKind::Int:
      return std::holds_alternative<std::int64_t>(literal);
    case ValueKind::Real:
      return std::holds_alternative<std::int64_t>(literal) || std::holds_alternative<double>(literal);
    case ValueKind::String:
    case ValueKind::Frame:
      return std::holds_alternative<std::string>(literal);
    default:
      return false;
  }
}

const ParamSpec* ActionType::param(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

CatalogError::CatalogError(std::vector<std::string> problems)
    : Error(join_problems(problems)), problems_(std::move(problems)) {}

const DeviceType* Catalog::device(std::string_view name) const {
  auto it = devices_.find(name);
  return it == devices_.end() ? nullptr : &it->second;
}
const SensorType* Catalog::sensor(std::string_view name) const {
  auto it = sensors_.find(name);
  return it == sensors_.end() ? nullptr : &it->second;
}
const ActionType* Catalog::action(std::string_view name) const {
  auto it = actions_.find(name);
  return it == actions_.end() ? nullptr : &it->second;
}
const Factory* Catalog::factory(std::string_view name) const {
  auto it = factories_.find(name);
  return it == factories_.end() ? nullptr : &it->second;
}

Catalog load_catalog(std::string_view document) {
  Catalog catalog;
  if (std::all_of(document.begin(), document.end(),
                  [](char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; })) {
    return catalog;
  }
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw CatalogError({std::string("/: malformed JSON: ") + e.what()});
  }
  if (!doc.is_object()) throw CatalogError({"/: expected an object"});

  Loader load;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const std::set<std::string> known{"device_types", "sensor_types", "action_types",
                                             "factories"};
    if (!known.count(it.key())) load.fail("/" + it.key(), "unknown member");
  }

  load.each_entry(doc, "sensor_types", [&](const std::string& name, const json& entry,
                                           const std::string& path) {
    SensorType type;
    type.name = name;
    if (const auto* kind = load.object_member(entry, path, "kind", true)) {
      if (auto k = load.kind_at(*kind, path + "/kind")) {
        if (*k != ValueKind::Bool && *k != ValueKind::Real) {
          load.fail(path + "/kind", "sensor kind must be bool or real");
        }
        type.kind = *k;
      }
    }
    if (const auto* standalone = load.object_member(entry, path, "standalone", false)) {
      type.standalone = standalone->is_boolean() && standalone->get<bool>();
    }
    catalog.sensors_.emplace(name, std::move(type));
  });

  load.each_entry(doc, "device_types", [&](const std::string& name, const json& entry,
                                           const std::string& path) {
    DeviceType type;
    type.name = name;
    type.config = load.params(load.object_member(entry, path, "config", false), path + "/config");
    type.states = load.state_kinds(load.object_member(entry, path, "states", false), path + "/states");
    for (StateKind kind : type.states) {
      if (kind != StateKind::ActuatorError) {
        load.fail(path + "/states", "devices may only provide ActuatorError");
      }
    }
    if (const auto* sensors = load.object_member(entry, path, "sensors", false)) {
      if (!sensors->is_array()) {
        load.fail(path + "/sensors", "expected an array");
      } else {
        for (std::size_t i = 0; i < sensors->size(); ++i) {
          const std::string item_path = path + "/sensors/" + std::to_string(i);
          const json& item = (*sensors)[i];
          SensorOffer offer;
          if (!item.is_object()) {
            load.fail(item_path, "expected an object");
            continue;
          }
          if (const auto* f = load.object_member(item, item_path, "factory", true)) {
            if (auto s = load.string_at(*f, item_path + "/factory")) offer.factory = *s;
          }
          if (const auto* t = load.object_member(item, item_path, "type", true)) {
            if (auto s = load.string_at(*t, item_path + "/type")) offer.sensor_type = *s;
          }
          if (!offer.sensor_type.empty() && !catalog.sensor(offer.sensor_type)) {
            load.fail(item_path + "/type", "unknown sensor type '" + offer.sensor_type + "'");
          }
          type.sensors.push_back(std::move(offer));
        }
      }
    }
    catalog.devices_.emplace(name, std::move(type));
  });

  load.each_entry(doc, "action_types", [&](const std::string& name, const json& entry,
                                           const std::string& path) {
    ActionType type;
    type.name = name;
    type.devices = load.strings(load.object_member(entry, path, "devices", false), path + "/devices");
    for (std::size_t i = 0; i < type.devices.size(); ++i) {
      if (!catalog.device(type.devices[i])) {
        load.fail(path + "/devices/" + std::to_string(i),
                  "unknown device type '" + type.devices[i] + "'");
      }
    }
    type.params = load.params(load.object_member(entry, path, "params", false), path + "/params");
    type.provides =
        load.state_kinds(load.object_member(entry, path, "provides", false), path + "/provides");
    for (StateKind kind : type.provides) {
      if (kind != StateKind::ActionProgressAtLeast) {
        load.fail(path + "/provides", "actions may only provide ActionProgressAtLeast");
      }
    }
    auto int_param = [&](const char* key) -> std::optional<std::string> {
      const auto* member = load.object_member(entry, path, key, false);
      if (!member) return std::nullopt;
      auto s = load.string_at(*member, path + "/" + key);
      if (!s) return std::nullopt;
      const ParamSpec* spec = type.param(*s);
      if (!spec || spec->kind != ValueKind::Int) {
        load.fail(path + "/" + key, "'" + *s + "' is not an int parameter of " + name);
      }
      return s;
    };
    type.duration_param = int_param("duration_param");
    type.brake_param = int_param("brake_param");
    if (const auto* output = load.object_member(entry, path, "output", false)) {
      const std::string opath = path + "/output";
      ActionType::Output out;
      if (const auto* c = load.object_member(*output, opath, "channel_param", true)) {
        if (auto s = load.string_at(*c, opath + "/channel_param")) out.channel_param = *s;
      }
      if (const auto* v = load.object_member(*output, opath, "value_param", true)) {
        if (auto s = load.string_at(*v, opath + "/value_param")) out.value_param = *s;
      }
      if (!type.param(out.channel_param)) load.fail(opath + "/channel_param", "unknown parameter");
      if (!type.param(out.value_param)) load.fail(opath + "/value_param", "unknown parameter");
      type.output = std::move(out);
    }
    catalog.actions_.emplace(name, std::move(type));
  });

  load.each_entry(doc, "factories", [&](const std::string& name, const json& entry,
                                        const std::string& path) {
    Factory factory;
    factory.name = name;
    factory.owners = load.strings(load.object_member(entry, path, "owners", false), path + "/owners");
    for (std::size_t i = 0; i < factory.owners.size(); ++i) {
      const auto& owner = factory.owners[i];
      if (owner != "real_sensor" && owner != "bool_sensor" && !catalog.device(owner) &&
          !catalog.action(owner) && !catalog.sensor(owner)) {
        load.fail(path + "/owners/" + std::to_string(i), "unknown owner type '" + owner + "'");
      }
    }
    if (const auto* s = load.object_member(entry, path, "static", false)) {
      factory.is_static = s->is_boolean() && s->get<bool>();
    }
    if (const auto* args = load.object_member(entry, path, "args", false)) {
      if (!args->is_array()) {
        load.fail(path + "/args", "expected an array");
      } else {
        for (std::size_t i = 0; i < args->size(); ++i) {
          if (auto k = load.kind_at((*args)[i], path + "/args/" + std::to_string(i))) {
            factory.args.push_back(*k);
          }
        }
      }
    }
    if (const auto* ret = load.object_member(entry, path, "returns", true)) {
      if (auto k = load.kind_at(*ret, path + "/returns")) factory.returns = *k;
    }
    catalog.factories_.emplace(name, std::move(factory));
  });

  if (!load.problems.empty()) throw CatalogError(std::move(load.problems));
  return catalog;
}

std::string_view builtin_catalog_text() { return detail::default_catalog_text(); }

const Catalog& builtin_catalog() {
  static const Catalog catalog = load_catalog(builtin_catalog_text());
  return catalog;
}

// ---------------------------------------------------------------------------
// suggest
// ---------------------------------------------------------------------------

std::vector<Suggestion> suggest(const Catalog& catalog, ValueKind needed, const Diagram& context) {
  // Entities of the diagram with the type names they answer to.
  struct Entity {
    std::string id;
    std::vector<std::string> types;
  };
  std::vector<Entity> entities;
  auto sensor_entity = [&](const Sensor& sensor) {
    Entity e{sensor.id, {sensor.sensor_type}};
    if (const auto* type = catalog.sensor(sensor.sensor_type)) {
      e.types.push_back(type->kind == ValueKind::Bool ? "bool_sensor" : "real_sensor");
    }
    entities.push_back(std::move(e));
  };
  for (const auto& sensor : context.top_sensors) sensor_entity(sensor);
  std::function<void(const Command&)> walk = [&](const Command& command) {
    if (const auto* runtime = std::get_if<RuntimeCommand>(&command.node)) {
      for (const auto& actuator : runtime->actuators) {
        entities.push_back({actuator.id, {actuator.device_type}});
        for (const auto& sensor : actuator.sensors) sensor_entity(sensor);
      }
      for (const auto& action : runtime->actions) {
        entities.push_back({action.id, {action.action_type}});
      }
    } else if (const auto* tx = std::get_if<TransactionCommand>(&command.node)) {
      for (const auto& child : tx->children) walk(child);
    }
  };
  for (const auto& command : context.commands) walk(command);

  std::set<std::string> present_types;
  for (const auto& e : entities) present_types.insert(e.types.begin(), e.types.end());

  auto signature = [&](const Factory& f) {
    std::string args;
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      if (i) args += ", ";
      args += to_string(f.args[i]);
    }
    return f.name + "(" + args + ")";
  };

  std::vector<Suggestion> out;
  for (const auto& [name, factory] : catalog.factories()) {
    if (factory.returns != needed) continue;
    if (factory.owners.empty()) {
      out.push_back({name, "", Suggestion::Tier::Global, signature(factory)});
      continue;
    }
    if (factory.is_static) {
      for (const auto& owner : factory.owners) {
        if (present_types.count(owner)) {
          out.push_back({name, owner, Suggestion::Tier::Type, owner + "." + signature(factory)});
        }
      }
      continue;
    }
    for (const auto& entity : entities) {
      const bool matches = std::any_of(entity.types.begin(), entity.types.end(), [&](const auto& t) {
        return std::find(factory.owners.begin(), factory.owners.end(), t) != factory.owners.end();
      });
      if (matches) {
        out.push_back({name, entity.id, Suggestion::Tier::Entity,
                       entity.id + "." + signature(factory)});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Suggestion& a, const Suggestion& b) {
    if (a.tier != b.tier) return a.tier < b.tier;
    return a.display < b.display;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace gsr
