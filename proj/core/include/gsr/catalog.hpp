#pragma once

// Capability registry: device, sensor and action types plus the factories
// that can produce parameter values, and a context-aware factory suggester.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsr/model.hpp"

namespace gsr {

enum class ValueKind { Bool, Int, Real, String, Frame, RealSensor, BoolSensor, State };

std::string_view to_string(ValueKind kind);
std::optional<ValueKind> parse_value_kind(std::string_view text);
/// Whether a literal can be used where `kind` is expected (ints widen to real,
/// frames are opaque strings).
bool literal_fits(const Literal& literal, ValueKind kind);

struct ParamSpec {
  std::string name;
  ValueKind kind = ValueKind::String;
  bool required = false;
  std::optional<Literal> default_value;
};

struct SensorOffer {
  std::string factory;
  std::string sensor_type;
};

struct DeviceType {
  std::string name;
  std::vector<SensorOffer> sensors;
  std::vector<StateKind> states;
  std::vector<ParamSpec> config;
};

struct SensorType {
  std::string name;
  ValueKind kind = ValueKind::Real;  // Bool or Real
  bool standalone = false;  // may be declared at diagram level
};

struct ActionType {
  struct Output {
    std::string channel_param;
    std::string value_param;
  };

  std::string name;
  std::vector<std::string> devices;
  std::vector<ParamSpec> params;
  std::vector<StateKind> provides;
  std::optional<std::string> duration_param;  // absent: instantaneous
  std::optional<std::string> brake_param;
  std::optional<Output> output;

  const ParamSpec* param(std::string_view name) const;
};

struct Factory {
  std::string name;
  std::vector<std::string> owners;  // device/action/sensor type or "real_sensor"/"bool_sensor"; empty = global
  bool is_static = false;
  std::vector<ValueKind> args;
  ValueKind returns = ValueKind::State;
};

class CatalogError : public Error {
 public:
  explicit CatalogError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Immutable after loading.
class Catalog {
 public:
  Catalog() = default;

  const DeviceType* device(std::string_view name) const;
  const SensorType* sensor(std::string_view name) const;
  const ActionType* action(std::string_view name) const;
  const Factory* factory(std::string_view name) const;

  const std::map<std::string, DeviceType, std::less<>>& devices() const { return devices_; }
  const std::map<std::string, SensorType, std::less<>>& sensors() const { return sensors_; }
  const std::map<std::string, ActionType, std::less<>>& actions() const { return actions_; }
  const std::map<std::string, Factory, std::less<>>& factories() const { return factories_; }

  bool empty() const {
    return devices_.empty() && sensors_.empty() && actions_.empty() && factories_.empty();
  }

 private:
  friend Catalog load_catalog(std::string_view);

  std::map<std::string, DeviceType, std::less<>> devices_;
  std::map<std::string, SensorType, std::less<>> sensors_;
  std::map<std::string, ActionType, std::less<>> actions_;
  std::map<std::string, Factory, std::less<>> factories_;
};

/// Parses and checks a catalog JSON document. An empty or `{}` document gives
/// an empty catalog. Throws CatalogError listing every problem with its JSON
/// path.
Catalog load_catalog(std::string_view document);

/// The catalog shipped with the library (core/data/default_catalog.json).
const Catalog& builtin_catalog();
std::string_view builtin_catalog_text();

struct Suggestion {
  enum class Tier { Entity = 1, Type = 2, Global = 3 };

  std::string factory;
  std::string receiver;  // entity id (Entity tier), type name (Type tier), empty (Global)
  Tier tier = Tier::Global;
  std::string display;  // e.g. `leftLWR.getForceXSensor()`
  bool operator==(const Suggestion&) const = default;
};

/// Ranks factories returning `needed`: methods on entities present in the
/// diagram first, then type-level factories of types present, then global
/// factories; ties by display text.
std::vector<Suggestion> suggest(const Catalog& catalog, ValueKind needed, const Diagram& context);

}  // namespace gsr
