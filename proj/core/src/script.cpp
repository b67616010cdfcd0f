#include <algorithm>

#include "gsr/sim.hpp"
#include "json_util.hpp"

namespace gsr {

using nlohmann::ordered_json;

MissingChannel::MissingChannel(const std::string& channel)
    : Error("script has no channel '" + channel + "'"), channel_(channel) {}

const Literal& SensorScript::value_at(const std::string& channel, std::int64_t tick) const {
  auto it = channels.find(channel);
  if (it == channels.end() || it->second.empty()) throw MissingChannel(channel);
  const auto& segments = it->second;
  auto after = std::upper_bound(segments.begin(), segments.end(), tick,
                                [](std::int64_t t, const ScriptSegment& s) { return t < s.from_tick; });
  if (after == segments.begin()) return segments.front().value;
  return std::prev(after)->value;
}

SensorScript script_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(std::string("script: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("script: document must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "ticks" && key != "channels") throw Error("script: unknown member '" + key + "'");
  }
  SensorScript script;
  if (!j.contains("ticks") || !j.at("ticks").is_number_integer() || j.at("ticks").get<std::int64_t>() < 1) {
    throw Error("script: 'ticks' must be a positive integer");
  }
  script.ticks = j.at("ticks").get<std::int64_t>();
  if (!j.contains("channels")) return script;
  if (!j.at("channels").is_object()) throw Error("script: 'channels' must be an object");
  for (const auto& [name, series] : j.at("channels").items()) {
    const std::string where = "script: channel '" + name + "'";
    if (!series.is_array() || series.empty()) throw Error(where + " needs at least one segment");
    std::vector<ScriptSegment> segments;
    for (const auto& seg : series) {
      if (!seg.is_array() || seg.size() != 2 || !seg[0].is_number_integer()) {
        throw Error(where + ": segments are [fromTick, value] pairs");
      }
      ScriptSegment s;
      s.from_tick = seg[0].get<std::int64_t>();
      if (seg[1].is_boolean()) {
        s.value = seg[1].get<bool>();
      } else if (seg[1].is_number()) {
        s.value = seg[1].get<double>();
      } else {
        throw Error(where + ": values must be booleans or numbers");
      }
      if (segments.empty() && s.from_tick != 0) throw Error(where + ": first segment must start at tick 0");
      if (!segments.empty()) {
        if (s.from_tick <= segments.back().from_tick) throw Error(where + ": segment ticks must strictly increase");
        if (s.value.index() != segments.back().value.index()) throw Error(where + ": mixes booleans and numbers");
      }
      segments.push_back(std::move(s));
    }
    script.channels.emplace(name, std::move(segments));
  }
  return script;
}

std::string script_to_json(const SensorScript& script) {
  ordered_json j;
  j["ticks"] = script.ticks;
  ordered_json channels = ordered_json::object();
  for (const auto& [name, segments] : script.channels) {
    ordered_json series = ordered_json::array();
    for (const auto& s : segments) series.push_back({s.from_tick, detail::literal_to_json(s.value)});
    channels[name] = series;
  }
  j["channels"] = channels;
  return j.dump() + "\n";
}

}  // namespace gsr
