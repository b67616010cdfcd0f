#include "gsr/sim.hpp"
#include "json_util.hpp"

namespace gsr {

using nlohmann::ordered_json;

std::string trace_to_jsonl(const Trace& trace) {
  std::string out;
  for (const auto& r : trace.records) {
    ordered_json j;
    j["tick"] = r.tick;
    ordered_json edges = ordered_json::array();
    for (const auto& e : r.edges) edges.push_back({{"state", e.state}, {"edge", e.entered ? "entered" : "left"}});
    j["edges"] = std::move(edges);
    ordered_json effects = ordered_json::array();
    for (const auto& e : r.effects) {
      effects.push_back({{"handler", e.handler},
                         {"effect", std::string(to_string(e.effect))},
                         {"target", e.target},
                         {"noop", e.noop}});
    }
    j["effects"] = std::move(effects);
    ordered_json lifecycle = ordered_json::array();
    for (const auto& l : r.lifecycle) {
      lifecycle.push_back({{"command", l.command}, {"status", std::string(to_string(l.status))}});
    }
    j["lifecycle"] = std::move(lifecycle);
    j["externals"] = r.externals;
    ordered_json outputs = ordered_json::array();
    for (const auto& o : r.outputs) {
      outputs.push_back({{"channel", o.channel}, {"value", detail::literal_to_json(o.value)}});
    }
    j["outputs"] = std::move(outputs);
    out += j.dump() + "\n";
  }
  ordered_json end;
  end["end"] = trace.end == EndReason::RootTerminal ? "root_terminal" : "max_ticks";
  end["tick"] = trace.last_tick;
  end["root"] = std::string(to_string(trace.root));
  out += end.dump() + "\n";
  return out;
}

}  // namespace gsr
