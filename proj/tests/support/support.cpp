#include "support.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gsr::testing {

namespace fs = std::filesystem;

std::string corpus_path(const std::string& relative) {
  return (fs::path(GSR_CORPUS_DIR) / relative).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Diagram load_diagram(const std::string& path) {
  auto parsed = parse(read_file(path), path);
  if (!parsed.ok()) {
    std::string text = "cannot parse " + path + ":";
    for (const auto& d : parsed.diagnostics) text += "\n  " + format_diagnostic(d);
    throw Error(text);
  }
  return std::move(*parsed.diagram);
}

std::vector<std::string> corpus_files(const std::string& sub, const std::string& ext) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(corpus_path(sub))) {
    if (entry.path().extension() == ext) names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::set<std::string> error_codes(const std::string& path) {
  std::set<std::string> codes;
  auto parsed = parse(read_file(path), path);
  auto diags = parsed.diagnostics;
  if (parsed.ok()) diags = validate(*parsed.diagram, builtin_catalog(), parsed.spans).diagnostics;
  for (const auto& d : diags) {
    if (d.severity == Severity::Error) codes.insert(d.code);
  }
  return codes;
}

std::string expected_code(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string first;
  std::getline(in, first);
  const std::string marker = "// expect: ";
  if (first.rfind(marker, 0) != 0) throw Error(path + ": missing '// expect:' line");
  return first.substr(marker.size());
}

std::vector<GoldenRun> golden_runs() {
  const auto j = nlohmann::json::parse(read_file(corpus_path("golden/manifest.json")));
  std::vector<GoldenRun> runs;
  for (const auto& r : j.at("runs")) {
    GoldenRun run;
    run.diagram = r.at("diagram").get<std::string>();
    run.script = r.at("script").get<std::string>();
    run.golden = r.at("golden").get<std::string>();
    for (const auto& [k, v] : r.at("bindings").items()) run.bindings[k] = v.get<std::string>();
    runs.push_back(std::move(run));
  }
  return runs;
}

BindingSet bind_text(const std::vector<RequiredBinding>& required,
                     const std::map<std::string, std::string>& values) {
  BindingSet out;
  for (const auto& [name, text] : values) {
    auto it = std::find_if(required.begin(), required.end(),
                           [&](const RequiredBinding& r) { return r.name == name; });
    if (it == required.end()) throw Error("no variable named '" + name + "'");
    out[name] = parse_binding_value(name, text, it->kind);
  }
  return out;
}

std::string replay(const GoldenRun& run) {
  const auto& catalog = builtin_catalog();
  const auto diagram = load_diagram(corpus_path(run.diagram));
  auto tmpl = generate(diagram, catalog);
  const Net net = instantiate(tmpl, bind_text(tmpl.required_bindings, run.bindings));
  const auto script = script_from_json(read_file(corpus_path(run.script)));
  return trace_to_jsonl(gsr::run(net, script));
}

namespace {

int pick(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool coin(std::mt19937& rng, double p = 0.5) {
  return std::bernoulli_distribution(p)(rng);
}

template <typename T>
const T& choose(std::mt19937& rng, const std::vector<T>& items) {
  return items.at(static_cast<std::size_t>(pick(rng, 0, static_cast<int>(items.size()) - 1)));
}

std::vector<ScriptSegment> random_bool_series(std::mt19937& rng, std::int64_t ticks) {
  std::vector<ScriptSegment> series{{0, Literal{coin(rng)}}};
  for (std::int64_t t = 1; t < ticks; ++t) {
    if (coin(rng, 0.2)) series.push_back({t, Literal{!std::get<bool>(series.back().value)}});
  }
  return series;
}

void throw_if_invalid(const Diagram& d) {
  auto report = validate(d, builtin_catalog());
  if (report.is_valid()) return;
  std::string text = "generator produced an invalid diagram:";
  for (const auto& diag : report.diagnostics) text += "\n  " + format_diagnostic(diag);
  text += "\n" + print(d);
  throw Error(text);
}

}  // namespace

LogicCase random_logic_case(std::mt19937& rng) {
  LogicCase c;
  c.diagram.name = "Logic";
  c.script.ticks = pick(rng, 1, 40);
  const int n_inputs = pick(rng, 1, 3);
  const int n_ops = pick(rng, 1, 3);

  std::vector<std::string> states;
  for (int i = 0; i < n_inputs; ++i) {
    const std::string sensor = "in" + std::to_string(i);
    const std::string channel = "in." + std::to_string(i);
    c.diagram.top_sensors.push_back({sensor, "DigitalInput", channel});
    c.diagram.states.push_back({"x" + std::to_string(i), sensor, StateKind::SensorTrue, 0.0});
    c.inputs.push_back("x" + std::to_string(i));
    states.push_back(c.inputs.back());
    c.script.channels[channel] = random_bool_series(rng, c.script.ticks);
  }
  for (int i = 0; i < n_ops; ++i) {
    LogicalState l;
    l.id = "l" + std::to_string(i);
    l.op = static_cast<LogicOp>(pick(rng, 0, 3));
    const int arity = (l.op == LogicOp::And || l.op == LogicOp::Or) ? pick(rng, 2, 3) : 1;
    for (int k = 0; k < arity; ++k) l.inputs.push_back(choose(rng, states));
    states.push_back(l.id);
    c.diagram.logical_states.push_back(std::move(l));
  }
  // Logical states are declared in a random order; the compiler must sort
  // them by dependency.
  std::shuffle(c.diagram.logical_states.begin(), c.diagram.logical_states.end(), rng);

  c.diagram.commands.push_back(Command{WaitCommand{"keep", 1000, {}}});
  c.diagram.starters.push_back({"entry", {"keep"}});
  throw_if_invalid(c.diagram);
  return c;
}

std::vector<std::map<std::string, bool>> logic_oracle(const LogicCase& c) {
  std::map<std::string, const LogicalState*> logical;
  for (const auto& l : c.diagram.logical_states) logical[l.id] = &l;
  std::map<std::string, std::string> channel_of;
  for (std::size_t i = 0; i < c.inputs.size(); ++i) channel_of[c.inputs[i]] = "in." + std::to_string(i);

  std::vector<std::map<std::string, bool>> out;
  std::map<std::string, bool> ever;
  for (std::int64_t t = 0; t < c.script.ticks; ++t) {
    std::map<std::string, bool> now;
    for (const auto& [state, channel] : channel_of) {
      bool v = false;
      for (const auto& seg : c.script.channels.at(channel)) {
        if (seg.from_tick <= t) v = std::get<bool>(seg.value);
      }
      now[state] = v;
    }
    // Fixed-point over the declaration list; inputs are acyclic by construction.
    std::map<std::string, bool> row;
    for (std::size_t pass = 0; pass <= logical.size(); ++pass) {
      for (const auto& [id, l] : logical) {
        bool ready = true;
        for (const auto& in : l->inputs) ready = ready && now.count(in);
        if (!ready || now.count(id)) continue;
        bool v = false;
        switch (l->op) {
          case LogicOp::And:
            v = true;
            for (const auto& in : l->inputs) v = v && now[in];
            break;
          case LogicOp::Or:
            for (const auto& in : l->inputs) v = v || now[in];
            break;
          case LogicOp::Not: v = !now[l->inputs[0]]; break;
          case LogicOp::Ever: v = ever[id] || now[l->inputs[0]]; break;
        }
        ever[id] = v;
        now[id] = v;
        row[id] = v;
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

struct TreeBuilder {
  std::mt19937& rng;
  int next_id = 0;
  std::vector<std::string> all;  // every command id
  std::map<std::string, std::vector<std::string>> children;  // transactions only
  std::map<std::string, std::vector<std::string>> below;  // proper descendants

  Command make(int depth) {
    const std::string id = "c" + std::to_string(next_id++);
    all.push_back(id);
    if (depth >= 2 || coin(rng, 0.55)) return Command{WaitCommand{id, pick(rng, 1, 12), {}}};
    TransactionCommand t;
    t.id = id;
    const int n = pick(rng, 1, 3);
    for (int i = 0; i < n; ++i) {
      t.children.push_back(make(depth + 1));
      const std::string& child = t.children.back().id();
      children[id].push_back(child);
      below[id].push_back(child);
      for (const auto& d : below[child]) below[id].push_back(d);
    }
    return Command{std::move(t)};
  }
};

TransactionCommand* find_transaction(std::vector<Command>& commands, const std::string& id) {
  for (auto& c : commands) {
    if (auto* t = std::get_if<TransactionCommand>(&c.node)) {
      if (t->id == id) return t;
      if (auto* found = find_transaction(t->children, id)) return found;
    }
  }
  return nullptr;
}

}  // namespace

EffectCase random_effect_case(std::mt19937& rng) {
  EffectCase c;
  Diagram& d = c.diagram;
  d.name = "Rand";
  c.script.ticks = 60;

  TreeBuilder tree{rng, 0, {}, {}, {}};
  std::vector<std::string> top;
  const int n_top = pick(rng, 1, 3);
  for (int i = 0; i < n_top; ++i) {
    d.commands.push_back(tree.make(0));
    top.push_back(d.commands.back().id());
  }

  std::vector<std::string> states;
  const int n_sensors = pick(rng, 0, 2);
  for (int i = 0; i < n_sensors; ++i) {
    const std::string sensor = "s" + std::to_string(i);
    const std::string channel = "in." + sensor;
    d.top_sensors.push_back({sensor, "DigitalInput", channel});
    d.states.push_back({sensor + "On", sensor, StateKind::SensorTrue, 0.0});
    states.push_back(sensor + "On");
    c.script.channels[channel] = random_bool_series(rng, c.script.ticks);
  }

  std::set<std::pair<std::string, int>> declared;
  const StateKind kinds[] = {StateKind::CommandStarted, StateKind::CommandCompleted,
                             StateKind::CommandCancelled};
  const int n_command_states = pick(rng, 1, 5);
  for (int i = 0; i < n_command_states; ++i) {
    const std::string& owner = choose(rng, tree.all);
    const int k = pick(rng, 0, 2);
    if (!declared.insert({owner, k}).second) continue;
    const std::string id = "st" + std::to_string(i);
    d.states.push_back({id, owner, kinds[k], 0.0});
    states.push_back(id);
  }

  std::map<std::string, std::string> raised;  // transaction -> raised state
  for (const auto& [t, kids] : tree.children) {
    if (!coin(rng, 0.4)) continue;
    const std::string id = "r" + t;
    find_transaction(d.commands, t)->states.push_back({id, t, StateKind::Raised, 0.0});
    raised[t] = id;
    states.push_back(id);
  }

  const int n_logical = states.size() >= 2 ? pick(rng, 0, 2) : 0;
  for (int i = 0; i < n_logical; ++i) {
    LogicalState l;
    l.id = "lg" + std::to_string(i);
    l.op = static_cast<LogicOp>(pick(rng, 0, 3));
    const int arity = (l.op == LogicOp::And || l.op == LogicOp::Or) ? 2 : 1;
    for (int k = 0; k < arity; ++k) l.inputs.push_back(choose(rng, states));
    states.push_back(l.id);
    d.logical_states.push_back(std::move(l));
  }

  for (const auto& [t, kids] : tree.children) {
    auto* cmd = find_transaction(d.commands, t);
    for (const auto& child : kids) {
      if (!coin(rng, 0.6)) continue;
      AutoStart a{child, std::nullopt};
      if (coin(rng, 0.25)) a.guard = choose(rng, states);
      cmd->auto_start.push_back(std::move(a));
    }
  }

  std::vector<std::string> scopes{d.name};
  for (const auto& [t, kids] : tree.children) scopes.push_back(t);
  const int n_handlers = pick(rng, 2, 6);
  for (int i = 0; i < n_handlers; ++i) {
    EventHandler h;
    h.id = "h" + std::to_string(i);
    h.scope = choose(rng, scopes);
    h.source = choose(rng, states);
    h.trigger = static_cast<Trigger>(pick(rng, 0, 3));
    const bool root = h.scope == d.name;
    const auto& kids = root ? top : tree.children.at(h.scope);
    std::vector<std::string> reach{h.scope};
    for (const auto& x : root ? tree.all : tree.below.at(h.scope)) reach.push_back(x);
    switch (pick(rng, 0, 4)) {
      case 0: h.effect = {EffectKind::Start, choose(rng, kids)}; break;
      case 1: h.effect = {EffectKind::Stop, choose(rng, reach)}; break;
      case 2: h.effect = {EffectKind::Cancel, choose(rng, reach)}; break;
      case 3:
        if (raised.count(h.scope)) {
          h.effect = {EffectKind::Raise, raised.at(h.scope)};
          break;
        }
        [[fallthrough]];
      default: h.effect = {EffectKind::External, "x" + std::to_string(i)}; break;
    }
    d.handlers.push_back(std::move(h));
  }

  Starter s{"entry", {}};
  for (const auto& t : top) {
    if (s.targets.empty() || coin(rng)) s.targets.push_back(t);
  }
  d.starters.push_back(std::move(s));
  throw_if_invalid(d);
  return c;
}

namespace {

void collect(const Command& c, std::set<std::string>& out) {
  out.insert(c.id());
  if (const auto* t = std::get_if<TransactionCommand>(&c.node)) {
    for (const auto& child : t->children) collect(child, out);
  }
}

bool find_subtree(const Command& c, const std::string& id, std::set<std::string>& out) {
  if (c.id() == id) {
    collect(c, out);
    return true;
  }
  if (const auto* t = std::get_if<TransactionCommand>(&c.node)) {
    for (const auto& child : t->children) {
      if (find_subtree(child, id, out)) return true;
    }
  }
  return false;
}

}  // namespace

std::set<std::string> subtree(const Diagram& diagram, const std::string& command) {
  std::set<std::string> out;
  if (command == diagram.name) {
    out.insert(diagram.name);
    for (const auto& c : diagram.commands) collect(c, out);
    return out;
  }
  for (const auto& c : diagram.commands) {
    if (find_subtree(c, command, out)) break;
  }
  return out;
}

}  // namespace gsr::testing
