#include <algorithm>
#include <cmath>

#include "gsr/sim.hpp"

namespace gsr {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Idle: return "Idle";
    case Status::Running: return "Running";
    case Status::Completed: return "Completed";
    case Status::Stopped: return "Stopped";
    case Status::Cancelled: return "Cancelled";
  }
  return "?";
}

namespace {

std::int64_t ticks_of(const NetValue& v, const std::string& what) {
  if (const auto* lit = std::get_if<Literal>(&v.value)) {
    if (const auto* i = std::get_if<std::int64_t>(lit); i && *i >= 0) return *i;
    if (const auto* d = std::get_if<double>(lit); d && *d >= 0 && std::floor(*d) == *d) {
      return static_cast<std::int64_t>(*d);
    }
  }
  throw Error(what + " must be a non-negative integer, got " + v.text());
}

}  // namespace

Simulator::Simulator(const Net& net, const SensorScript& script, SimConfig config)
    : net_(net), script_(&script), stop_on_root_(config.stop_on_root_terminal) {
  check_net(net_);
  if (!net_.is_concrete()) throw Error("net has unbound variables; instantiate it first");
  for (const auto& channel : net_.channels) {
    if (channel.direction != ChannelDirection::Input) continue;
    auto it = script.channels.find(channel.name);
    if (it == script.channels.end()) throw MissingChannel(channel.name);
    const bool want_bool = channel.kind == ValueKind::Bool;
    for (const auto& seg : it->second) {
      if (std::holds_alternative<bool>(seg.value) != want_bool) {
        throw Error("script channel '" + channel.name + "' must carry " + (want_bool ? "booleans" : "numbers"));
      }
    }
  }
  max_ticks_ = config.max_ticks.value_or(script.ticks);
  if (max_ticks_ < 1) throw Error("max_ticks must be at least 1");

  commands_.resize(net_.lifecycle.size());
  for (std::size_t i = 0; i < commands_.size(); ++i) {
    const auto& node = net_.lifecycle[i];
    if (node.kind != NodeKind::Transaction) {
      commands_[i].duration = ticks_of(node.duration, node.id + " duration");
      commands_[i].brake = ticks_of(node.brake, node.id + " brake time");
    }
  }
  previous_.assign(net_.states.size(), false);
  current_.assign(net_.states.size(), false);
  first_latch_.assign(net_.handlers.size(), false);

  init_.tick = 0;
  start(0, true, init_);
}

bool Simulator::child_running(std::size_t command) const {
  const auto& children = net_.lifecycle[command].children;
  return std::any_of(children.begin(), children.end(), [&](int c) {
    return commands_[static_cast<std::size_t>(c)].pub.status == Status::Running;
  });
}

// Also starts the unguarded auto-starts; the root's auto-starts are the start set.
void Simulator::start(std::size_t command, bool at_init, TickRecord& record) {
  Command& c = commands_[command];
  const auto& node = net_.lifecycle[command];
  c.pub.status = Status::Running;
  c.pub.started_at = tick_;
  c.started = true;
  c.visible_from = at_init ? tick_ : tick_ + 1;
  c.elapsed = 0;
  record.lifecycle.push_back({node.id, Status::Running});
  if (node.parent >= 0) commands_[static_cast<std::size_t>(node.parent)].child_started = true;
  if (node.kind != NodeKind::Transaction) return;

  std::vector<NetAutoStart> autos = node.auto_start;
  if (command == 0) {
    autos.clear();
    for (int s : net_.start_set) autos.push_back({s, -1});
  }
  c.pending.clear();
  for (std::size_t i = 0; i < autos.size(); ++i) {
    if (autos[i].guard >= 0) {
      c.pending.push_back(i);
      continue;
    }
    const auto child = static_cast<std::size_t>(autos[i].child);
    if (commands_[child].pub.status == Status::Idle) start(child, at_init, record);
  }
}

void Simulator::stop(std::size_t command, TickRecord& record) {
  Command& c = commands_[command];
  if (!is_terminal(c.pub.status)) {
    c.pub.status = Status::Stopped;
    c.pub.ended_at = tick_;
    c.pending.clear();
    record.lifecycle.push_back({net_.lifecycle[command].id, Status::Stopped});
  }
  for (int child : net_.lifecycle[command].children) stop(static_cast<std::size_t>(child), record);
}

void Simulator::cancel(std::size_t command) {
  Command& c = commands_[command];
  c.pub.cancel_requested = true;
  c.cancel_at = tick_;
  c.pending.clear();
  if (net_.lifecycle[command].kind != NodeKind::Transaction) return;
  for (int child : net_.lifecycle[command].children) {
    const auto& cc = commands_[static_cast<std::size_t>(child)];
    if (cc.pub.status == Status::Running && !cc.pub.cancel_requested) cancel(static_cast<std::size_t>(child));
  }
}

void Simulator::finish(std::size_t command, Status status, TickRecord& record) {
  Command& c = commands_[command];
  c.pub.status = status;
  c.pub.ended_at = tick_;
  record.lifecycle.push_back({net_.lifecycle[command].id, status});
}

void Simulator::sample() {
  sampled_.clear();
  for (const auto& channel : net_.channels) {
    if (channel.direction == ChannelDirection::Input) {
      sampled_.emplace(channel.name, script_->value_at(channel.name, tick_));
    }
  }
  for (std::size_t i = 0; i < commands_.size(); ++i) {
    Command& c = commands_[i];
    c.finishing = false;
    c.brake_done = false;
    if (c.pub.status != Status::Running || net_.lifecycle[i].kind == NodeKind::Transaction) continue;
    if (c.pub.cancel_requested) {
      c.brake_done = c.brake > 0 && tick_ >= c.cancel_at + c.brake;
      continue;
    }
    c.elapsed = tick_ - c.pub.started_at;
    c.pub.progress = c.duration == 0 ? 1.0
                                     : std::min(1.0, static_cast<double>(c.elapsed) / static_cast<double>(c.duration));
    c.finishing = c.elapsed >= c.duration;
  }
}

void Simulator::evaluate() {
  for (std::size_t i = 0; i < net_.states.size(); ++i) {
    const StateNode& s = net_.states[i];
    bool active = false;
    if (s.logical) {
      auto in = [&](std::size_t k) { return static_cast<bool>(current_[static_cast<std::size_t>(s.inputs[k])]); };
      switch (s.op) {
        case LogicOp::And:
          active = true;
          for (std::size_t k = 0; k < s.inputs.size(); ++k) active = active && in(k);
          break;
        case LogicOp::Or:
          for (std::size_t k = 0; k < s.inputs.size(); ++k) active = active || in(k);
          break;
        case LogicOp::Not:
          active = !in(0);
          break;
        case LogicOp::Ever:
          active = previous_[i] || in(0);
          break;
      }
      current_[i] = active;
      continue;
    }
    const Command* c = s.command >= 0 ? &commands_[static_cast<std::size_t>(s.command)] : nullptr;
    switch (s.kind) {
      case StateKind::CommandStarted:
        active = c->started && tick_ >= c->visible_from;
        break;
      case StateKind::CommandCompleted:
        active = c->completed_state || c->finishing || c->brake_done;
        break;
      case StateKind::CommandCancelled:
        active = c->pub.status == Status::Cancelled || c->brake_done;
        break;
      case StateKind::ActionProgressAtLeast:
        active = c && c->started &&
                 static_cast<double>(c->elapsed) * 100.0 >= s.argument * static_cast<double>(c->duration);
        break;
      case StateKind::Raised: {
        auto it = raised_for_.find(static_cast<int>(i));
        active = it != raised_for_.end() && it->second == tick_;
        break;
      }
      case StateKind::SensorTrue:
      case StateKind::ActuatorError:
        active = std::get<bool>(sampled_.at(s.channel));
        break;
      case StateKind::SensorGreater:
        active = std::get<double>(sampled_.at(s.channel)) > s.argument;
        break;
      case StateKind::SensorLess:
        active = std::get<double>(sampled_.at(s.channel)) < s.argument;
        break;
    }
    current_[i] = active;
  }
}

void Simulator::trigger(TickRecord& record) {
  for (std::size_t h = 0; h < net_.handlers.size(); ++h) {
    const NetHandler& handler = net_.handlers[h];
    if (commands_[static_cast<std::size_t>(handler.scope)].pub.status != Status::Running) continue;
    const auto src = static_cast<std::size_t>(handler.source);
    const bool entered = !previous_[src] && current_[src];
    const bool left = previous_[src] && !current_[src];
    const bool edge = (handler.trigger == Trigger::Entered || handler.trigger == Trigger::FirstEntered) ? entered : left;
    if (!edge) continue;
    if (is_first(handler.trigger)) {
      if (first_latch_[h]) continue;
      first_latch_[h] = true;
    }
    EffectRecord effect{handler.label, handler.effect, "", false};
    const auto target = static_cast<std::size_t>(handler.target);
    switch (handler.effect) {
      case EffectKind::Start:
        effect.target = net_.lifecycle[target].id;
        effect.noop = commands_[target].pub.status != Status::Idle;
        record.effects.push_back(effect);
        if (!effect.noop) start(target, false, record);
        continue;
      case EffectKind::Stop:
        effect.target = net_.lifecycle[target].id;
        effect.noop = is_terminal(commands_[target].pub.status);
        record.effects.push_back(effect);
        if (!effect.noop) stop(target, record);
        continue;
      case EffectKind::Cancel: {
        const auto& st = commands_[target].pub;
        effect.target = net_.lifecycle[target].id;
        effect.noop = st.status != Status::Running || st.cancel_requested;
        record.effects.push_back(effect);
        if (!effect.noop) cancel(target);
        continue;
      }
      case EffectKind::Raise:
        effect.target = net_.states[target].id;
        raised_for_[handler.target] = tick_ + 1;
        break;
      case EffectKind::External:
        effect.target = handler.tag;
        record.externals.push_back(handler.tag);
        break;
    }
    record.effects.push_back(effect);
  }

  // Guarded auto-starts whose condition holds now.
  for (std::size_t i = 0; i < commands_.size(); ++i) {
    Command& c = commands_[i];
    if (c.pub.status != Status::Running || c.pending.empty()) continue;
    const auto& autos = net_.lifecycle[i].auto_start;
    std::vector<std::size_t> still;
    for (std::size_t p : c.pending) {
      const auto child = static_cast<std::size_t>(autos[p].child);
      if (commands_[child].pub.status != Status::Idle) continue;
      if (current_[static_cast<std::size_t>(autos[p].guard)]) {
        start(child, false, record);
      } else {
        still.push_back(p);
      }
    }
    c.pending = std::move(still);
  }
}

void Simulator::lifecycle(TickRecord& record) {
  for (std::size_t k = commands_.size(); k-- > 0;) {
    Command& c = commands_[k];
    if (c.pub.status != Status::Running) continue;
    const auto& node = net_.lifecycle[k];
    if (node.kind != NodeKind::Transaction) {
      if (c.finishing) {
        c.completed_state = true;
        finish(k, Status::Completed, record);
        if (node.output) {
          const auto& channel = std::get<Literal>(node.output->channel.value);
          if (const auto* name = std::get_if<std::string>(&channel)) {
            record.outputs.push_back({*name, std::get<Literal>(node.output->value.value)});
          }
        }
      } else if (c.brake_done) {
        c.completed_state = true;
        finish(k, Status::Cancelled, record);
      } else if (c.pub.cancel_requested && c.brake == 0) {
        finish(k, Status::Cancelled, record);
      }
      continue;
    }
    if (child_running(k)) continue;
    if (c.pub.cancel_requested) {
      finish(k, Status::Cancelled, record);
    } else if ((c.child_started || node.children.empty()) && c.pending.empty()) {
      c.completed_state = true;
      finish(k, Status::Completed, record);
    }
  }
}

void Simulator::commit() {
  previous_ = current_;
  for (auto it = raised_for_.begin(); it != raised_for_.end();) {
    it = it->second <= tick_ ? raised_for_.erase(it) : std::next(it);
  }
}

TickRecord Simulator::step() {
  if (finished_) throw Error("simulation already finished");
  TickRecord record;
  record.tick = tick_;
  if (tick_ == 0) record.lifecycle = std::move(init_.lifecycle);

  sample();
  evaluate();
  for (std::size_t i = 0; i < net_.states.size(); ++i) {
    const StateNode& s = net_.states[i];
    if (s.declared && previous_[i] != current_[i]) record.edges.push_back({s.id, current_[i]});
  }
  trigger(record);
  lifecycle(record);
  commit();

  if (stop_on_root_ && is_terminal(commands_[0].pub.status)) {
    finished_ = true;
    end_ = EndReason::RootTerminal;
  } else if (tick_ + 1 >= max_ticks_) {
    finished_ = true;
    end_ = EndReason::MaxTicks;
  }
  ++tick_;
  return record;
}

Trace run(const Net& net, const SensorScript& script, const SimConfig& config) {
  Simulator sim(net, script, config);
  Trace trace;
  while (!sim.finished()) {
    TickRecord record = sim.step();
    if (!record.empty()) trace.records.push_back(std::move(record));
  }
  trace.end = sim.end_reason();
  trace.last_tick = sim.next_tick() - 1;
  trace.root = sim.status(0).status;
  return trace;
}

}  // namespace gsr
