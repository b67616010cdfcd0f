#include <sstream>

#include "gsr/dsl.hpp"

namespace gsr {

namespace {

class Printer {
 public:
  explicit Printer(const Diagram& d) : d_(d) {}

  std::string run() {
    out_ << "diagram " << d_.name << " {\n";
    for (const auto& sensor : d_.top_sensors) {
      line(1) << "sensor " << sensor.id << ": " << sensor.sensor_type << " channel "
              << quote_string(sensor.channel) << ";\n";
    }
    states(d_.states, 1);
    for (const auto& command : d_.commands) this->command(command, 1);
    for (const auto& ls : d_.logical_states) {
      line(1) << "logical " << ls.id << ": " << to_string(ls.op) << "(";
      for (std::size_t i = 0; i < ls.inputs.size(); ++i) out_ << (i ? ", " : "") << ls.inputs[i];
      out_ << ");\n";
    }
    for (const auto& h : d_.handlers) {
      line(1) << "handler ";
      if (!h.id.empty()) out_ << h.id << " ";
      if (h.scope != d_.name) out_ << "in " << h.scope << " ";
      out_ << "on " << h.source << " " << to_string(h.trigger) << " " << to_string(h.effect.kind)
           << " ";
      if (h.effect.kind == EffectKind::External) {
        out_ << quote_string(h.effect.target);
      } else {
        out_ << h.effect.target;
      }
      out_ << ";\n";
    }
    for (const auto& s : d_.starters) {
      line(1) << "starter " << s.id << " -> ";
      for (std::size_t i = 0; i < s.targets.size(); ++i) out_ << (i ? ", " : "") << s.targets[i];
      out_ << ";\n";
    }
    out_ << "}\n";
    return out_.str();
  }

 private:
  std::ostream& line(int depth) {
    for (int i = 0; i < depth; ++i) out_ << "  ";
    return out_;
  }

  void params(const std::vector<Parameter>& ps) {
    if (ps.empty()) return;
    out_ << "(";
    for (std::size_t i = 0; i < ps.size(); ++i) {
      out_ << (i ? ", " : "") << ps[i].name << " = " << format_binding(ps[i].binding);
    }
    out_ << ")";
  }

  void states(const std::vector<DeclaredState>& list, int depth) {
    for (const auto& st : list) {
      line(depth) << "state " << st.id << ": " << to_string(st.kind);
      if (has_argument(st.kind)) out_ << "(" << format_literal(st.argument) << ")";
      if (st.kind != StateKind::Raised) out_ << " on " << st.owner;
      out_ << ";\n";
    }
  }

  void command(const Command& command, int depth) {
    std::visit([&](const auto& c) { print(c, depth); }, command.node);
  }

  void print(const RuntimeCommand& rt, int depth) {
    line(depth) << "runtime " << rt.id << " {\n";
    for (const auto& a : rt.actuators) {
      line(depth + 1) << "actuator " << a.id << ": " << a.device_type;
      params(a.config);
      out_ << ";\n";
      for (const auto& s : a.sensors) {
        line(depth + 1) << "sensor " << s.id << ": " << s.sensor_type << " on " << a.id
                        << " channel " << quote_string(s.channel) << ";\n";
      }
    }
    for (const auto& a : rt.actions) {
      line(depth + 1) << "action " << a.id << ": " << a.action_type;
      params(a.params);
      out_ << ";\n";
    }
    states(rt.states, depth + 1);
    line(depth) << "}\n";
  }

  void print(const TransactionCommand& tx, int depth) {
    line(depth) << "transaction " << tx.id << " {\n";
    for (const auto& child : tx.children) command(child, depth + 1);
    states(tx.states, depth + 1);
    if (!tx.auto_start.empty()) {
      line(depth + 1) << "start ";
      for (std::size_t i = 0; i < tx.auto_start.size(); ++i) {
        out_ << (i ? ", " : "") << tx.auto_start[i].child;
        if (tx.auto_start[i].guard) out_ << " when " << *tx.auto_start[i].guard;
      }
      out_ << ";\n";
    }
    line(depth) << "}\n";
  }

  void print(const WaitCommand& w, int depth) {
    line(depth) << "wait " << w.id << "(" << w.duration_ticks << ")";
    if (w.states.empty()) {
      out_ << ";\n";
      return;
    }
    out_ << " {\n";
    states(w.states, depth + 1);
    line(depth) << "}\n";
  }

  const Diagram& d_;
  std::ostringstream out_;
};

}  // namespace

std::string print(const Diagram& diagram) { return Printer(diagram).run(); }

}  // namespace gsr
