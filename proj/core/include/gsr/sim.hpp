#pragma once

// Tick-based executor for compiled nets, driven by scripted sensor channels.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsr/net.hpp"

namespace gsr {

// ---------------------------------------------------------------------------
// Sensor scripts
// ---------------------------------------------------------------------------

struct ScriptSegment {
  std::int64_t from_tick = 0;
  Literal value;  // bool or double
  bool operator==(const ScriptSegment&) const = default;
};

/// Piecewise-constant channel values. A channel keeps its last value after
/// its final segment.
struct SensorScript {
  std::int64_t ticks = 0;
  std::map<std::string, std::vector<ScriptSegment>> channels;

  /// Value of `channel` at `tick`; throws Error for unknown channels.
  const Literal& value_at(const std::string& channel, std::int64_t tick) const;
  bool operator==(const SensorScript&) const = default;
};

/// Parses `{"ticks": N, "channels": {"name": [[from, value], ...]}}` and
/// checks segment ordering. Integer values are read as reals.
SensorScript script_from_json(std::string_view text);
std::string script_to_json(const SensorScript& script);

class MissingChannel : public Error {
 public:
  explicit MissingChannel(const std::string& channel);
  const std::string& channel() const noexcept { return channel_; }

 private:
  std::string channel_;
};

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct SimConfig {
  std::optional<std::int64_t> max_ticks;  // defaults to the script length
  bool stop_on_root_terminal = true;
};

enum class Status { Idle, Running, Completed, Stopped, Cancelled };
std::string_view to_string(Status status);
inline bool is_terminal(Status s) {
  return s == Status::Completed || s == Status::Stopped || s == Status::Cancelled;
}

struct LifecycleStatus {
  Status status = Status::Idle;
  std::int64_t started_at = -1;
  std::int64_t ended_at = -1;
  bool cancel_requested = false;
  double progress = 0.0;  // runtime and wait commands
};

struct StateEdge {
  std::string state;
  bool entered = true;  // false: left
  bool operator==(const StateEdge&) const = default;
};

struct EffectRecord {
  std::string handler;
  EffectKind effect = EffectKind::Start;
  std::string target;  // command, raised state, or external tag
  bool noop = false;
  bool operator==(const EffectRecord&) const = default;
};

struct LifecycleRecord {
  std::string command;
  Status status = Status::Running;
  bool operator==(const LifecycleRecord&) const = default;
};

struct OutputRecord {
  std::string channel;
  Literal value;
  bool operator==(const OutputRecord&) const = default;
};

struct TickRecord {
  std::int64_t tick = 0;
  std::vector<StateEdge> edges;
  std::vector<EffectRecord> effects;
  std::vector<LifecycleRecord> lifecycle;
  std::vector<std::string> externals;
  std::vector<OutputRecord> outputs;

  bool empty() const {
    return edges.empty() && effects.empty() && lifecycle.empty() && externals.empty() && outputs.empty();
  }
  bool operator==(const TickRecord&) const = default;
};

enum class EndReason { RootTerminal, MaxTicks };

struct Trace {
  std::vector<TickRecord> records;  // non-empty records only, by tick
  EndReason end = EndReason::MaxTicks;
  std::int64_t last_tick = -1;
  Status root = Status::Idle;

  bool truncated() const { return end == EndReason::MaxTicks; }
  bool operator==(const Trace&) const = default;
};

/// Incremental driver. Each step executes one tick in five phases: sample,
/// evaluate, trigger, lifecycle, commit.
class Simulator {
 public:
  /// Throws MissingChannel, or Error when the net still has unbound slots or
  /// a script channel has the wrong value type.
  Simulator(const Net& net, const SensorScript& script, SimConfig config = {});

  bool finished() const { return finished_; }
  std::int64_t next_tick() const { return tick_; }
  std::int64_t max_ticks() const { return max_ticks_; }

  /// Executes the next tick. Precondition: !finished().
  TickRecord step();

  /// Activity of every state node (net order) at the last executed tick.
  const std::vector<bool>& activity() const { return current_; }
  const LifecycleStatus& status(std::size_t command) const { return commands_.at(command).pub; }
  const Net& net() const { return net_; }
  EndReason end_reason() const { return end_; }

 private:
  struct Command {
    LifecycleStatus pub;
    std::int64_t duration = 0;
    std::int64_t brake = 0;
    std::int64_t visible_from = 0;
    std::int64_t elapsed = 0;
    std::int64_t cancel_at = -1;
    bool started = false;
    bool finishing = false;  // progress reached 1 in this tick's sample phase
    bool brake_done = false;  // braking finished in this tick's sample phase
    bool completed_state = false;
    bool child_started = false;
    std::vector<std::size_t> pending;  // auto_start entries not yet started
  };

  void sample();
  void evaluate();
  void trigger(TickRecord& record);
  void lifecycle(TickRecord& record);
  void commit();

  void start(std::size_t command, bool at_init, TickRecord& record);
  void stop(std::size_t command, TickRecord& record);
  void cancel(std::size_t command);
  void finish(std::size_t command, Status status, TickRecord& record);
  bool child_running(std::size_t command) const;

  Net net_;
  const SensorScript* script_;
  std::int64_t max_ticks_ = 0;
  bool stop_on_root_ = true;

  std::int64_t tick_ = 0;
  bool finished_ = false;
  EndReason end_ = EndReason::MaxTicks;

  std::vector<Command> commands_;
  std::map<std::string, Literal> sampled_;
  std::vector<bool> previous_;
  std::vector<bool> current_;
  std::vector<bool> first_latch_;  // per handler
  std::map<int, std::int64_t> raised_for_;  // state index -> tick it is active
  TickRecord init_;
};

/// Runs until the root is terminal (when configured) or max_ticks ticks have
/// executed.
Trace run(const Net& net, const SensorScript& script, const SimConfig& config = {});

/// One JSON object per non-empty tick record, then an end marker line.
std::string trace_to_jsonl(const Trace& trace);

}  // namespace gsr
