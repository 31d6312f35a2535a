#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "switchlens/time.hpp"

namespace switchlens {

enum class TaskType { Gathering, Analysis, Modeling, Specification, Validation, Evolution, Other };
inline constexpr TaskType kAllTaskTypes[] = {TaskType::Gathering,     TaskType::Analysis,
                                             TaskType::Modeling,      TaskType::Specification,
                                             TaskType::Validation,    TaskType::Evolution,
                                             TaskType::Other};

enum class Granularity { Coarse, Fine };
enum class ProgressStatus { NotStarted, Early, Mid, Late };

enum class EventKind {
  Started,
  SwitchRequested,
  Suspended,
  InterruptionEnded,
  Resumed,
  Completed,
  Abandoned,
};
inline constexpr EventKind kAllEventKinds[] = {
    EventKind::Started,  EventKind::SwitchRequested, EventKind::Suspended, EventKind::InterruptionEnded,
    EventKind::Resumed,  EventKind::Completed,       EventKind::Abandoned,
};

enum class Initiator { Self, External };

enum class Phase {
  Created,
  Active,
  InterruptionPending,
  Suspended,
  ResumptionPending,
  Completed,
  Trapped,
};
inline constexpr Phase kAllPhases[] = {
    Phase::Created,           Phase::Active,    Phase::InterruptionPending, Phase::Suspended,
    Phase::ResumptionPending, Phase::Completed, Phase::Trapped,
};

std::string_view to_string(TaskType t);
std::string_view to_string(Granularity g);
std::string_view to_string(ProgressStatus p);
std::string_view to_string(EventKind k);
std::string_view to_string(Initiator i);
std::string_view to_string(Phase p);

// "elicitation" is accepted as an alias of "gathering".
TaskType parse_task_type(std::string_view text);
Granularity parse_granularity(std::string_view text);
ProgressStatus parse_progress_status(std::string_view text);
EventKind parse_event_kind(std::string_view text);
Initiator parse_initiator(std::string_view text);

struct TaskDescriptor {
  std::string task_id;
  std::string project;
  TaskType task_type = TaskType::Other;
  Granularity granularity = Granularity::Coarse;
  int priority = 3;  // 1 is highest
  ProgressStatus progress_status = ProgressStatus::NotStarted;
  std::string performer_id;
  double performer_experience = 0.0;

  /// Throws InvalidRecord when priority or experience are out of range.
  void validate() const;

  bool operator==(const TaskDescriptor&) const = default;
};

struct TaskEvent {
  std::string task_id;
  Timestamp at{};
  EventKind kind = EventKind::Started;
  std::optional<Initiator> initiator;  // present iff kind == SwitchRequested
  std::optional<std::string> interrupting_task_id;
  std::optional<std::string> requester_id;
  std::string performer_id;
  std::optional<std::string> annotations;
  std::optional<std::string> thumbnail_id;
  bool blockage = false;
  bool boredom = false;

  void validate() const;

  bool operator==(const TaskEvent&) const = default;
};

struct TaskState {
  Phase phase = Phase::Created;
  int fragment_index = 0;
  int depth = 0;
  std::optional<Timestamp> alert_at;               // SwitchRequested that opened the pending switch
  std::optional<Timestamp> suspended_at;           // start of the current top-level suspension
  std::optional<Timestamp> interruption_ended_at;  // set while ResumptionPending
  std::optional<Timestamp> last_event_at;

  bool terminal() const noexcept { return phase == Phase::Completed || phase == Phase::Trapped; }

  bool operator==(const TaskState&) const = default;
};

/// One step of the task state machine. Throws IllegalTransition (or its
/// TerminalState subclass) and NonMonotonicTimestamp.
TaskState apply_event(const TaskState& state, const TaskEvent& event);

/// True iff apply_event accepts `kind` in `phase` (timestamps and depth aside).
bool transition_defined(Phase phase, EventKind kind) noexcept;

struct Transition {
  TaskEvent event;
  TaskState state;  // state after the event

  bool operator==(const Transition&) const = default;
};

class TaskTrace {
 public:
  TaskTrace() = default;
  explicit TaskTrace(TaskDescriptor descriptor) : descriptor_(std::move(descriptor)) {}

  const TaskDescriptor& descriptor() const noexcept { return descriptor_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  const TaskState& final_state() const noexcept {
    return transitions_.empty() ? initial_ : transitions_.back().state;
  }

  /// Applies one more event. Used by replay and by live stores.
  void append(const TaskEvent& event);

  bool operator==(const TaskTrace&) const = default;

 private:
  TaskDescriptor descriptor_;
  TaskState initial_;
  std::vector<Transition> transitions_;
};

/// Folds apply_event over `events`. Failures are rethrown as ReplayError with
/// the offending index.
TaskTrace replay(const TaskDescriptor& descriptor, std::span<const TaskEvent> events);

struct DisruptivenessMeasures {
  int d1_fragments = 0;
  std::vector<Duration> d2_resumption_lags;    // InterruptionEnded -> Resumed
  std::vector<Duration> d3_interruption_lags;  // SwitchRequested -> top-level Suspended
  std::vector<Duration> suspension_durations;  // top-level Suspended -> closing InterruptionEnded
  int nested_depth_max = 0;

  bool operator==(const DisruptivenessMeasures&) const = default;
};

enum class LagPolicy { AllowOpen, RequireClosed };

/// Open lags are simply absent under AllowOpen; RequireClosed throws
/// IncompleteTrace while a switch or a resumption is still pending.
DisruptivenessMeasures derive_measures(const TaskTrace& trace, LagPolicy policy = LagPolicy::AllowOpen);

inline constexpr Duration kDefaultTrapHorizon = std::chrono::days{7};

bool detect_trap(const TaskTrace& trace, Timestamp now, Duration horizon = kDefaultTrapHorizon);

}  // namespace switchlens
