#include "switchlens/task_model.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "switchlens/errors.hpp"

namespace switchlens {
namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<std::pair<std::string_view, Enum>, N>& table,
                std::string_view what) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  throw ParseError("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

constexpr std::array<std::pair<std::string_view, TaskType>, 8> kTaskTypeNames{{
    {"gathering", TaskType::Gathering},
    {"elicitation", TaskType::Gathering},
    {"analysis", TaskType::Analysis},
    {"modeling", TaskType::Modeling},
    {"specification", TaskType::Specification},
    {"validation", TaskType::Validation},
    {"evolution", TaskType::Evolution},
    {"other", TaskType::Other},
}};

constexpr std::array<std::pair<std::string_view, EventKind>, 7> kEventKindNames{{
    {"Started", EventKind::Started},
    {"SwitchRequested", EventKind::SwitchRequested},
    {"Suspended", EventKind::Suspended},
    {"InterruptionEnded", EventKind::InterruptionEnded},
    {"Resumed", EventKind::Resumed},
    {"Completed", EventKind::Completed},
    {"Abandoned", EventKind::Abandoned},
}};

std::string describe(const TaskState& state, const TaskEvent& event) {
  return std::string(to_string(event.kind)) + " not accepted in phase " + std::string(to_string(state.phase)) +
         " (task " + event.task_id + ", at " + format_timestamp(event.at) + ")";
}

}  // namespace

std::string_view to_string(TaskType t) {
  switch (t) {
    case TaskType::Gathering: return "gathering";
    case TaskType::Analysis: return "analysis";
    case TaskType::Modeling: return "modeling";
    case TaskType::Specification: return "specification";
    case TaskType::Validation: return "validation";
    case TaskType::Evolution: return "evolution";
    case TaskType::Other: return "other";
  }
  return "other";
}

std::string_view to_string(Granularity g) { return g == Granularity::Coarse ? "coarse" : "fine"; }

std::string_view to_string(ProgressStatus p) {
  switch (p) {
    case ProgressStatus::NotStarted: return "not_started";
    case ProgressStatus::Early: return "early";
    case ProgressStatus::Mid: return "mid";
    case ProgressStatus::Late: return "late";
  }
  return "not_started";
}

std::string_view to_string(EventKind k) {
  for (const auto& [name, value] : kEventKindNames) {
    if (value == k) return name;
  }
  return "Started";
}

std::string_view to_string(Initiator i) { return i == Initiator::Self ? "self" : "external"; }

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Created: return "Created";
    case Phase::Active: return "Active";
    case Phase::InterruptionPending: return "InterruptionPending";
    case Phase::Suspended: return "Suspended";
    case Phase::ResumptionPending: return "ResumptionPending";
    case Phase::Completed: return "Completed";
    case Phase::Trapped: return "Trapped";
  }
  return "Created";
}

TaskType parse_task_type(std::string_view text) { return parse_enum(text, kTaskTypeNames, "task type"); }

Granularity parse_granularity(std::string_view text) {
  constexpr std::array<std::pair<std::string_view, Granularity>, 2> table{{
      {"coarse", Granularity::Coarse},
      {"fine", Granularity::Fine},
  }};
  return parse_enum(text, table, "granularity");
}

ProgressStatus parse_progress_status(std::string_view text) {
  constexpr std::array<std::pair<std::string_view, ProgressStatus>, 4> table{{
      {"not_started", ProgressStatus::NotStarted},
      {"early", ProgressStatus::Early},
      {"mid", ProgressStatus::Mid},
      {"late", ProgressStatus::Late},
  }};
  return parse_enum(text, table, "progress status");
}

EventKind parse_event_kind(std::string_view text) { return parse_enum(text, kEventKindNames, "event kind"); }

Initiator parse_initiator(std::string_view text) {
  constexpr std::array<std::pair<std::string_view, Initiator>, 2> table{{
      {"self", Initiator::Self},
      {"external", Initiator::External},
  }};
  return parse_enum(text, table, "initiator");
}

void TaskDescriptor::validate() const {
  if (task_id.empty()) throw InvalidRecord("descriptor without task_id");
  if (priority < 1 || priority > 5) {
    throw InvalidRecord("priority " + std::to_string(priority) + " outside 1..5 for task " + task_id);
  }
  if (!(performer_experience >= 0.0)) throw InvalidRecord("negative performer_experience for task " + task_id);
}

void TaskEvent::validate() const {
  if (task_id.empty()) throw InvalidRecord("event without task_id");
  const bool needs_initiator = kind == EventKind::SwitchRequested;
  if (needs_initiator && !initiator) throw InvalidRecord("SwitchRequested without initiator");
  if (!needs_initiator && initiator) {
    throw InvalidRecord("initiator is only allowed on SwitchRequested, got it on " + std::string(to_string(kind)));
  }
}

bool transition_defined(Phase phase, EventKind kind) noexcept {
  switch (phase) {
    case Phase::Created: return kind == EventKind::Started;
    case Phase::Active: return kind == EventKind::SwitchRequested || kind == EventKind::Completed;
    case Phase::InterruptionPending: return kind == EventKind::Suspended;
    case Phase::Suspended:
      return kind == EventKind::SwitchRequested || kind == EventKind::Suspended ||
             kind == EventKind::InterruptionEnded || kind == EventKind::Abandoned;
    case Phase::ResumptionPending: return kind == EventKind::Resumed || kind == EventKind::Abandoned;
    case Phase::Completed:
    case Phase::Trapped: return false;
  }
  return false;
}

TaskState apply_event(const TaskState& state, const TaskEvent& event) {
  if (state.terminal()) throw TerminalState(describe(state, event));
  if (state.last_event_at && event.at <= *state.last_event_at) {
    throw NonMonotonicTimestamp("event at " + format_timestamp(event.at) + " does not follow " +
                                format_timestamp(*state.last_event_at) + " (task " + event.task_id + ")");
  }
  if (!transition_defined(state.phase, event.kind)) throw IllegalTransition(describe(state, event));

  TaskState next = state;
  next.last_event_at = event.at;
  switch (state.phase) {
    case Phase::Created:
      next.phase = Phase::Active;
      next.fragment_index = 1;
      break;
    case Phase::Active:
      if (event.kind == EventKind::SwitchRequested) {
        next.phase = Phase::InterruptionPending;
        next.alert_at = event.at;
      } else {
        next.phase = Phase::Completed;
      }
      break;
    case Phase::InterruptionPending:
      next.phase = Phase::Suspended;
      next.depth = 1;
      next.suspended_at = event.at;
      break;
    case Phase::Suspended:
      switch (event.kind) {
        case EventKind::SwitchRequested:
          break;  // nested alert, depth unchanged until the switch happens
        case EventKind::Suspended:
          next.depth = state.depth + 1;
          break;
        case EventKind::InterruptionEnded:
          if (state.depth > 1) {
            next.depth = state.depth - 1;
          } else {
            next.depth = 0;
            next.phase = Phase::ResumptionPending;
            next.interruption_ended_at = event.at;
          }
          break;
        default:  // Abandoned
          next.phase = Phase::Trapped;
          break;
      }
      break;
    case Phase::ResumptionPending:
      if (event.kind == EventKind::Resumed) {
        next.phase = Phase::Active;
        next.fragment_index = state.fragment_index + 1;
        next.alert_at.reset();
        next.suspended_at.reset();
        next.interruption_ended_at.reset();
      } else {
        next.phase = Phase::Trapped;
      }
      break;
    case Phase::Completed:
    case Phase::Trapped:
      break;
  }
  return next;
}

void TaskTrace::append(const TaskEvent& event) {
  if (event.task_id != descriptor_.task_id) {
    throw Error(ErrorCode::TaskMismatch,
                "event for task " + event.task_id + " replayed against " + descriptor_.task_id);
  }
  transitions_.push_back({event, apply_event(final_state(), event)});
}

TaskTrace replay(const TaskDescriptor& descriptor, std::span<const TaskEvent> events) {
  TaskTrace trace(descriptor);
  for (std::size_t i = 0; i < events.size(); ++i) {
    try {
      trace.append(events[i]);
    } catch (const Error& e) {
      throw ReplayError(e.code(), i, "event " + std::to_string(i) + ": " + e.what());
    }
  }
  return trace;
}

DisruptivenessMeasures derive_measures(const TaskTrace& trace, LagPolicy policy) {
  DisruptivenessMeasures m;
  const Phase final_phase = trace.final_state().phase;
  if (policy == LagPolicy::RequireClosed &&
      (final_phase == Phase::InterruptionPending || final_phase == Phase::ResumptionPending)) {
    throw IncompleteTrace("task " + trace.descriptor().task_id + " still has an open lag in phase " +
                          std::string(to_string(final_phase)));
  }

  TaskState previous;
  for (const auto& [event, state] : trace.transitions()) {
    if (state.phase == Phase::Active && previous.phase != Phase::Active) ++m.d1_fragments;
    if (previous.phase == Phase::InterruptionPending && state.phase == Phase::Suspended) {
      m.d3_interruption_lags.push_back(event.at - *previous.alert_at);
    }
    if (previous.phase == Phase::Suspended && state.phase == Phase::ResumptionPending) {
      m.suspension_durations.push_back(event.at - *previous.suspended_at);
    }
    if (previous.phase == Phase::ResumptionPending && state.phase == Phase::Active) {
      m.d2_resumption_lags.push_back(event.at - *previous.interruption_ended_at);
    }
    m.nested_depth_max = std::max(m.nested_depth_max, state.depth);
    previous = state;
  }
  return m;
}

bool detect_trap(const TaskTrace& trace, Timestamp now, Duration horizon) {
  if (horizon <= Duration::zero()) throw std::invalid_argument("trap horizon must be positive");
  const TaskState& s = trace.final_state();
  if (s.phase == Phase::Trapped) return true;
  if (s.phase != Phase::Suspended && s.phase != Phase::ResumptionPending) return false;
  return now - *s.suspended_at > horizon;
}

}  // namespace switchlens
