#pragma once

#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "switchlens/event_store.hpp"
#include "switchlens/pattern_miner.hpp"
#include "switchlens/task_model.hpp"

namespace fixtures {

using namespace switchlens;

inline Timestamp at(const char* iso) { return parse_timestamp(iso); }
inline Timestamp secs(std::int64_t s) { return from_unix_millis(s * 1000); }

inline TaskDescriptor descriptor(const std::string& id, TaskType type = TaskType::Modeling,
                                 const std::string& project = "P1", const std::string& performer = "alice",
                                 int priority = 3) {
  TaskDescriptor d;
  d.task_id = id;
  d.project = project;
  d.task_type = type;
  d.priority = priority;
  d.performer_id = performer;
  d.performer_experience = 4.5;
  return d;
}

inline TaskEvent event(const std::string& task, Timestamp t, EventKind kind,
                       std::optional<Initiator> initiator = std::nullopt) {
  TaskEvent e;
  e.task_id = task;
  e.at = t;
  e.kind = kind;
  e.performer_id = "alice";
  if (kind == EventKind::SwitchRequested) e.initiator = initiator.value_or(Initiator::Self);
  return e;
}

/// Builds a log for one task from kinds, one event per `step` seconds from `start`.
inline std::vector<TaskEvent> log_of(const std::string& task, std::initializer_list<EventKind> kinds,
                                     std::int64_t start = 0, std::int64_t step = 10) {
  std::vector<TaskEvent> out;
  std::int64_t t = start;
  for (EventKind k : kinds) {
    out.push_back(event(task, secs(t), k));
    t += step;
  }
  return out;
}

inline Item c(const char* key, const char* value) { return Item::characteristic(key, value); }

/// Five requirements-modeling interruptions over three characteristics where
/// {self, morning} always co-occurs with a high interruption lag, plus two
/// validation rows that type filtering must drop.
inline std::vector<RawMiningRecord> case_study_records() {
  auto row = [](TaskType type, const char* init, const char* tod, const char* ctx, double d1, double d2, double d3) {
    RawMiningRecord r;
    r.task_type = type;
    r.characteristics = make_itemset({c("initiator", init), c("time_of_day", tod), c("context_switch", ctx)});
    r.measures = {d1, d2, d3};
    return r;
  };
  return {
      row(TaskType::Modeling, "self", "morning", "same_project", 5, 900, 900),
      row(TaskType::Validation, "external", "morning", "same_project", 2, 100, 100),
      row(TaskType::Modeling, "self", "morning", "different_project", 4, 600, 1200),
      row(TaskType::Modeling, "self", "morning", "unknown", 2, 120, 700),
      row(TaskType::Validation, "external", "evening", "unknown", 7, 50, 50),
      row(TaskType::Modeling, "external", "afternoon", "same_project", 3, 300, 200),
      row(TaskType::Modeling, "external", "evening", "different_project", 2, 60, 300),
  };
}

inline MiningParams case_study_params() {
  MiningParams p;
  p.min_support = Rational(1, 2);
  p.min_confidence = Rational(1, 2);
  p.task_type = TaskType::Modeling;
  p.discretization[Measure::D3] = Threshold::fixed(600);
  return p;
}

/// Random walk through the task state machine. Always starts the task; may
/// end in any phase.
inline std::vector<TaskEvent> random_valid_log(std::mt19937_64& rng, const std::string& task, std::int64_t start,
                                               int max_events = 20) {
  std::uniform_int_distribution<int> gap(1, 3600);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<TaskEvent> out;
  std::int64_t t = start;
  auto push = [&](EventKind k, std::optional<Initiator> init = std::nullopt) {
    t += gap(rng);
    out.push_back(event(task, secs(t), k, init));
  };
  push(EventKind::Started);
  int depth = 0;
  enum { Active, Pending, Suspended, Resuming, Done } phase = Active;
  while (phase != Done && static_cast<int>(out.size()) < max_events) {
    const double p = u(rng);
    switch (phase) {
      case Active:
        if (p < 0.25) {
          push(EventKind::Completed);
          phase = Done;
        } else {
          push(EventKind::SwitchRequested, p < 0.6 ? Initiator::Self : Initiator::External);
          phase = Pending;
        }
        break;
      case Pending:
        push(EventKind::Suspended);
        depth = 1;
        phase = Suspended;
        break;
      case Suspended:
        if (p < 0.15) {
          push(EventKind::SwitchRequested, Initiator::External);
        } else if (p < 0.3) {
          push(EventKind::Suspended);
          ++depth;
        } else if (p < 0.95) {
          push(EventKind::InterruptionEnded);
          if (--depth == 0) phase = Resuming;
        } else {
          push(EventKind::Abandoned);
          phase = Done;
        }
        break;
      case Resuming:
        if (p < 0.93) {
          push(EventKind::Resumed);
          phase = Active;
        } else {
          push(EventKind::Abandoned);
          phase = Done;
        }
        break;
      case Done:
        break;
    }
  }
  return out;
}

/// JSON-lines text for a synthetic multi-person log with roughly `target_events` events.
inline std::vector<std::string> synthetic_log(std::uint64_t seed, std::size_t target_events) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> people{"alice", "bob", "carol", "dave", "erin", "frank"};
  const std::vector<std::string> projects{"P1", "P2", "P3"};
  std::uniform_int_distribution<std::size_t> pick_person(0, people.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_project(0, projects.size() - 1);
  std::uniform_int_distribution<int> pick_type(0, 6);
  std::uniform_int_distribution<int> pick_priority(1, 5);
  std::uniform_int_distribution<std::int64_t> pick_start(0, 30LL * 86400);

  std::vector<std::string> lines;
  for (const auto& p : people) {
    lines.push_back(record_to_json(PersonRecord{p, p, "engineer"}).dump());
  }
  std::vector<std::string> tasks;
  std::size_t events = 0;
  const std::int64_t base = 1'709'251'200;  // 2024-03-01T00:00:00Z
  while (events < target_events) {
    const std::string id = "T" + std::to_string(tasks.size() + 1);
    auto d = descriptor(id, kAllTaskTypes[pick_type(rng)], projects[pick_project(rng)], people[pick_person(rng)],
                        pick_priority(rng));
    lines.push_back(record_to_json(d).dump());
    auto log = random_valid_log(rng, id, base + pick_start(rng), 24);
    for (auto& e : log) {
      e.performer_id = d.performer_id;
      if (e.kind == EventKind::SwitchRequested) {
        if (e.initiator == Initiator::External) {
          std::string requester;
          do {
            requester = people[pick_person(rng)];
          } while (requester == d.performer_id);
          e.requester_id = requester;
        }
        if (!tasks.empty() && rng() % 4 != 0) e.interrupting_task_id = tasks[rng() % tasks.size()];
        e.blockage = rng() % 5 == 0;
        e.boredom = rng() % 7 == 0;
      }
      lines.push_back(record_to_json(e).dump());
      ++events;
    }
    tasks.push_back(id);
  }
  return lines;
}

}  // namespace fixtures
