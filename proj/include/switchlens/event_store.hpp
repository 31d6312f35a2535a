#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "switchlens/cue_miner.hpp"
#include "switchlens/pattern_miner.hpp"
#include "switchlens/task_model.hpp"

namespace switchlens {

struct PersonRecord {
  std::string person_id;
  std::string name;
  std::string role;

  bool operator==(const PersonRecord&) const = default;
};

struct CueVisitRecord {
  std::string session_id;
  std::string task_id;
  CueType cue = CueType::Annotation;
  Timestamp at{};

  bool operator==(const CueVisitRecord&) const = default;
};

/// One line of the task log. The `type` field selects the alternative:
/// "descriptor", "event", "cue_visit" or "person".
using LogRecord = std::variant<TaskDescriptor, TaskEvent, CueVisitRecord, PersonRecord>;

LogRecord parse_record(const nlohmann::json& j);
nlohmann::json record_to_json(const LogRecord& record);

struct Rejection {
  std::size_t line = 0;  // 1-based
  std::string reason;    // UnknownTask, MalformedLine, IllegalTransition, ...
  std::string detail;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t duplicates = 0;
  std::vector<Rejection> rejected;
};

void to_json(nlohmann::json& j, const IngestReport& r);

struct TaskStream {
  TaskDescriptor descriptor;
  TaskTrace trace;  // every accepted event, already replayed
};

/// Immutable view of the store at one watermark.
struct StoreSnapshot {
  std::map<std::string, TaskStream> tasks;
  std::map<std::string, PersonRecord> persons;
  std::map<std::string, std::vector<CueVisitRecord>> cue_visits;  // by session id, arrival order
  std::vector<std::string> lines;                                 // accepted records, verbatim
  std::uint64_t watermark = 0;

  const TaskStream* find(const std::string& task_id) const;
  std::vector<CueSession> cue_sessions() const;
};

/// Append-only task log with copy-on-write snapshots. Writers are
/// serialized; readers grab a snapshot pointer and never see a partial batch.
class EventStore {
 public:
  EventStore();
  /// Opens (or creates) a log file and rebuilds the snapshot from it.
  explicit EventStore(const std::filesystem::path& log_path);

  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  IngestReport ingest(std::istream& in);
  IngestReport ingest_lines(std::span<const std::string> lines);
  /// Accepts a JSON array of record objects (or a single object).
  IngestReport ingest_json(const nlohmann::json& records);

  std::shared_ptr<const StoreSnapshot> snapshot() const;

  /// Writes every accepted record, one per line, byte-identical to how it was ingested.
  void export_log(std::ostream& out) const;

 private:
  IngestReport commit(std::span<const std::string> lines, bool persist);

  std::mutex write_mutex_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const StoreSnapshot> snapshot_;
  std::optional<std::filesystem::path> path_;
  std::ofstream log_;
};

/// Identifier of the cue session attached to a task's most recent interruption.
std::string open_session_id(const TaskStream& stream);

struct RecordOptions {
  std::vector<std::string> characteristic_keys{"initiator",         "time_of_day", "context_switch",
                                               "interrupting_type", "priority_relation", "blockage",
                                               "boredom"};
  int utc_offset_minutes = 0;
};

/// Derives the characteristics of one switch request.
Itemset switch_characteristics(const StoreSnapshot& snapshot, const TaskStream& primary, const TaskEvent& request,
                               const std::optional<std::string>& interrupting_task_id, const RecordOptions& options);

/// One raw record per top-level suspension of tasks of `task_type`. D1 is the
/// task's fragment count; D2/D3 are that episode's lags (D2 absent while open).
std::vector<RawMiningRecord> raw_mining_records(const StoreSnapshot& snapshot, TaskType task_type,
                                                const RecordOptions& options = {});

/// raw_mining_records followed by discretize. Throws EmptyInput on an empty store.
std::vector<MiningRecord> mining_records(const StoreSnapshot& snapshot, TaskType task_type,
                                         const Discretization& discretization, const RecordOptions& options = {});

struct PersonProfile {
  std::string name;
  std::string role;
  std::set<std::string> projects;

  bool operator==(const PersonProfile&) const = default;
};

struct CommunicationGraph {
  std::map<std::string, PersonProfile> nodes;
  std::map<std::pair<std::string, std::string>, std::int64_t> edges;  // requester -> interrupted

  std::int64_t total_weight() const;
  /// Edges touching `person`, with their endpoints.
  CommunicationGraph slice(const std::string& person) const;

  bool operator==(const CommunicationGraph&) const = default;
};

/// Counts SwitchRequested events with `from <= at < to`. Self-initiated
/// requests become self-loops; external ones come from requester_id
/// ("unknown" when the logger did not supply it).
CommunicationGraph communication_graph(const StoreSnapshot& snapshot, std::optional<Timestamp> from = std::nullopt,
                                       std::optional<Timestamp> to = std::nullopt);

void to_json(nlohmann::json& j, const CommunicationGraph& g);
std::string to_dot(const CommunicationGraph& g);

}  // namespace switchlens
