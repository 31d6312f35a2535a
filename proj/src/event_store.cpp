#include "switchlens/event_store.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "switchlens/errors.hpp"
#include "switchlens/json_io.hpp"

namespace switchlens {

using nlohmann::json;

namespace {

std::string require_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw InvalidRecord(std::string("missing field '") + key + "'");
  }
  return it->get<std::string>();
}

class Ingestor {
 public:
  explicit Ingestor(StoreSnapshot& snap) : snap_(snap) {}

  // Returns true when accepted, false for a duplicate; throws Rejected.
  struct Rejected {
    std::string reason;
    std::string detail;
  };

  bool apply(const LogRecord& record) {
    return std::visit([this](const auto& r) { return add(r); }, record);
  }

 private:
  bool add(const TaskDescriptor& d) {
    d.validate();
    if (auto it = snap_.tasks.find(d.task_id); it != snap_.tasks.end()) {
      if (it->second.descriptor == d) return false;
      throw Rejected{"DescriptorConflict", "task " + d.task_id + " already declared differently"};
    }
    snap_.tasks.emplace(d.task_id, TaskStream{d, TaskTrace(d)});
    return true;
  }

  bool add(const TaskEvent& e) {
    e.validate();
    auto it = snap_.tasks.find(e.task_id);
    if (it == snap_.tasks.end()) throw Rejected{"UnknownTask", "no descriptor for task " + e.task_id};
    TaskTrace& trace = it->second.trace;
    const auto& last = trace.final_state().last_event_at;
    if (last && e.at <= *last) {
      for (const auto& t : trace.transitions()) {
        if (t.event.at == e.at && t.event.kind == e.kind) return false;
      }
    }
    try {
      trace.append(e);
    } catch (const Error& err) {
      throw Rejected{std::string(to_string(err.code())), err.what()};
    }
    return true;
  }

  bool add(const CueVisitRecord& v) {
    if (!snap_.tasks.contains(v.task_id)) throw Rejected{"UnknownTask", "no descriptor for task " + v.task_id};
    auto& visits = snap_.cue_visits[v.session_id];
    for (const auto& existing : visits) {
      if (existing.at == v.at && existing.cue == v.cue) return false;
    }
    if (!visits.empty() && visits.front().task_id != v.task_id) {
      throw Rejected{"SessionTaskMismatch", "session " + v.session_id + " belongs to " + visits.front().task_id};
    }
    if (!visits.empty() && v.at < visits.back().at) {
      throw Rejected{"NonMonotonicTimestamp", "cue visit precedes the previous visit of " + v.session_id};
    }
    visits.push_back(v);
    return true;
  }

  bool add(const PersonRecord& p) {
    if (auto it = snap_.persons.find(p.person_id); it != snap_.persons.end()) {
      if (it->second == p) return false;
      throw Rejected{"PersonConflict", "person " + p.person_id + " already declared differently"};
    }
    snap_.persons.emplace(p.person_id, p);
    return true;
  }

  StoreSnapshot& snap_;
};

std::string trim_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

LogRecord parse_record(const json& j) {
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  const std::string type = require_string(j, "type");
  try {
    if (type == "descriptor") {
      require_string(j, "task_id");
      require_string(j, "task_type");
      return j.get<TaskDescriptor>();
    }
    if (type == "event") {
      require_string(j, "task_id");
      require_string(j, "at");
      require_string(j, "kind");
      return j.get<TaskEvent>();
    }
    if (type == "cue_visit") {
      return CueVisitRecord{require_string(j, "session_id"), require_string(j, "task_id"),
                            parse_cue_type(require_string(j, "cue")), parse_timestamp(require_string(j, "at"))};
    }
    if (type == "person") {
      return PersonRecord{require_string(j, "person_id"), j.value("name", std::string{}),
                          j.value("role", std::string{})};
    }
  } catch (const json::exception& e) {
    throw InvalidRecord(std::string("bad field type: ") + e.what());
  }
  throw InvalidRecord("unknown record type '" + type + "'");
}

json record_to_json(const LogRecord& record) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        json j;
        if constexpr (std::is_same_v<T, TaskDescriptor>) {
          j = r;
          j["type"] = "descriptor";
        } else if constexpr (std::is_same_v<T, TaskEvent>) {
          j = r;
          j["type"] = "event";
        } else if constexpr (std::is_same_v<T, CueVisitRecord>) {
          j = json{{"type", "cue_visit"},
                   {"session_id", r.session_id},
                   {"task_id", r.task_id},
                   {"cue", to_string(r.cue)},
                   {"at", format_timestamp(r.at)}};
        } else {
          j = json{{"type", "person"}, {"person_id", r.person_id}, {"name", r.name}, {"role", r.role}};
        }
        return j;
      },
      record);
}

void to_json(json& j, const IngestReport& r) {
  json rejected = json::array();
  for (const auto& x : r.rejected) rejected.push_back({{"line", x.line}, {"reason", x.reason}, {"detail", x.detail}});
  j = json{{"accepted", r.accepted}, {"duplicates", r.duplicates}, {"rejected", rejected}};
}

const TaskStream* StoreSnapshot::find(const std::string& task_id) const {
  auto it = tasks.find(task_id);
  return it == tasks.end() ? nullptr : &it->second;
}

std::vector<CueSession> StoreSnapshot::cue_sessions() const {
  std::vector<CueSession> out;
  for (const auto& [id, visits] : cue_visits) {
    if (visits.empty()) continue;
    const TaskStream* task = find(visits.front().task_id);
    std::vector<std::pair<CueType, Timestamp>> seq;
    seq.reserve(visits.size());
    for (const auto& v : visits) seq.emplace_back(v.cue, v.at);
    out.push_back(CueSession::from_visits(id, visits.front().task_id,
                                          task ? task->descriptor.task_type : TaskType::Other, seq));
  }
  return out;
}

EventStore::EventStore() : snapshot_(std::make_shared<const StoreSnapshot>()) {}

EventStore::EventStore(const std::filesystem::path& log_path) : EventStore() {
  path_ = log_path;
  if (std::filesystem::exists(log_path)) {
    std::ifstream in(log_path);
    if (!in) throw std::runtime_error("cannot read store " + log_path.string());
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(trim_cr(std::move(line)));
    const IngestReport report = commit(lines, false);
    if (!report.rejected.empty()) {
      const auto& r = report.rejected.front();
      throw std::runtime_error("store " + log_path.string() + " is inconsistent at line " + std::to_string(r.line) +
                               ": " + r.reason + " " + r.detail);
    }
  }
  log_.open(log_path, std::ios::app);
  if (!log_) throw std::runtime_error("cannot open store " + log_path.string() + " for appending");
}

std::shared_ptr<const StoreSnapshot> EventStore::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

IngestReport EventStore::ingest(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(trim_cr(std::move(line)));
  return commit(lines, true);
}

IngestReport EventStore::ingest_lines(std::span<const std::string> lines) { return commit(lines, true); }

IngestReport EventStore::ingest_json(const json& records) {
  std::vector<std::string> lines;
  if (records.is_array()) {
    for (const auto& r : records) lines.push_back(r.dump());
  } else {
    lines.push_back(records.dump());
  }
  return commit(lines, true);
}

IngestReport EventStore::commit(std::span<const std::string> lines, bool persist) {
  std::lock_guard write_lock(write_mutex_);
  auto next = std::make_shared<StoreSnapshot>(*snapshot());
  Ingestor ingestor(*next);
  IngestReport report;
  std::vector<const std::string*> accepted;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (blank(line)) continue;
    try {
      const json j = json::parse(line);
      if (ingestor.apply(parse_record(j))) {
        ++report.accepted;
        accepted.push_back(&line);
      } else {
        ++report.duplicates;
      }
    } catch (const json::parse_error& e) {
      report.rejected.push_back({i + 1, "MalformedLine", e.what()});
    } catch (const Ingestor::Rejected& r) {
      report.rejected.push_back({i + 1, r.reason, r.detail});
    } catch (const Error& e) {
      report.rejected.push_back({i + 1, std::string(to_string(e.code())), e.what()});
    }
  }

  if (accepted.empty()) return report;
  for (const std::string* line : accepted) next->lines.push_back(*line);
  next->watermark = next->lines.size();

  if (persist && log_.is_open()) {
    for (const std::string* line : accepted) log_ << *line << '\n';
    log_.flush();
    if (!log_) throw std::runtime_error("failed to append to store " + path_->string());
  }

  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(next);
  return report;
}

void EventStore::export_log(std::ostream& out) const {
  for (const auto& line : snapshot()->lines) out << line << '\n';
}

std::string open_session_id(const TaskStream& stream) {
  int closed = 0;
  for (const auto& t : stream.trace.transitions()) {
    if (t.state.phase == Phase::ResumptionPending && t.event.kind == EventKind::InterruptionEnded) ++closed;
  }
  return stream.descriptor.task_id + "#r" + std::to_string(closed);
}

Itemset switch_characteristics(const StoreSnapshot& snapshot, const TaskStream& primary, const TaskEvent& request,
                               const std::optional<std::string>& interrupting_task_id, const RecordOptions& options) {
  const TaskStream* other = interrupting_task_id ? snapshot.find(*interrupting_task_id) : nullptr;
  std::vector<Item> items;
  for (const auto& key : options.characteristic_keys) {
    std::string value;
    if (key == "initiator") {
      value = std::string(to_string(request.initiator.value_or(Initiator::Self)));
    } else if (key == "time_of_day") {
      value = std::string(to_string(time_of_day(request.at, options.utc_offset_minutes)));
    } else if (key == "context_switch") {
      value = other == nullptr ? "unknown"
              : other->descriptor.project == primary.descriptor.project ? "same_project"
                                                                         : "different_project";
    } else if (key == "interrupting_type") {
      value = other == nullptr ? "unknown" : std::string(to_string(other->descriptor.task_type));
    } else if (key == "priority_relation") {
      if (other == nullptr) {
        value = "unknown";
      } else {
        const int a = other->descriptor.priority, b = primary.descriptor.priority;
        value = a < b ? "higher" : a == b ? "same" : "lower";
      }
    } else if (key == "blockage") {
      value = request.blockage ? "yes" : "no";
    } else if (key == "boredom") {
      value = request.boredom ? "yes" : "no";
    } else {
      throw UnknownVocabularyItem("unknown characteristic key '" + key + "'");
    }
    items.push_back(Item::characteristic(key, std::move(value)));
  }
  return make_itemset(std::move(items));
}

std::vector<RawMiningRecord> raw_mining_records(const StoreSnapshot& snapshot, TaskType task_type,
                                                const RecordOptions& options) {
  std::vector<RawMiningRecord> out;
  for (const auto& [id, stream] : snapshot.tasks) {
    if (stream.descriptor.task_type != task_type) continue;
    const auto fragments = static_cast<double>(derive_measures(stream.trace).d1_fragments);

    const TaskEvent* request = nullptr;
    std::optional<std::size_t> open_episode;
    TaskState previous;
    for (const auto& [event, state] : stream.trace.transitions()) {
      if (previous.phase == Phase::Active && state.phase == Phase::InterruptionPending) request = &event;
      if (previous.phase == Phase::InterruptionPending && state.phase == Phase::Suspended) {
        const auto& interrupting =
            request->interrupting_task_id ? request->interrupting_task_id : event.interrupting_task_id;
        RawMiningRecord rec;
        rec.task_type = task_type;
        rec.characteristics = switch_characteristics(snapshot, stream, *request, interrupting, options);
        rec.measures[0] = fragments;
        rec.measures[2] = to_seconds(event.at - request->at);
        out.push_back(std::move(rec));
        open_episode = out.size() - 1;
      }
      if (previous.phase == Phase::ResumptionPending && state.phase == Phase::Active && open_episode) {
        out[*open_episode].measures[1] = to_seconds(event.at - *previous.interruption_ended_at);
        open_episode.reset();
      }
      previous = state;
    }
  }
  return out;
}

std::vector<MiningRecord> mining_records(const StoreSnapshot& snapshot, TaskType task_type,
                                         const Discretization& discretization, const RecordOptions& options) {
  if (snapshot.tasks.empty()) throw EmptyInput("store holds no tasks");
  const auto raw = raw_mining_records(snapshot, task_type, options);
  if (raw.empty()) return {};
  return discretize(raw, discretization);
}

std::int64_t CommunicationGraph::total_weight() const {
  std::int64_t total = 0;
  for (const auto& [edge, w] : edges) total += w;
  return total;
}

CommunicationGraph CommunicationGraph::slice(const std::string& person) const {
  CommunicationGraph out;
  if (auto it = nodes.find(person); it != nodes.end()) out.nodes.insert(*it);
  for (const auto& [edge, w] : edges) {
    if (edge.first != person && edge.second != person) continue;
    out.edges.emplace(edge, w);
    for (const auto& end : {edge.first, edge.second}) {
      if (auto it = nodes.find(end); it != nodes.end()) out.nodes.insert(*it);
    }
  }
  return out;
}

CommunicationGraph communication_graph(const StoreSnapshot& snapshot, std::optional<Timestamp> from,
                                       std::optional<Timestamp> to) {
  CommunicationGraph g;
  auto profile = [&](const std::string& person) -> PersonProfile& {
    auto [it, inserted] = g.nodes.try_emplace(person);
    if (inserted) {
      if (auto p = snapshot.persons.find(person); p != snapshot.persons.end()) {
        it->second.name = p->second.name;
        it->second.role = p->second.role;
      }
      for (const auto& [id, stream] : snapshot.tasks) {
        if (stream.descriptor.performer_id == person) it->second.projects.insert(stream.descriptor.project);
      }
    }
    return it->second;
  };

  for (const auto& [id, person] : snapshot.persons) profile(id);
  for (const auto& [id, stream] : snapshot.tasks) {
    for (const auto& t : stream.trace.transitions()) {
      const TaskEvent& e = t.event;
      if (e.kind != EventKind::SwitchRequested) continue;
      if ((from && e.at < *from) || (to && e.at >= *to)) continue;
      const std::string interrupted = e.performer_id.empty() ? stream.descriptor.performer_id : e.performer_id;
      const std::string requester =
          e.initiator == Initiator::Self ? interrupted : e.requester_id.value_or(std::string("unknown"));
      profile(requester);
      profile(interrupted);
      ++g.edges[{requester, interrupted}];
    }
  }
  return g;
}

void to_json(json& j, const CommunicationGraph& g) {
  json nodes = json::array();
  for (const auto& [id, p] : g.nodes) {
    nodes.push_back({{"id", id}, {"name", p.name}, {"role", p.role}, {"projects", p.projects}});
  }
  json edges = json::array();
  for (const auto& [edge, w] : g.edges) edges.push_back({{"from", edge.first}, {"to", edge.second}, {"weight", w}});
  j = json{{"nodes", nodes}, {"edges", edges}};
}

std::string to_dot(const CommunicationGraph& g) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream out;
  out << "digraph communication {\n";
  for (const auto& [id, p] : g.nodes) {
    out << "  " << quote(id);
    if (!p.name.empty()) out << " [label=" << quote(p.name) << "]";
    out << ";\n";
  }
  for (const auto& [edge, w] : g.edges) {
    out << "  " << quote(edge.first) << " -> " << quote(edge.second) << " [weight=" << w << ", penwidth=" << w
        << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace switchlens
