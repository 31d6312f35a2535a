#include "switchlens/advisor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "switchlens/errors.hpp"
#include "switchlens/json_io.hpp"

namespace switchlens {

using nlohmann::json;

namespace {

ApiResponse error(int status, const std::string& message) { return {status, json{{"error", message}}}; }

std::optional<std::string> param(const Query& q, const std::string& key) {
  if (auto it = q.find(key); it != q.end() && !it->second.empty()) return it->second;
  return std::nullopt;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParseError("expected a boolean, got '" + s + "'");
}

Rational unit_interval(const std::string& text, const char* what) {
  const Rational r = Rational::parse(text);
  if (r <= Rational{0} || r > Rational{1}) throw ParseError(std::string(what) + " must be in (0, 1]");
  return r;
}

bool subset(const Itemset& small, const Itemset& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

json narratives(const std::vector<AssociationRule>& rules, const Lexicon& lexicon) {
  json out = json::array();
  for (const auto& r : rules) out.push_back(render_disruptiveness(r, r.task_type, lexicon));
  return out;
}

bool resumable(const TaskStream& s) {
  const auto& st = s.trace.final_state();
  if (st.phase == Phase::ResumptionPending) return true;
  return st.phase == Phase::Active && !s.trace.transitions().empty() &&
         s.trace.transitions().back().event.kind == EventKind::Resumed;
}

}  // namespace

Discretization parse_discretization(std::string_view spec) {
  Discretization d;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto end = std::min(spec.find(',', start), spec.size());
    const std::string_view part = spec.substr(start, end - start);
    start = end + 1;
    if (part.empty()) {
      if (end == spec.size()) break;
      continue;
    }
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw ParseError("discretization entry '" + std::string(part) + "' lacks '='");
    const Measure m = parse_measure(part.substr(0, eq));
    const std::string value(part.substr(eq + 1));
    if (value == "median") {
      d[m] = Threshold::median();
    } else {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || !std::isfinite(v)) throw ParseError("bad threshold '" + value + "'");
      d[m] = Threshold::fixed(v);
    }
    if (end == spec.size()) break;
  }
  return d;
}

std::string describe_discretization(const Discretization& d) {
  std::string out;
  for (Measure m : {Measure::D1, Measure::D2, Measure::D3}) {
    if (!out.empty()) out += ",";
    std::ostringstream v;
    if (d[m].mode == Threshold::Mode::Median) {
      v << "median";
    } else {
      v << d[m].value;
    }
    out += std::string(to_string(m)) + "=" + v.str();
  }
  return out;
}

ServiceConfig ServiceConfig::from_json(const json& j) {
  ServiceConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    if (j.contains("store")) c.store_path = j.at("store").get<std::string>();
    if (j.contains("lexicon")) c.lexicon_path = j.at("lexicon").get<std::string>();
    if (j.contains("trap_horizon_hours")) {
      c.trap_horizon = std::chrono::duration_cast<Duration>(
          std::chrono::duration<double, std::ratio<3600>>(j.at("trap_horizon_hours").get<double>()));
    }
    if (j.contains("discretization")) c.discretization = parse_discretization(j.at("discretization").get<std::string>());
    c.records.utc_offset_minutes = j.value("timezone_offset_minutes", 0);
    if (j.contains("characteristics")) {
      c.records.characteristic_keys = j.at("characteristics").get<std::vector<std::string>>();
    }
    auto rational = [&](const char* key, Rational& out) {
      if (j.contains(key)) out = unit_interval(j.at(key).is_string() ? j.at(key).get<std::string>() : j.at(key).dump(), key);
    };
    rational("min_support", c.min_support);
    rational("min_confidence", c.min_confidence);
    rational("cue_min_support", c.cue_min_support);
    c.cue_max_len = j.value("cue_max_len", c.cue_max_len);
    if (j.contains("first_reminder_minutes")) {
      c.default_first_reminder = std::chrono::duration_cast<Duration>(
          std::chrono::duration<double, std::ratio<60>>(j.at("first_reminder_minutes").get<double>()));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (c.trap_horizon <= Duration::zero()) throw ParseError("config: trap horizon must be positive");
  if (c.cue_max_len < 2) throw ParseError("config: cue_max_len must be at least 2");
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path.string() + ": " + e.what());
  }
}

void ServiceConfig::apply_environment(const EnvLookup& getenv) {
  auto get = [&](const char* name) -> std::optional<std::string> {
    const char* v = getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  try {
    if (auto v = get("SWITCHLENS_HOST")) host = *v;
    if (auto v = get("SWITCHLENS_PORT")) port = std::stoi(*v);
    if (auto v = get("SWITCHLENS_STORE")) store_path = *v;
    if (auto v = get("SWITCHLENS_LEXICON")) lexicon_path = *v;
    if (auto v = get("SWITCHLENS_TRAP_HORIZON_HOURS")) {
      trap_horizon = std::chrono::duration_cast<Duration>(std::chrono::duration<double, std::ratio<3600>>(std::stod(*v)));
    }
    if (auto v = get("SWITCHLENS_DISCRETIZATION")) discretization = parse_discretization(*v);
    if (auto v = get("SWITCHLENS_TZ_OFFSET_MINUTES")) records.utc_offset_minutes = std::stoi(*v);
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("environment override: ") + e.what());
  }
}

void ServiceConfig::apply_environment() { apply_environment([](const char* n) { return std::getenv(n); }); }

std::vector<Duration> reminder_offsets(Duration first, Duration horizon) {
  std::vector<Duration> out;
  if (first <= Duration::zero()) first = std::chrono::minutes{1};
  for (Duration d = first; d < horizon; d *= 2) out.push_back(d);
  out.push_back(horizon);
  return out;
}

Advisor::Advisor(EventStore& store, ServiceConfig config, Lexicon lexicon, Clock clock)
    : store_(store), config_(std::move(config)), lexicon_(std::move(lexicon)), clock_(std::move(clock)) {
  if (!clock_) {
    clock_ = [] { return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now()); };
  }
}

Timestamp Advisor::now(const Query& query) const {
  if (auto v = param(query, "now")) return parse_timestamp(*v);
  return clock_();
}

std::vector<AssociationRule> Advisor::rules_for(const StoreSnapshot& snapshot, TaskType task_type,
                                                const Rational& min_support, const Rational& min_confidence) const {
  const CacheKey key{snapshot.watermark, task_type, min_support, min_confidence};
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  MiningParams params{min_support, min_confidence, task_type, config_.discretization};
  auto rules = mine(raw_mining_records(snapshot, task_type, config_.records), params);
  std::lock_guard lock(cache_mutex_);
  if (cache_.size() > 64) cache_.clear();
  cache_.emplace(key, rules);
  return rules;
}

ApiResponse Advisor::post_events(const std::string& body) {
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {200, IngestReport{}};
  if (body[first] == '[' || body[first] == '{') {
    json parsed;
    try {
      parsed = json::parse(body);
    } catch (const json::parse_error& e) {
      // A '{' may also open a JSON-lines body.
      if (body[first] == '[') return error(400, std::string("malformed body: ") + e.what());
      std::istringstream in(body);
      return {200, store_.ingest(in)};
    }
    if (!parsed.is_array() && !parsed.is_object()) return error(400, "body must be an array of records");
    return {200, store_.ingest_json(parsed)};
  }
  return error(400, "body must be JSON records (array or one object per line)");
}

ApiResponse Advisor::switch_advice(const Query& query) const {
  const auto snap = store_.snapshot();
  const auto task_id = param(query, "task");
  if (!task_id) return error(400, "missing 'task'");
  const TaskStream* stream = snap->find(*task_id);
  if (stream == nullptr) return error(404, "unknown task " + *task_id);
  if (stream->trace.final_state().phase != Phase::Active) {
    return error(409, "task " + *task_id + " is " + std::string(to_string(stream->trace.final_state().phase)) +
                          ", not Active");
  }

  TaskEvent request;
  request.task_id = *task_id;
  request.kind = EventKind::SwitchRequested;
  request.performer_id = stream->descriptor.performer_id;
  std::optional<std::string> time_bucket;
  try {
    const auto initiator = param(query, "initiator");
    if (!initiator) return error(400, "missing 'initiator'");
    request.initiator = parse_initiator(*initiator);
    request.at = now(query);
    if (auto t = param(query, "time")) {
      if (*t == "morning" || *t == "afternoon" || *t == "evening") {
        time_bucket = *t;
      } else {
        request.at = parse_timestamp(*t);
      }
    }
    request.requester_id = param(query, "requester");
    if (auto v = param(query, "blockage")) request.blockage = parse_bool(*v);
    if (auto v = param(query, "boredom")) request.boredom = parse_bool(*v);
  } catch (const Error& e) {
    return error(400, e.what());
  }

  Itemset context =
      switch_characteristics(*snap, *stream, request, param(query, "interrupting_task"), config_.records);
  if (time_bucket) {
    for (auto& item : context) {
      if (item.key == "time_of_day") item.value = *time_bucket;
    }
    context = make_itemset(std::move(context));
  }

  std::vector<AssociationRule> matching;
  for (auto& r : rules_for(*snap, stream->descriptor.task_type, config_.min_support, config_.min_confidence)) {
    if (subset(r.antecedent, context)) matching.push_back(std::move(r));
  }
  // A more specific matching rule subsumes the general ones it extends.
  matching = maximal_rules(matching);

  json predicted = json::object();
  for (Measure m : {Measure::D1, Measure::D2, Measure::D3}) {
    for (std::size_t i = 0; i < matching.size(); ++i) {
      const auto it = std::find_if(matching[i].consequent.begin(), matching[i].consequent.end(),
                                   [&](const Item& item) { return item.key == to_string(m); });
      if (it == matching[i].consequent.end()) continue;
      json p{{"level", it->value}, {"rule_index", i}};
      put_rational(p, "confidence", matching[i].confidence);
      predicted[std::string(to_string(m))] = p;
      break;
    }
  }

  const std::string requester = request.initiator == Initiator::Self
                                    ? stream->descriptor.performer_id
                                    : request.requester_id.value_or(std::string("unknown"));
  json ctx = json::array();
  for (const auto& item : context) ctx.push_back(item.to_string());

  return {200, json{{"task", *task_id},
                    {"task_type", to_string(stream->descriptor.task_type)},
                    {"watermark", snap->watermark},
                    {"context", ctx},
                    {"rules", narratives(matching, lexicon_)},
                    {"predicted", predicted},
                    {"flags", {{"blockage", request.blockage}, {"boredom", request.boredom}}},
                    {"requester", requester},
                    {"graph", communication_graph(*snap).slice(requester)}}};
}

ApiResponse Advisor::suspension(const std::string& task_id, const Query& query) const {
  const auto snap = store_.snapshot();
  const TaskStream* stream = snap->find(task_id);
  if (stream == nullptr) return error(404, "unknown task " + task_id);
  const TaskState& state = stream->trace.final_state();
  if (state.phase != Phase::Suspended && state.phase != Phase::ResumptionPending) {
    return error(409, "task " + task_id + " is " + std::string(to_string(state.phase)) + ", not suspended");
  }
  Timestamp at;
  try {
    at = now(query);
  } catch (const Error& e) {
    return error(400, e.what());
  }

  const TaskType type = stream->descriptor.task_type;
  std::vector<double> lags;
  for (const auto& [id, other] : snap->tasks) {
    if (other.descriptor.task_type != type) continue;
    for (auto d : derive_measures(other.trace).d2_resumption_lags) lags.push_back(static_cast<double>(d.count()));
  }
  const Duration first = lags.empty() ? config_.default_first_reminder
                                      : Duration{static_cast<Duration::rep>(median(std::move(lags)))};
  const bool trap = detect_trap(stream->trace, at, config_.trap_horizon);

  json schedule = json::array();
  const auto offsets = reminder_offsets(first, config_.trap_horizon);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    json modalities = i == 0                      ? json{"popup", "visual_pin"}
                      : i + 1 == offsets.size()   ? json{"popup", "verbal", "email"}
                                                  : json{"popup", "sound"};
    const Timestamp when = *state.suspended_at + offsets[i];
    schedule.push_back({{"at", format_timestamp(when)},
                        {"offset_seconds", to_seconds(offsets[i])},
                        {"modalities", modalities},
                        {"due", when <= at}});
  }

  // Insight: rules that match the characteristics of the switch that opened this suspension.
  json insight = json::array();
  const auto& transitions = stream->trace.transitions();
  for (std::size_t i = transitions.size(); i-- > 0;) {
    if (transitions[i].state.phase == Phase::InterruptionPending) {
      const TaskEvent& request = transitions[i].event;
      const Itemset context =
          switch_characteristics(*snap, *stream, request, request.interrupting_task_id, config_.records);
      std::vector<AssociationRule> matching;
      for (auto& r : rules_for(*snap, type, config_.min_support, config_.min_confidence)) {
        if (subset(r.antecedent, context)) matching.push_back(std::move(r));
      }
      insight = narratives(maximal_rules(matching), lexicon_);
      break;
    }
  }

  const Duration elapsed = at - *state.suspended_at;
  std::ostringstream text;
  text << lexicon_.task_phrase(type) << " task " << task_id << " has been set aside for "
       << std::chrono::duration_cast<std::chrono::minutes>(elapsed).count() << " min; " << state.fragment_index
       << (state.fragment_index == 1 ? " fragment" : " fragments") << " so far";
  if (state.depth > 1) text << ", " << state.depth << " interruptions deep";
  text << (trap ? ". It is at risk of never being resumed." : ".");
  std::string reminder = text.str();
  reminder[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(reminder[0])));

  return {200, json{{"task", task_id},
                    {"phase", to_string(state.phase)},
                    {"watermark", snap->watermark},
                    {"fragment_count", state.fragment_index},
                    {"depth", state.depth},
                    {"suspended_at", format_timestamp(*state.suspended_at)},
                    {"elapsed_seconds", to_seconds(elapsed)},
                    {"trap_risk", trap},
                    {"escalated", trap},
                    {"trap_horizon_seconds", to_seconds(config_.trap_horizon)},
                    {"reminder_schedule", schedule},
                    {"reminder_text", reminder},
                    {"rules", insight}}};
}

ApiResponse Advisor::resumption_cues(const std::string& task_id) const {
  const auto snap = store_.snapshot();
  const TaskStream* stream = snap->find(task_id);
  if (stream == nullptr) return error(404, "unknown task " + task_id);
  if (!resumable(*stream)) {
    return error(409, "task " + task_id + " is " + std::string(to_string(stream->trace.final_state().phase)) +
                          ", not awaiting resumption");
  }
  const TaskType type = stream->descriptor.task_type;
  std::vector<CueSession> sessions;
  for (auto& s : snap->cue_sessions()) {
    if (s.task_type == type) sessions.push_back(std::move(s));
  }
  const auto rules = mine_sequences_for_type(sessions, type, config_.cue_min_support, config_.cue_max_len);
  const CueGraph graph = build_graph(sessions);
  const auto order = recommend_order(type, rules, graph);

  json annotations = json::array();
  json thumbnails = json::array();
  for (const auto& t : stream->trace.transitions()) {
    if (t.event.annotations) annotations.push_back(*t.event.annotations);
    if (t.event.thumbnail_id) thumbnails.push_back(*t.event.thumbnail_id);
  }
  json cues = json::array();
  for (CueType c : order) {
    json refs = json::array();
    if (c == CueType::Annotation) refs = annotations;
    if (c == CueType::Thumbnail) refs = thumbnails;
    cues.push_back({{"cue", to_string(c)}, {"label", lexicon_.cue_phrase(c)}, {"references", refs}});
  }
  json rule_payload = json::array();
  for (const auto& r : rules) rule_payload.push_back(render_cue_sequence(r, lexicon_));

  return {200, json{{"task", task_id},
                    {"task_type", to_string(type)},
                    {"watermark", snap->watermark},
                    {"session_id", open_session_id(*stream)},
                    {"cues", cues},
                    {"recall_time_seconds", to_seconds(kRecallTime)},
                    {"rules", rule_payload},
                    {"graph", graph}}};
}

ApiResponse Advisor::post_cue_visit(const std::string& task_id, const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    return error(400, std::string("malformed body: ") + e.what());
  }
  if (!j.is_object() || !j.contains("cue") || !j.at("cue").is_string()) return error(400, "body needs a 'cue' string");

  CueVisitRecord visit;
  try {
    visit.cue = parse_cue_type(j.at("cue").get<std::string>());
    visit.at = j.contains("at") ? parse_timestamp(j.at("at").get<std::string>()) : clock_();
  } catch (const std::exception& e) {
    return error(400, e.what());
  }

  const auto snap = store_.snapshot();
  const TaskStream* stream = snap->find(task_id);
  if (stream == nullptr) return error(404, "unknown task " + task_id);
  if (!resumable(*stream)) return error(409, "task " + task_id + " has no open resumption session");
  visit.task_id = task_id;
  visit.session_id = open_session_id(*stream);

  const auto report = store_.ingest_json(record_to_json(visit));
  if (!report.rejected.empty()) return error(400, report.rejected.front().reason + ": " + report.rejected.front().detail);
  return {204, nullptr};
}

ApiResponse Advisor::communication(const Query& query) const {
  const auto snap = store_.snapshot();
  std::optional<Timestamp> from, to;
  try {
    if (auto v = param(query, "from")) from = parse_timestamp(*v);
    if (auto v = param(query, "to")) to = parse_timestamp(*v);
  } catch (const Error& e) {
    return error(400, e.what());
  }
  json body = communication_graph(*snap, from, to);
  body["watermark"] = snap->watermark;
  return {200, body};
}

ApiResponse Advisor::patterns(const Query& query) const {
  const auto snap = store_.snapshot();
  TaskType type{};
  Rational min_support = config_.min_support, min_confidence = config_.min_confidence;
  try {
    const auto t = param(query, "task_type");
    if (!t) return error(400, "missing 'task_type'");
    type = parse_task_type(*t);
    if (auto v = param(query, "min_support")) min_support = unit_interval(*v, "min_support");
    if (auto v = param(query, "min_confidence")) min_confidence = unit_interval(*v, "min_confidence");
  } catch (const Error& e) {
    return error(400, e.what());
  }
  json body{{"task_type", to_string(type)}, {"watermark", snap->watermark}};
  put_rational(body, "min_support", min_support);
  put_rational(body, "min_confidence", min_confidence);
  body["discretization"] = describe_discretization(config_.discretization);
  const auto rules = rules_for(*snap, type, min_support, min_confidence);
  body["rules"] = narratives(rules, lexicon_);
  body["maximal_rules"] = narratives(maximal_rules(rules), lexicon_);
  return {200, body};
}

}  // namespace switchlens
