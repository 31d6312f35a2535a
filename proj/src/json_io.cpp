#include "switchlens/json_io.hpp"

#include "switchlens/errors.hpp"

namespace switchlens {

using nlohmann::json;

namespace {

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

std::optional<std::string> get_optional_string(const json& j, const char* key) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<std::string>();
  return std::nullopt;
}

json items_to_json(const Itemset& items) {
  json out = json::array();
  for (const auto& i : items) out.push_back(i.to_string());
  return out;
}

Itemset items_from_json(const json& j) {
  std::vector<Item> items;
  for (const auto& s : j) items.push_back(Item::parse(s.get<std::string>()));
  return make_itemset(std::move(items));
}

json seconds(const std::vector<Duration>& lags) {
  json out = json::array();
  for (auto d : lags) out.push_back(to_seconds(d));
  return out;
}

}  // namespace

void put_rational(json& j, const std::string& key, const Rational& r) {
  j[key] = r.to_double();
  j[key + "_exact"] = r.to_string();
}

Rational get_rational(const json& j, const std::string& key) {
  if (auto it = j.find(key + "_exact"); it != j.end()) return Rational::parse(it->get<std::string>());
  return Rational::parse(j.at(key).dump());
}

void to_json(json& j, const TaskDescriptor& d) {
  j = json{{"task_id", d.task_id},
           {"project", d.project},
           {"task_type", to_string(d.task_type)},
           {"granularity", to_string(d.granularity)},
           {"priority", d.priority},
           {"progress_status", to_string(d.progress_status)},
           {"performer_id", d.performer_id},
           {"performer_experience", d.performer_experience}};
}

void from_json(const json& j, TaskDescriptor& d) {
  d.task_id = j.at("task_id").get<std::string>();
  d.project = j.value("project", std::string{});
  d.task_type = parse_task_type(j.at("task_type").get<std::string>());
  d.granularity = parse_granularity(j.value("granularity", std::string{"coarse"}));
  d.priority = j.value("priority", 3);
  d.progress_status = parse_progress_status(j.value("progress_status", std::string{"not_started"}));
  d.performer_id = j.value("performer_id", std::string{});
  d.performer_experience = j.value("performer_experience", 0.0);
}

void to_json(json& j, const TaskEvent& e) {
  j = json{{"task_id", e.task_id},
           {"at", format_timestamp(e.at)},
           {"kind", to_string(e.kind)},
           {"performer_id", e.performer_id}};
  if (e.initiator) j["initiator"] = to_string(*e.initiator);
  put_optional(j, "interrupting_task_id", e.interrupting_task_id);
  put_optional(j, "requester_id", e.requester_id);
  put_optional(j, "annotations", e.annotations);
  put_optional(j, "thumbnail_id", e.thumbnail_id);
  if (e.blockage) j["blockage"] = true;
  if (e.boredom) j["boredom"] = true;
}

void from_json(const json& j, TaskEvent& e) {
  e.task_id = j.at("task_id").get<std::string>();
  e.at = parse_timestamp(j.at("at").get<std::string>());
  e.kind = parse_event_kind(j.at("kind").get<std::string>());
  e.performer_id = j.value("performer_id", std::string{});
  e.initiator.reset();
  if (auto it = j.find("initiator"); it != j.end() && !it->is_null()) {
    e.initiator = parse_initiator(it->get<std::string>());
  }
  e.interrupting_task_id = get_optional_string(j, "interrupting_task_id");
  e.requester_id = get_optional_string(j, "requester_id");
  e.annotations = get_optional_string(j, "annotations");
  e.thumbnail_id = get_optional_string(j, "thumbnail_id");
  e.blockage = j.value("blockage", false);
  e.boredom = j.value("boredom", false);
}

void to_json(json& j, const TaskState& s) {
  j = json{{"phase", to_string(s.phase)}, {"fragment_index", s.fragment_index}, {"depth", s.depth}};
  if (s.alert_at) j["alert_at"] = format_timestamp(*s.alert_at);
  if (s.suspended_at) j["suspended_at"] = format_timestamp(*s.suspended_at);
  if (s.interruption_ended_at) j["interruption_ended_at"] = format_timestamp(*s.interruption_ended_at);
}

void to_json(json& j, const DisruptivenessMeasures& m) {
  j = json{{"d1_fragments", m.d1_fragments},
           {"d2_resumption_lags", seconds(m.d2_resumption_lags)},
           {"d3_interruption_lags", seconds(m.d3_interruption_lags)},
           {"suspension_durations", seconds(m.suspension_durations)},
           {"nested_depth_max", m.nested_depth_max}};
}

void to_json(json& j, const AssociationRule& r) {
  j = json{{"task_type", to_string(r.task_type)},
           {"antecedent", items_to_json(r.antecedent)},
           {"consequent", items_to_json(r.consequent)}};
  put_rational(j, "support", r.support);
  put_rational(j, "confidence", r.confidence);
}

void from_json(const json& j, AssociationRule& r) {
  r.task_type = parse_task_type(j.at("task_type").get<std::string>());
  r.antecedent = items_from_json(j.at("antecedent"));
  r.consequent = items_from_json(j.at("consequent"));
  r.support = get_rational(j, "support");
  r.confidence = get_rational(j, "confidence");
}

void to_json(json& j, const CueSequenceRule& r) {
  json seq = json::array();
  for (CueType c : r.sequence) seq.push_back(to_string(c));
  j = json{{"sequence", seq}};
  put_rational(j, "support", r.support);
  put_rational(j, "confidence", r.confidence);
  j["task_type"] = r.task_type ? json(to_string(*r.task_type)) : json(nullptr);
}

void from_json(const json& j, CueSequenceRule& r) {
  r.sequence.clear();
  for (const auto& c : j.at("sequence")) r.sequence.push_back(parse_cue_type(c.get<std::string>()));
  r.support = get_rational(j, "support");
  r.confidence = get_rational(j, "confidence");
  r.task_type.reset();
  if (auto it = j.find("task_type"); it != j.end() && !it->is_null()) {
    r.task_type = parse_task_type(it->get<std::string>());
  }
}

void to_json(json& j, const CueGraph& g) {
  json nodes = json::array();
  for (CueType c : g.nodes) nodes.push_back(to_string(c));
  json edges = json::array();
  for (const auto& [edge, w] : g.edges) {
    edges.push_back({{"from", to_string(edge.first)}, {"to", to_string(edge.second)}, {"weight", w}});
  }
  j = json{{"nodes", nodes}, {"edges", edges}};
}

void to_json(json& j, const NarrativeRule& n) {
  j = json{{"text", n.text}};
  std::visit(
      [&](const auto& r) {
        j["kind"] = std::is_same_v<std::decay_t<decltype(r)>, AssociationRule> ? "disruptiveness" : "cue_sequence";
        j["rule"] = r;
      },
      n.rule);
}

std::string regenerate_text(const json& narrative, const Lexicon& lexicon) {
  const std::string kind = narrative.at("kind").get<std::string>();
  if (kind == "disruptiveness") return render(narrative.at("rule").get<AssociationRule>(), lexicon).text;
  if (kind == "cue_sequence") return render(narrative.at("rule").get<CueSequenceRule>(), lexicon).text;
  throw ParseError("unknown narrative kind '" + kind + "'");
}

}  // namespace switchlens
