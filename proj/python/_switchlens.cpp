// Thin binding layer: structured values cross the boundary as JSON text and
// the Python package decodes them.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "switchlens/advisor.hpp"
#include "switchlens/cue_miner.hpp"
#include "switchlens/errors.hpp"
#include "switchlens/event_store.hpp"
#include "switchlens/json_io.hpp"
#include "switchlens/narrative.hpp"
#include "switchlens/pattern_miner.hpp"
#include "switchlens/task_model.hpp"

namespace py = pybind11;
using namespace switchlens;
using nlohmann::json;

namespace {

std::vector<RawMiningRecord> raw_records(const std::string& text) {
  std::vector<RawMiningRecord> out;
  for (const auto& j : json::parse(text)) {
    RawMiningRecord r;
    r.task_type = parse_task_type(j.at("task_type").get<std::string>());
    std::vector<Item> items;
    for (const auto& s : j.at("characteristics")) {
      Item item = Item::parse(s.get<std::string>());
      if (item.side != Side::Characteristic) throw InvalidRecord("'" + item.to_string() + "' is not a characteristic");
      items.push_back(std::move(item));
    }
    r.characteristics = make_itemset(std::move(items));
    const auto& m = j.value("measures", json::object());
    for (Measure measure : {Measure::D1, Measure::D2, Measure::D3}) {
      const std::string key(to_string(measure));
      if (m.contains(key) && !m.at(key).is_null()) r.measures[static_cast<std::size_t>(measure)] = m.at(key).get<double>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string rules_json(const std::vector<AssociationRule>& rules) {
  json out = json::array();
  for (const auto& r : rules) out.push_back(render_disruptiveness(r, r.task_type));
  return out.dump();
}

std::string mine_records(const std::string& records, const std::string& task_type, const std::string& min_support,
                         const std::string& min_confidence, const std::string& thresholds, bool maximal_only) {
  MiningParams p;
  p.task_type = parse_task_type(task_type);
  p.min_support = Rational::parse(min_support);
  p.min_confidence = Rational::parse(min_confidence);
  p.discretization = parse_discretization(thresholds);
  auto rules = mine(raw_records(records), p);
  return rules_json(maximal_only ? maximal_rules(rules) : rules);
}

std::vector<CueSession> sessions_from(const std::vector<std::vector<std::string>>& sessions) {
  std::vector<CueSession> out;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    std::vector<std::pair<CueType, Timestamp>> visits;
    for (const auto& c : sessions[i]) visits.emplace_back(parse_cue_type(c), Timestamp{});
    out.push_back(CueSession::from_visits("s" + std::to_string(i), "", TaskType::Other, visits));
  }
  return out;
}

std::string mine_cue_sequences(const std::vector<std::vector<std::string>>& sessions, const std::string& min_support,
                               std::size_t max_len) {
  json out = json::array();
  for (const auto& r : mine_sequences(sessions_from(sessions), Rational::parse(min_support), max_len)) {
    out.push_back(r);
  }
  return out.dump();
}

std::vector<std::string> recommend(const std::string& task_type, const std::string& rules) {
  std::vector<CueSequenceRule> parsed;
  for (const auto& j : json::parse(rules)) parsed.push_back(j.get<CueSequenceRule>());
  std::vector<std::string> out;
  for (CueType c : recommend_order(parse_task_type(task_type), parsed, CueGraph{})) out.emplace_back(to_string(c));
  return out;
}

std::string replay_measures(const std::string& descriptor, const std::string& events) {
  const auto d = json::parse(descriptor).get<TaskDescriptor>();
  std::vector<TaskEvent> evs;
  for (const auto& j : json::parse(events)) evs.push_back(j.get<TaskEvent>());
  const TaskTrace trace = replay(d, evs);
  return json{{"state", trace.final_state()}, {"measures", derive_measures(trace)}}.dump();
}

std::string render_rule(const std::string& rule) {
  const json j = json::parse(rule);
  if (j.contains("sequence")) return render(j.get<CueSequenceRule>()).text;
  return render(j.get<AssociationRule>()).text;
}

class PyStore {
 public:
  explicit PyStore(const std::optional<std::string>& path)
      : store_(path ? std::make_unique<EventStore>(*path) : std::make_unique<EventStore>()) {}

  std::string ingest(const std::vector<std::string>& lines) { return json(store_->ingest_lines(lines)).dump(); }

  std::string export_log() const {
    std::ostringstream out;
    store_->export_log(out);
    return out.str();
  }

  std::string mine(const std::string& task_type, const std::string& min_support, const std::string& min_confidence,
                   const std::string& thresholds, const std::vector<std::string>& characteristics,
                   bool maximal_only) const {
    MiningParams p;
    p.task_type = parse_task_type(task_type);
    p.min_support = Rational::parse(min_support);
    p.min_confidence = Rational::parse(min_confidence);
    p.discretization = parse_discretization(thresholds);
    RecordOptions opts;
    if (!characteristics.empty()) opts.characteristic_keys = characteristics;
    auto rules = switchlens::mine(raw_mining_records(*store_->snapshot(), p.task_type, opts), p);
    return rules_json(maximal_only ? maximal_rules(rules) : rules);
  }

  std::string graph(const std::optional<std::string>& from, const std::optional<std::string>& to) const {
    std::optional<Timestamp> f, t;
    if (from) f = parse_timestamp(*from);
    if (to) t = parse_timestamp(*to);
    return json(communication_graph(*store_->snapshot(), f, t)).dump();
  }

  std::string task_state(const std::string& task_id) const {
    const auto snap = store_->snapshot();
    const TaskStream* s = snap->find(task_id);
    if (s == nullptr) throw py::key_error(task_id);
    return json{{"state", s->trace.final_state()}, {"measures", derive_measures(s->trace)}}.dump();
  }

 private:
  std::unique_ptr<EventStore> store_;
};

}  // namespace

PYBIND11_MODULE(_switchlens, m) {
  m.doc() = "Native core of the switchlens package";

  static py::exception<Error> error_type(m, "SwitchlensError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("mine_records", &mine_records, py::arg("records"), py::arg("task_type"), py::arg("min_support"),
        py::arg("min_confidence"), py::arg("thresholds"), py::arg("maximal_only"));
  m.def("mine_cue_sequences", &mine_cue_sequences, py::arg("sessions"), py::arg("min_support"), py::arg("max_len"));
  m.def("recommend_order", &recommend, py::arg("task_type"), py::arg("rules"));
  m.def("replay", &replay_measures, py::arg("descriptor"), py::arg("events"));
  m.def("render", &render_rule, py::arg("rule"));

  py::class_<PyStore>(m, "Store")
      .def(py::init<const std::optional<std::string>&>(), py::arg("path") = py::none())
      .def("ingest", &PyStore::ingest, py::arg("lines"))
      .def("export", &PyStore::export_log)
      .def("mine", &PyStore::mine, py::arg("task_type"), py::arg("min_support"), py::arg("min_confidence"),
           py::arg("thresholds"), py::arg("characteristics"), py::arg("maximal_only"))
      .def("graph", &PyStore::graph, py::arg("start") = py::none(), py::arg("end") = py::none())
      .def("task_state", &PyStore::task_state, py::arg("task_id"));
}
