#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "support/fixtures.hpp"
#include "switchlens/errors.hpp"
#include "switchlens/event_store.hpp"

using namespace switchlens;
using nlohmann::json;
using fixtures::c;

namespace {

std::string desc_line(const std::string& id, const std::string& type = "modeling", const std::string& project = "P1",
                      const std::string& performer = "alice", int priority = 3) {
  return json{{"type", "descriptor"}, {"task_id", id},           {"task_type", type},
              {"project", project},   {"performer_id", performer}, {"priority", priority}}
      .dump();
}

std::string ev_line(const std::string& task, const std::string& at, const std::string& kind, json extra = json::object()) {
  json j{{"type", "event"}, {"task_id", task}, {"at", at}, {"kind", kind}, {"performer_id", "alice"}};
  j.update(extra);
  return j.dump();
}

std::string person_line(const std::string& id, const std::string& name, const std::string& role = "analyst") {
  return json{{"type", "person"}, {"person_id", id}, {"name", name}, {"role", role}}.dump();
}

IngestReport ingest(EventStore& store, const std::vector<std::string>& lines) { return store.ingest_lines(lines); }

std::filesystem::path temp_path(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("switchlens_test_" + name + ".jsonl");
  std::filesystem::remove(p);
  return p;
}

// Morning self-interruption of M1 toward A1 (same project), closed and resumed.
std::vector<std::string> one_interruption() {
  return {
      desc_line("M1"),
      desc_line("A1", "analysis", "P1", "alice", 1),
      ev_line("M1", "2024-03-04T09:00:00Z", "Started"),
      ev_line("M1", "2024-03-04T09:30:00Z", "SwitchRequested", {{"initiator", "self"}, {"interrupting_task_id", "A1"}}),
      ev_line("M1", "2024-03-04T09:45:00Z", "Suspended"),
      ev_line("M1", "2024-03-04T10:30:00Z", "InterruptionEnded"),
      ev_line("M1", "2024-03-04T10:34:00Z", "Resumed"),
      ev_line("M1", "2024-03-04T11:00:00Z", "Completed"),
  };
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("empty input") {
    EventStore store;
    std::istringstream in("");
    const auto r = store.ingest(in);
    CHECK(r.accepted == 0);
    CHECK(r.duplicates == 0);
    CHECK(r.rejected.empty());
    CHECK(json(r) == json{{"accepted", 0}, {"duplicates", 0}, {"rejected", json::array()}});
  }

  TEST_CASE("duplicate event is skipped and counted") {
    EventStore store;
    auto lines = one_interruption();
    lines.push_back(lines[3]);
    const auto r = ingest(store, lines);
    CHECK(r.accepted == lines.size() - 1);
    CHECK(r.duplicates == 1);
    CHECK(r.rejected.empty());
    // re-ingesting everything is a no-op
    const auto again = ingest(store, lines);
    CHECK(again.accepted == 0);
    CHECK(again.duplicates == lines.size());
  }

  TEST_CASE("rejections carry line numbers and reasons") {
    EventStore store;
    const auto r = ingest(store, {
                                     desc_line("M1"),
                                     ev_line("X9", "2024-03-04T09:00:00Z", "Started"),
                                     "{not json",
                                     ev_line("M1", "2024-03-04T09:00:00Z", "Resumed"),
                                     json{{"type", "descriptor"}, {"task_id", "M1"}, {"task_type", "analysis"}}.dump(),
                                     json{{"type", "mystery"}}.dump(),
                                     ev_line("M1", "2024-03-04T09:00:00Z", "SwitchRequested"),
                                     "",
                                     ev_line("M1", "yesterday", "Started"),
                                 });
    CHECK(r.accepted == 1);
    REQUIRE(r.rejected.size() == 7);
    CHECK(r.rejected[0].line == 2);
    CHECK(r.rejected[0].reason == "UnknownTask");
    CHECK(r.rejected[1].reason == "MalformedLine");
    CHECK(r.rejected[2].reason == "IllegalTransition");
    CHECK(r.rejected[3].reason == "DescriptorConflict");
    CHECK(r.rejected[4].reason == "InvalidRecord");
    CHECK(r.rejected[5].reason == "InvalidRecord");  // missing initiator
    CHECK(r.rejected[6].line == 9);
    CHECK(r.rejected[6].reason == "ParseError");
  }

  TEST_CASE("per-task streams stay ordered") {
    EventStore store;
    const auto r = ingest(store, {desc_line("M1"), ev_line("M1", "2024-03-04T09:00:00Z", "Started"),
                                  ev_line("M1", "2024-03-04T08:00:00Z", "Completed")});
    REQUIRE(r.rejected.size() == 1);
    CHECK(r.rejected[0].reason == "NonMonotonicTimestamp");
  }

  TEST_CASE("json array ingestion") {
    EventStore store;
    CHECK(store.ingest_json(json::array()).accepted == 0);
    json arr = json::array();
    for (const auto& l : one_interruption()) arr.push_back(json::parse(l));
    CHECK(store.ingest_json(arr).accepted == arr.size());
    CHECK(store.snapshot()->find("M1")->trace.final_state().phase == Phase::Completed);
  }

  TEST_CASE("snapshots are immutable") {
    EventStore store;
    ingest(store, {desc_line("M1")});
    const auto before = store.snapshot();
    ingest(store, {ev_line("M1", "2024-03-04T09:00:00Z", "Started")});
    CHECK(before->find("M1")->trace.transitions().empty());
    CHECK(store.snapshot()->find("M1")->trace.transitions().size() == 1);
    CHECK(store.snapshot()->watermark == before->watermark + 1);
  }

  TEST_CASE("readers run alongside a writer") {
    EventStore store;
    const auto lines = fixtures::synthetic_log(99, 2000);
    std::atomic<bool> done{false};
    std::atomic<bool> consistent{true};
    std::thread reader([&] {
      while (!done) {
        const auto snap = store.snapshot();
        std::size_t events = 0;
        for (const auto& [id, s] : snap->tasks) events += s.trace.transitions().size();
        if (events + snap->tasks.size() + snap->persons.size() != snap->lines.size()) consistent = false;
      }
    });
    for (std::size_t i = 0; i < lines.size(); i += 50) {
      const auto end = std::min(lines.size(), i + 50);
      store.ingest_lines(std::span<const std::string>(lines.data() + i, end - i));
    }
    done = true;
    reader.join();
    CHECK(consistent);
    CHECK(store.snapshot()->lines.size() == lines.size());
  }
}

TEST_SUITE("persistence") {
  TEST_CASE("export is byte-identical to accepted input") {
    EventStore store;
    auto lines = one_interruption();
    lines[0] = "{\"type\":\"descriptor\",  \"task_id\":\"M1\", \"task_type\":\"modeling\", \"project\":\"P1\"}";
    lines.insert(lines.begin() + 2, "garbage");
    ingest(store, lines);
    std::ostringstream out;
    store.export_log(out);
    std::string expected;
    for (const auto& l : lines) {
      if (l != "garbage") expected += l + "\n";
    }
    CHECK(out.str() == expected);
  }

  TEST_CASE("reopening a log rebuilds the same snapshot") {
    const auto path = temp_path("reopen");
    const auto lines = fixtures::synthetic_log(5, 500);
    std::string exported;
    {
      EventStore store(path);
      store.ingest_lines(lines);
      std::ostringstream out;
      store.export_log(out);
      exported = out.str();
    }
    EventStore reopened(path);
    std::ostringstream out;
    reopened.export_log(out);
    CHECK(out.str() == exported);
    std::ifstream raw(path);
    std::stringstream file;
    file << raw.rdbuf();
    CHECK(file.str() == exported);
    std::filesystem::remove(path);
  }

  TEST_CASE("a corrupted log refuses to open") {
    const auto path = temp_path("corrupt");
    std::ofstream(path) << ev_line("M1", "2024-03-04T09:00:00Z", "Started") << "\n";
    CHECK_THROWS_AS(EventStore{path}, std::runtime_error);
    std::filesystem::remove(path);
  }
}

TEST_SUITE("mining_records") {
  TEST_CASE("one morning self-interruption") {
    EventStore store;
    ingest(store, one_interruption());
    const auto raws = raw_mining_records(*store.snapshot(), TaskType::Modeling);
    REQUIRE(raws.size() == 1);
    CHECK(raws[0].characteristics == make_itemset({c("initiator", "self"), c("time_of_day", "morning"),
                                                   c("context_switch", "same_project"),
                                                   c("interrupting_type", "analysis"),
                                                   c("priority_relation", "higher"), c("blockage", "no"),
                                                   c("boredom", "no")}));
    CHECK(raws[0].measures[0] == 2.0);
    CHECK(raws[0].measures[1] == 240.0);
    CHECK(raws[0].measures[2] == 900.0);

    Discretization t;
    t[Measure::D1] = Threshold::fixed(1);
    t[Measure::D2] = Threshold::fixed(300);
    t[Measure::D3] = Threshold::fixed(600);
    const auto recs = mining_records(*store.snapshot(), TaskType::Modeling, t);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].disruptiveness == make_itemset({Item::disruptiveness(Measure::D1, Level::High),
                                                  Item::disruptiveness(Measure::D2, Level::Low),
                                                  Item::disruptiveness(Measure::D3, Level::High)}));
  }

  TEST_CASE("uninterrupted tasks give no records") {
    EventStore store;
    ingest(store, {desc_line("M1"), ev_line("M1", "2024-03-04T09:00:00Z", "Started"),
                   ev_line("M1", "2024-03-04T10:00:00Z", "Completed")});
    CHECK(mining_records(*store.snapshot(), TaskType::Modeling, Discretization{}).empty());
  }

  TEST_CASE("unknown interrupting task means unknown context") {
    EventStore store;
    ingest(store, {desc_line("M1"), ev_line("M1", "2024-03-04T15:00:00Z", "Started"),
                   ev_line("M1", "2024-03-04T15:10:00Z", "SwitchRequested",
                           {{"initiator", "external"}, {"requester_id", "bob"}, {"interrupting_task_id", "NOPE"}}),
                   ev_line("M1", "2024-03-04T15:11:00Z", "Suspended")});
    RecordOptions opts;
    opts.characteristic_keys = {"initiator", "time_of_day", "context_switch"};
    const auto raws = raw_mining_records(*store.snapshot(), TaskType::Modeling, opts);
    REQUIRE(raws.size() == 1);
    CHECK(raws[0].characteristics == make_itemset({c("initiator", "external"), c("time_of_day", "afternoon"),
                                                   c("context_switch", "unknown")}));
    CHECK_FALSE(raws[0].measures[1].has_value());
  }

  TEST_CASE("local time offset moves the bucket") {
    EventStore store;
    ingest(store, one_interruption());
    RecordOptions opts;
    opts.characteristic_keys = {"time_of_day"};
    opts.utc_offset_minutes = 180;  // 09:30Z is 12:30 local
    CHECK(raw_mining_records(*store.snapshot(), TaskType::Modeling, opts)[0].characteristics ==
          Itemset{c("time_of_day", "afternoon")});
  }

  TEST_CASE("empty store") {
    EventStore store;
    CHECK_THROWS_AS(mining_records(*store.snapshot(), TaskType::Modeling, Discretization{}), EmptyInput);
  }

  TEST_CASE("record count equals top-level suspensions") {
    EventStore store;
    store.ingest_lines(fixtures::synthetic_log(17, 3000));
    const auto snap = store.snapshot();
    for (TaskType type : kAllTaskTypes) {
      std::size_t episodes = 0;
      for (const auto& [id, s] : snap->tasks) {
        if (s.descriptor.task_type == type) episodes += derive_measures(s.trace).d3_interruption_lags.size();
      }
      CHECK(raw_mining_records(*snap, type).size() == episodes);
    }
  }
}

TEST_SUITE("communication_graph") {
  TEST_CASE("no events") {
    EventStore store;
    const auto g = communication_graph(*store.snapshot());
    CHECK(g.nodes.empty());
    CHECK(g.edges.empty());
  }

  TEST_CASE("request counts, self-loops and declared persons") {
    EventStore store;
    std::vector<std::string> lines{person_line("p", "Pat"), person_line("q", "Quinn"), person_line("z", "Zoe"),
                                   desc_line("Q1", "modeling", "P1", "q"), desc_line("P1", "analysis", "P2", "p")};
    auto cycle = [&](const std::string& task, const std::string& performer, int hour, json extra) {
      const std::string h = (hour < 10 ? "0" : "") + std::to_string(hour);
      auto ev = [&](const std::string& min, const std::string& kind, json x = json::object()) {
        json j = json::parse(ev_line(task, "2024-03-04T" + h + ":" + min + ":00Z", kind, x));
        j["performer_id"] = performer;
        lines.push_back(j.dump());
      };
      ev("01", "SwitchRequested", extra);
      ev("02", "Suspended");
      ev("03", "InterruptionEnded");
      ev("04", "Resumed");
    };
    lines.push_back(ev_line("Q1", "2024-03-04T07:00:00Z", "Started"));
    lines.push_back(ev_line("P1", "2024-03-04T07:00:00Z", "Started"));
    for (int h : {8, 9, 10}) cycle("Q1", "q", h, {{"initiator", "external"}, {"requester_id", "p"}});
    cycle("P1", "p", 11, {{"initiator", "external"}, {"requester_id", "q"}});
    cycle("P1", "p", 12, {{"initiator", "self"}});
    const auto r = ingest(store, lines);
    REQUIRE(r.rejected.empty());

    const auto g = communication_graph(*store.snapshot());
    CHECK(g.edges.at({"p", "q"}) == 3);
    CHECK(g.edges.at({"q", "p"}) == 1);
    CHECK(g.edges.at({"p", "p"}) == 1);
    CHECK(g.edges.size() == 3);
    CHECK(g.total_weight() == 5);
    CHECK(g.nodes.count("z") == 1);  // isolated but declared
    CHECK(g.nodes.at("q").name == "Quinn");
    CHECK(g.nodes.at("q").projects == std::set<std::string>{"P1"});

    const auto window = communication_graph(*store.snapshot(), fixtures::at("2024-03-04T09:00:00Z"),
                                            fixtures::at("2024-03-04T11:01:00Z"));
    CHECK(window.edges.at({"p", "q"}) == 2);
    CHECK(window.edges.count({"p", "p"}) == 0);

    const auto slice = g.slice("q");
    CHECK(slice.edges.size() == 2);
    CHECK(slice.nodes.count("z") == 0);

    const auto dot = to_dot(g);
    CHECK(dot.find("\"p\" -> \"q\" [weight=3, penwidth=3];") != std::string::npos);
    const json j = g;
    CHECK(j.at("edges").size() == 3);
  }

  TEST_CASE("weight conservation on synthetic logs") {
    EventStore store;
    store.ingest_lines(fixtures::synthetic_log(23, 3000));
    const auto snap = store.snapshot();
    std::int64_t requests = 0;
    for (const auto& [id, s] : snap->tasks) {
      for (const auto& t : s.trace.transitions()) requests += t.event.kind == EventKind::SwitchRequested ? 1 : 0;
    }
    CHECK(communication_graph(*snap).total_weight() == requests);
  }
}

TEST_SUITE("cue sessions") {
  TEST_CASE("visits group by session and keep their order") {
    EventStore store;
    auto lines = one_interruption();
    auto visit = [](const std::string& session, const std::string& cue, const std::string& at) {
      return json{{"type", "cue_visit"}, {"session_id", session}, {"task_id", "M1"}, {"cue", cue}, {"at", at}}.dump();
    };
    lines.push_back(visit("M1#r1", "Eye", "2024-03-04T10:31:00Z"));
    lines.push_back(visit("M1#r1", "Verbal", "2024-03-04T10:32:00Z"));
    lines.push_back(visit("M1#r1", "Eye", "2024-03-04T10:33:00Z"));
    lines.push_back(visit("M1#r1", "Eye", "2024-03-04T10:33:00Z"));
    lines.push_back(visit("M1#r1", "Verbal", "2024-03-04T10:30:00Z"));
    lines.push_back(visit("M1#r1", "Smell", "2024-03-04T10:34:00Z"));
    const auto r = ingest(store, lines);
    CHECK(r.duplicates == 1);
    REQUIRE(r.rejected.size() == 2);
    CHECK(r.rejected[0].reason == "NonMonotonicTimestamp");
    const auto sessions = store.snapshot()->cue_sessions();
    REQUIRE(sessions.size() == 1);
    CHECK(sessions[0].cues() == std::vector<CueType>{CueType::Eye, CueType::Verbal, CueType::Eye});
    CHECK(sessions[0].task_type == TaskType::Modeling);
    CHECK(open_session_id(*store.snapshot()->find("M1")) == "M1#r1");
  }
}
