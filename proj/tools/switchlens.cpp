#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "switchlens/advisor.hpp"
#include "switchlens/errors.hpp"
#include "switchlens/event_store.hpp"
#include "switchlens/json_io.hpp"
#include "switchlens/narrative.hpp"
#include "switchlens/server.hpp"

namespace fs = std::filesystem;
using namespace switchlens;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIoError = 2;

// Failures that map to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::unique_ptr<EventStore> open_store(const fs::path& path, bool create) {
  if (!create && !fs::exists(path)) return std::make_unique<EventStore>();
  try {
    return std::make_unique<EventStore>(path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

Rational unit_rational(const std::string& text, const char* name) {
  const Rational r = Rational::parse(text);
  if (r <= Rational{0} || r > Rational{1}) throw ParseError(std::string(name) + " must be in (0, 1]");
  return r;
}

Lexicon load_lexicon(const std::string& path) {
  if (path.empty()) return Lexicon::builtin();
  try {
    return Lexicon::load(path);
  } catch (const ParseError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

struct Common {
  std::string store = "switchlens.db";
  std::string lexicon;
};

struct IngestOpts {
  std::string input;
};

struct MineOpts {
  std::string task_type;
  std::string min_support = "0.5";
  std::string min_confidence = "0.5";
  std::string format = "text";
  std::vector<std::string> thresholds;
  std::vector<std::string> characteristics;
  int tz_offset = 0;
  bool all = false;
};

struct CueOpts {
  std::string min_support = "0.5";
  std::string task_type;
  std::size_t max_len = kDefaultMaxSequenceLength;
  std::string format = "text";
};

struct GraphOpts {
  std::string from;
  std::string to;
  std::string format = "json";
};

struct ServeOpts {
  std::string config;
  std::string host;
  int port = 0;
};

int run_ingest(const Common& c, const IngestOpts& o) {
  auto store = open_store(c.store, true);
  IngestReport report;
  if (o.input == "-") {
    report = store->ingest(std::cin);
  } else {
    std::ifstream in(o.input);
    if (!in) throw IoError("cannot read " + o.input);
    report = store->ingest(in);
  }
  std::cout << json(report).dump(2) << "\n";
  return report.rejected.empty() ? kOk : kInvalid;
}

int run_mine(const Common& c, const MineOpts& o) {
  MiningParams params;
  params.task_type = parse_task_type(o.task_type);
  params.min_support = unit_rational(o.min_support, "--min-support");
  params.min_confidence = unit_rational(o.min_confidence, "--min-confidence");
  std::string spec;
  for (const auto& t : o.thresholds) spec += (spec.empty() ? "" : ",") + t;
  params.discretization = parse_discretization(spec);
  RecordOptions records;
  if (!o.characteristics.empty()) records.characteristic_keys = o.characteristics;
  records.utc_offset_minutes = o.tz_offset;
  const Lexicon lexicon = load_lexicon(c.lexicon);

  const auto store = open_store(c.store, false);
  const auto snap = store->snapshot();
  const auto raw = raw_mining_records(*snap, params.task_type, records);
  if (raw.empty()) {
    std::cerr << "switchlens: no records for task type " << to_string(params.task_type) << "\n";
    return kInvalid;
  }
  auto rules = mine(raw, params);
  if (!o.all) rules = maximal_rules(rules);

  if (o.format == "json") {
    json out{{"task_type", to_string(params.task_type)},
             {"records", raw.size()},
             {"discretization", describe_discretization(params.discretization)}};
    put_rational(out, "min_support", params.min_support);
    put_rational(out, "min_confidence", params.min_confidence);
    json list = json::array();
    for (const auto& r : rules) list.push_back(render_disruptiveness(r, r.task_type, lexicon));
    out["rules"] = list;
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& r : rules) std::cout << render_disruptiveness(r, r.task_type, lexicon).text << "\n";
    if (rules.empty()) std::cerr << "switchlens: no rule reaches the thresholds\n";
  }
  return kOk;
}

int run_cues(const Common& c, const CueOpts& o) {
  const Rational min_support = unit_rational(o.min_support, "--min-support");
  if (o.max_len < 2) throw ParseError("--max-len must be at least 2");
  const Lexicon lexicon = load_lexicon(c.lexicon);
  const auto store = open_store(c.store, false);
  const auto sessions = store->snapshot()->cue_sessions();
  std::vector<CueSequenceRule> rules;
  if (o.task_type.empty()) {
    rules = mine_sequences(sessions, min_support, o.max_len);
  } else {
    rules = mine_sequences_for_type(sessions, parse_task_type(o.task_type), min_support, o.max_len);
  }
  if (o.format == "json") {
    json list = json::array();
    for (const auto& r : rules) list.push_back(render_cue_sequence(r, lexicon));
    std::cout << json{{"sessions", sessions.size()}, {"rules", list}}.dump(2) << "\n";
  } else {
    for (const auto& r : rules) std::cout << render_cue_sequence(r, lexicon).text << "\n";
  }
  return kOk;
}

int run_graph(const Common& c, const GraphOpts& o) {
  std::optional<Timestamp> from, to;
  if (!o.from.empty()) from = parse_timestamp(o.from);
  if (!o.to.empty()) to = parse_timestamp(o.to);
  const auto store = open_store(c.store, false);
  const auto graph = communication_graph(*store->snapshot(), from, to);
  if (o.format == "dot") {
    std::cout << to_dot(graph);
  } else {
    std::cout << json(graph).dump(2) << "\n";
  }
  return kOk;
}

int run_export(const Common& c) {
  const auto store = open_store(c.store, false);
  store->export_log(std::cout);
  return std::cout ? kOk : kIoError;
}

Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int run_serve(const Common& c, const ServeOpts& o, bool store_given) {
  ServiceConfig config;
  if (!o.config.empty()) {
    try {
      config = ServiceConfig::load(o.config);
    } catch (const ParseError&) {
      throw;
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
  }
  config.apply_environment();
  if (store_given) config.store_path = c.store;
  if (!o.host.empty()) config.host = o.host;
  if (o.port > 0) config.port = o.port;
  if (!c.lexicon.empty()) config.lexicon_path = c.lexicon;

  const Lexicon lexicon = config.lexicon_path ? load_lexicon(config.lexicon_path->string()) : Lexicon::builtin();
  auto store = open_store(config.store_path, true);
  Advisor advisor(*store, config, lexicon);
  Server server(advisor, &std::clog);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::clog << json{{"event", "listening"}, {"host", config.host}, {"port", config.port},
                    {"store", config.store_path.string()}}
                   .dump()
            << std::endl;
  const bool ok = server.listen(config.host, config.port);
  g_server = nullptr;
  if (!ok) throw IoError("cannot listen on " + config.host + ":" + std::to_string(config.port));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task-interruption analytics: ingest logs, mine patterns, serve advice."};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--store", common.store, "Append-only log file")->capture_default_str();
  };
  auto add_lexicon = [&](CLI::App* sub) {
    sub->add_option("--lexicon", common.lexicon, "Phrase lexicon JSON (default: built-in)");
  };

  IngestOpts ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Append JSON-lines records to the store");
  ingest_cmd->add_option("--input", ingest.input, "Log file, or - for stdin")->required();
  add_common(ingest_cmd);

  MineOpts mine_opts;
  auto* mine_cmd = app.add_subcommand("mine", "Mine disruptiveness rules for one task type");
  mine_cmd->add_option("--task-type", mine_opts.task_type, "gathering, analysis, modeling, ...")->required();
  mine_cmd->add_option("--min-support", mine_opts.min_support)->capture_default_str();
  mine_cmd->add_option("--min-confidence", mine_opts.min_confidence)->capture_default_str();
  mine_cmd->add_option("--format", mine_opts.format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  mine_cmd->add_option("--threshold", mine_opts.thresholds, "Per-measure split, e.g. D3=600 or D1=median")
      ->delimiter(',');
  mine_cmd->add_option("--characteristics", mine_opts.characteristics, "Characteristic keys to mine over")
      ->delimiter(',');
  mine_cmd->add_option("--tz-offset", mine_opts.tz_offset, "Local time offset from UTC, minutes");
  mine_cmd->add_flag("--all", mine_opts.all, "Print every rule, not only maximal ones");
  add_common(mine_cmd);
  add_lexicon(mine_cmd);

  CueOpts cue_opts;
  auto* cues_cmd = app.add_subcommand("cues", "Mine cue-navigation sequences");
  cues_cmd->add_option("--min-support", cue_opts.min_support)->capture_default_str();
  cues_cmd->add_option("--task-type", cue_opts.task_type);
  cues_cmd->add_option("--max-len", cue_opts.max_len)->capture_default_str();
  cues_cmd->add_option("--format", cue_opts.format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  add_common(cues_cmd);
  add_lexicon(cues_cmd);

  GraphOpts graph_opts;
  auto* graph_cmd = app.add_subcommand("graph", "Stakeholder communication graph");
  graph_cmd->add_option("--from", graph_opts.from, "Inclusive start, ISO-8601 UTC");
  graph_cmd->add_option("--to", graph_opts.to, "Exclusive end, ISO-8601 UTC");
  graph_cmd->add_option("--format", graph_opts.format)->check(CLI::IsMember({"json", "dot"}))->capture_default_str();
  add_common(graph_cmd);

  auto* export_cmd = app.add_subcommand("export", "Print every accepted record");
  add_common(export_cmd);

  ServeOpts serve_opts;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP/JSON advisor");
  serve_cmd->add_option("--config", serve_opts.config, "Service configuration JSON");
  serve_cmd->add_option("--host", serve_opts.host);
  serve_cmd->add_option("--port", serve_opts.port);
  add_common(serve_cmd);
  add_lexicon(serve_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*ingest_cmd) return run_ingest(common, ingest);
    if (*mine_cmd) return run_mine(common, mine_opts);
    if (*cues_cmd) return run_cues(common, cue_opts);
    if (*graph_cmd) return run_graph(common, graph_opts);
    if (*export_cmd) return run_export(common);
    if (*serve_cmd) return run_serve(common, serve_opts, serve_cmd->count("--store") > 0);
  } catch (const IoError& e) {
    std::cerr << "switchlens: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "switchlens: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
