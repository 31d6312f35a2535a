#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "switchlens/event_store.hpp"
#include "switchlens/narrative.hpp"

namespace switchlens {

/// "D1=median,D3=600" -> per-measure thresholds (unlisted measures use the median).
Discretization parse_discretization(std::string_view spec);
std::string describe_discretization(const Discretization& d);

// Average self-reported time to rebuild context after resuming (3.2 minutes).
inline constexpr Duration kRecallTime = std::chrono::milliseconds{192'000};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path store_path = "switchlens.db";
  std::optional<std::filesystem::path> lexicon_path;
  Duration trap_horizon = kDefaultTrapHorizon;
  Discretization discretization;
  RecordOptions records;
  Rational min_support{1, 2};
  Rational min_confidence{1, 2};
  Rational cue_min_support{1, 2};
  std::size_t cue_max_len = kDefaultMaxSequenceLength;
  Duration default_first_reminder = std::chrono::minutes{10};

  /// Keys: host, port, store, lexicon, trap_horizon_hours, discretization,
  /// timezone_offset_minutes, characteristics, min_support, min_confidence,
  /// cue_min_support, cue_max_len, first_reminder_minutes.
  static ServiceConfig from_json(const nlohmann::json& j);
  static ServiceConfig load(const std::filesystem::path& path);

  using EnvLookup = std::function<const char*(const char*)>;
  /// SWITCHLENS_HOST, _PORT, _STORE, _LEXICON, _TRAP_HORIZON_HOURS,
  /// _DISCRETIZATION, _TZ_OFFSET_MINUTES override file values.
  void apply_environment(const EnvLookup& getenv);
  void apply_environment();
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;  // null for 204
};

using Query = std::map<std::string, std::string>;

/// Request handlers behind the HTTP API. Each handler reads a single store
/// snapshot, so a response never mixes two watermarks.
class Advisor {
 public:
  using Clock = std::function<Timestamp()>;

  Advisor(EventStore& store, ServiceConfig config, Lexicon lexicon = Lexicon::builtin(), Clock clock = {});

  ApiResponse post_events(const std::string& body);
  ApiResponse switch_advice(const Query& query) const;
  ApiResponse suspension(const std::string& task_id, const Query& query) const;
  ApiResponse resumption_cues(const std::string& task_id) const;
  ApiResponse post_cue_visit(const std::string& task_id, const std::string& body);
  ApiResponse communication(const Query& query) const;
  ApiResponse patterns(const Query& query) const;

  /// Mined disruptiveness rules for one type, cached per (watermark, params).
  std::vector<AssociationRule> rules_for(const StoreSnapshot& snapshot, TaskType task_type,
                                         const Rational& min_support, const Rational& min_confidence) const;

  const ServiceConfig& config() const noexcept { return config_; }
  const Lexicon& lexicon() const noexcept { return lexicon_; }

 private:
  Timestamp now(const Query& query) const;

  EventStore& store_;
  ServiceConfig config_;
  Lexicon lexicon_;
  Clock clock_;

  using CacheKey = std::tuple<std::uint64_t, TaskType, Rational, Rational>;
  mutable std::mutex cache_mutex_;
  mutable std::map<CacheKey, std::vector<AssociationRule>> cache_;
};

/// Reminder offsets: first at `first`, doubling, capped at `horizon`.
std::vector<Duration> reminder_offsets(Duration first, Duration horizon);

}  // namespace switchlens
