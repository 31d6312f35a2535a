#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "switchlens/rational.hpp"
#include "switchlens/task_model.hpp"
#include "switchlens/time.hpp"

namespace switchlens {

// Declaration order is the default usefulness ranking and also the
// lexicographic order used to break ties between cue sequences.
enum class CueType { Annotation, Thumbnail, Verbal, Eye, BehaviorGraph };

inline constexpr std::array<CueType, 5> kDefaultCueRanking{
    CueType::Annotation, CueType::Thumbnail, CueType::Verbal, CueType::Eye, CueType::BehaviorGraph,
};

std::string_view to_string(CueType c);
CueType parse_cue_type(std::string_view text);

struct CueVisit {
  CueType cue = CueType::Annotation;
  int order_index = 1;  // i: position in the session, from 1
  int visit_count = 1;  // k: visits to this cue so far, including this one
  Timestamp at{};

  bool operator==(const CueVisit&) const = default;
};

struct CueSession {
  std::string session_id;
  std::string task_id;
  TaskType task_type = TaskType::Other;
  std::vector<CueVisit> visits;

  /// Builds a session assigning order_index and visit_count from the visit order.
  static CueSession from_visits(std::string session_id, std::string task_id, TaskType task_type,
                                std::span<const std::pair<CueType, Timestamp>> visits);

  /// Throws InvalidRecord if visits are empty, out of order, or carry wrong i/k.
  void validate() const;

  std::vector<CueType> cues() const;
};

struct CueGraph {
  std::set<CueType> nodes;
  std::map<std::pair<CueType, CueType>, std::int64_t> edges;

  std::int64_t total_weight() const;
  std::int64_t out_weight(CueType from) const;
};

CueGraph build_graph(std::span<const CueSession> sessions);

struct CueSequenceRule {
  std::vector<CueType> sequence;  // length >= 2
  Rational support;
  Rational confidence;  // support(sequence) / support(sequence without last)
  std::optional<TaskType> task_type;

  bool operator==(const CueSequenceRule&) const = default;
};

inline constexpr std::size_t kDefaultMaxSequenceLength = 4;

/// Order-preserving, possibly non-contiguous containment.
bool contains_subsequence(std::span<const CueType> haystack, std::span<const CueType> needle);

/// Every cue sequence of length 2..max_len contained in at least min_support
/// of the sessions (each session counted once). Ordered by support desc,
/// length asc, then lexicographically.
std::vector<CueSequenceRule> mine_sequences(std::span<const CueSession> sessions, const Rational& min_support,
                                            std::size_t max_len = kDefaultMaxSequenceLength);

/// mine_sequences over the sessions of one task type; rules are tagged with it.
std::vector<CueSequenceRule> mine_sequences_for_type(std::span<const CueSession> sessions, TaskType task_type,
                                                     const Rational& min_support,
                                                     std::size_t max_len = kDefaultMaxSequenceLength);

/// Cues of the best maximal rule for `task_type` first (highest confidence,
/// ties to the lexicographically smaller sequence), then the rest in default
/// ranking. Rules tagged with another task type are ignored. The graph is not
/// consulted for ordering; the result is always a permutation of all cues.
std::vector<CueType> recommend_order(TaskType task_type, std::span<const CueSequenceRule> rules,
                                     const CueGraph& graph);

}  // namespace switchlens
