#include "switchlens/cue_miner.hpp"

#include <algorithm>
#include <stdexcept>

#include "switchlens/errors.hpp"

namespace switchlens {

std::string_view to_string(CueType c) {
  switch (c) {
    case CueType::Annotation: return "Annotation";
    case CueType::Thumbnail: return "Thumbnail";
    case CueType::Verbal: return "Verbal";
    case CueType::Eye: return "Eye";
    case CueType::BehaviorGraph: return "BehaviorGraph";
  }
  return "Annotation";
}

CueType parse_cue_type(std::string_view text) {
  for (CueType c : kDefaultCueRanking) {
    if (to_string(c) == text) return c;
  }
  throw ParseError("unknown cue '" + std::string(text) + "'");
}

CueSession CueSession::from_visits(std::string session_id, std::string task_id, TaskType task_type,
                                   std::span<const std::pair<CueType, Timestamp>> visits) {
  CueSession s{std::move(session_id), std::move(task_id), task_type, {}};
  std::array<int, 5> seen{};
  int order = 0;
  for (const auto& [cue, at] : visits) {
    const int k = ++seen[static_cast<std::size_t>(cue)];
    s.visits.push_back({cue, ++order, k, at});
  }
  return s;
}

void CueSession::validate() const {
  if (visits.empty()) throw InvalidRecord("cue session " + session_id + " has no visits");
  std::array<int, 5> seen{};
  for (std::size_t i = 0; i < visits.size(); ++i) {
    const CueVisit& v = visits[i];
    const int k = ++seen[static_cast<std::size_t>(v.cue)];
    if (i > 0 && v.order_index <= visits[i - 1].order_index) {
      throw InvalidRecord("cue session " + session_id + ": order_index not increasing");
    }
    if (i > 0 && v.at < visits[i - 1].at) throw InvalidRecord("cue session " + session_id + ": timestamps decrease");
    if (v.visit_count != k) throw InvalidRecord("cue session " + session_id + ": visit_count mismatch");
  }
}

std::vector<CueType> CueSession::cues() const {
  std::vector<CueType> out;
  out.reserve(visits.size());
  for (const auto& v : visits) out.push_back(v.cue);
  return out;
}

std::int64_t CueGraph::total_weight() const {
  std::int64_t total = 0;
  for (const auto& [edge, w] : edges) total += w;
  return total;
}

std::int64_t CueGraph::out_weight(CueType from) const {
  std::int64_t total = 0;
  for (const auto& [edge, w] : edges) {
    if (edge.first == from) total += w;
  }
  return total;
}

CueGraph build_graph(std::span<const CueSession> sessions) {
  CueGraph g;
  for (const auto& s : sessions) {
    for (std::size_t i = 0; i < s.visits.size(); ++i) {
      g.nodes.insert(s.visits[i].cue);
      if (i > 0) ++g.edges[{s.visits[i - 1].cue, s.visits[i].cue}];
    }
  }
  return g;
}

bool contains_subsequence(std::span<const CueType> haystack, std::span<const CueType> needle) {
  std::size_t matched = 0;
  for (CueType c : haystack) {
    if (matched == needle.size()) break;
    if (c == needle[matched]) ++matched;
  }
  return matched == needle.size();
}

std::vector<CueSequenceRule> mine_sequences(std::span<const CueSession> sessions, const Rational& min_support,
                                            std::size_t max_len) {
  if (min_support <= Rational{0} || min_support > Rational{1}) {
    throw std::invalid_argument("min_support must be in (0, 1]");
  }
  if (max_len < 2) throw std::invalid_argument("max_len must be at least 2");
  if (sessions.empty()) return {};

  std::vector<std::vector<CueType>> strings;
  strings.reserve(sessions.size());
  for (const auto& s : sessions) strings.push_back(s.cues());
  const auto total = static_cast<std::int64_t>(strings.size());

  auto count = [&](const std::vector<CueType>& seq) {
    std::int64_t n = 0;
    for (const auto& str : strings) {
      if (contains_subsequence(str, seq)) ++n;
    }
    return n;
  };

  struct Counted {
    std::vector<CueType> seq;
    std::int64_t n;
  };
  std::vector<Counted> level;
  for (CueType c : kDefaultCueRanking) {
    std::vector<CueType> seq{c};
    const std::int64_t n = count(seq);
    if (Rational(n, total) >= min_support) level.push_back({std::move(seq), n});
  }

  std::vector<CueSequenceRule> rules;
  for (std::size_t len = 2; len <= max_len && !level.empty(); ++len) {
    std::vector<Counted> next;
    for (const auto& prefix : level) {
      for (CueType c : kDefaultCueRanking) {
        std::vector<CueType> seq = prefix.seq;
        seq.push_back(c);
        const std::int64_t n = count(seq);
        if (Rational(n, total) < min_support) continue;
        rules.push_back({seq, Rational(n, total), Rational(n, prefix.n), std::nullopt});
        next.push_back({std::move(seq), n});
      }
    }
    level = std::move(next);
  }

  std::sort(rules.begin(), rules.end(), [](const CueSequenceRule& a, const CueSequenceRule& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.sequence.size() != b.sequence.size()) return a.sequence.size() < b.sequence.size();
    return a.sequence < b.sequence;
  });
  return rules;
}

std::vector<CueSequenceRule> mine_sequences_for_type(std::span<const CueSession> sessions, TaskType task_type,
                                                     const Rational& min_support, std::size_t max_len) {
  std::vector<CueSession> typed;
  for (const auto& s : sessions) {
    if (s.task_type == task_type) typed.push_back(s);
  }
  auto rules = mine_sequences(typed, min_support, max_len);
  for (auto& r : rules) r.task_type = task_type;
  return rules;
}

std::vector<CueType> recommend_order(TaskType task_type, std::span<const CueSequenceRule> rules,
                                     const CueGraph& /*graph*/) {
  std::vector<const CueSequenceRule*> applicable;
  for (const auto& r : rules) {
    if (r.sequence.size() >= 2 && (!r.task_type || *r.task_type == task_type)) applicable.push_back(&r);
  }

  const CueSequenceRule* best = nullptr;
  for (const CueSequenceRule* r : applicable) {
    const bool maximal = std::none_of(applicable.begin(), applicable.end(), [&](const CueSequenceRule* other) {
      return other->sequence.size() > r->sequence.size() && contains_subsequence(other->sequence, r->sequence);
    });
    if (!maximal) continue;
    if (best == nullptr || r->confidence > best->confidence ||
        (r->confidence == best->confidence && r->sequence < best->sequence)) {
      best = r;
    }
  }

  std::vector<CueType> order;
  auto push_unique = [&](CueType c) {
    if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);
  };
  if (best != nullptr) {
    for (CueType c : best->sequence) push_unique(c);
  }
  for (CueType c : kDefaultCueRanking) push_unique(c);
  return order;
}

}  // namespace switchlens
