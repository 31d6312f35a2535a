#pragma once

// Brute-force reference implementations used only by tests. They work on
// plain strings and bitmasks and share no code with the library miners.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using StringSet = std::set<std::string>;

inline bool is_measure(const std::string& item) {
  return item.size() > 3 && item[0] == 'D' && item[2] == '=' && item[1] >= '1' && item[1] <= '3';
}

struct Fraction {
  std::int64_t num;
  std::int64_t den;
  // a/b >= c/d
  bool at_least(std::int64_t c, std::int64_t d) const { return num * d >= c * den; }
};

/// Every item set (over the union of record items) whose support reaches
/// min_support = min_num/min_den, restricted to sets holding at least one
/// characteristic and one measure item. Value: number of containing records.
inline std::map<StringSet, std::int64_t> frequent_mixed(const std::vector<StringSet>& records, std::int64_t min_num,
                                                        std::int64_t min_den) {
  StringSet all;
  for (const auto& r : records) all.insert(r.begin(), r.end());
  const std::vector<std::string> universe(all.begin(), all.end());
  const auto n = universe.size();
  const auto total = static_cast<std::int64_t>(records.size());
  std::map<StringSet, std::int64_t> out;
  if (total == 0) return out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    StringSet s;
    bool has_c = false, has_d = false;
    for (std::size_t b = 0; b < n; ++b) {
      if (mask & (std::uint64_t{1} << b)) {
        s.insert(universe[b]);
        (is_measure(universe[b]) ? has_d : has_c) = true;
      }
    }
    if (!has_c || !has_d) continue;
    std::int64_t count = 0;
    for (const auto& r : records) {
      bool all_in = true;
      for (const auto& item : s) all_in = all_in && r.count(item) > 0;
      if (all_in) ++count;
    }
    if (count * min_den >= min_num * total) out.emplace(std::move(s), count);
  }
  return out;
}

struct Rule {
  StringSet antecedent;
  StringSet consequent;
  std::int64_t set_count;
  std::int64_t antecedent_count;
  std::int64_t total;
};

inline std::vector<Rule> rules(const std::vector<StringSet>& records, std::int64_t sup_num, std::int64_t sup_den,
                               std::int64_t conf_num, std::int64_t conf_den) {
  std::vector<Rule> out;
  const auto total = static_cast<std::int64_t>(records.size());
  for (const auto& [set, count] : frequent_mixed(records, sup_num, sup_den)) {
    Rule r{{}, {}, count, 0, total};
    for (const auto& item : set) (is_measure(item) ? r.consequent : r.antecedent).insert(item);
    for (const auto& rec : records) {
      if (std::includes(rec.begin(), rec.end(), r.antecedent.begin(), r.antecedent.end())) ++r.antecedent_count;
    }
    if (count * conf_den >= conf_num * r.antecedent_count) out.push_back(std::move(r));
  }
  return out;
}

/// Order-preserving containment by exhaustive index choice (small inputs only).
inline bool contains_subsequence(const std::vector<int>& hay, const std::vector<int>& needle) {
  const std::size_t n = hay.size(), m = needle.size();
  if (m == 0) return true;
  if (m > n) return false;
  // enumerate all increasing index tuples via bitmask over hay positions
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != m) continue;
    std::size_t k = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (mask & (1u << i)) ok = hay[i] == needle[k++];
    }
    if (ok) return true;
  }
  return false;
}

/// All sequences over `alphabet` symbols of length 2..max_len with session support
/// reaching min_num/min_den. Value: number of sessions containing it.
inline std::map<std::vector<int>, std::int64_t> frequent_sequences(const std::vector<std::vector<int>>& sessions,
                                                                   int alphabet, std::size_t max_len,
                                                                   std::int64_t min_num, std::int64_t min_den) {
  std::map<std::vector<int>, std::int64_t> out;
  const auto total = static_cast<std::int64_t>(sessions.size());
  if (total == 0) return out;
  for (std::size_t len = 2; len <= max_len; ++len) {
    std::vector<int> seq(len, 0);
    while (true) {
      std::int64_t count = 0;
      for (const auto& s : sessions) count += contains_subsequence(s, seq) ? 1 : 0;
      if (count * min_den >= min_num * total) out.emplace(seq, count);
      std::size_t pos = len;
      while (pos > 0) {
        --pos;
        if (++seq[pos] < alphabet) break;
        seq[pos] = 0;
        if (pos == 0) goto next_len;
      }
    }
  next_len:;
  }
  return out;
}

/// Transition table written out literally: (phase, kind) pairs that must be accepted.
inline const std::set<std::pair<std::string, std::string>>& accepted_pairs() {
  static const std::set<std::pair<std::string, std::string>> table{
      {"Created", "Started"},
      {"Active", "SwitchRequested"},
      {"Active", "Completed"},
      {"InterruptionPending", "Suspended"},
      {"Suspended", "SwitchRequested"},
      {"Suspended", "Suspended"},
      {"Suspended", "InterruptionEnded"},
      {"Suspended", "Abandoned"},
      {"ResumptionPending", "Resumed"},
      {"ResumptionPending", "Abandoned"},
  };
  return table;
}

/// Sort-and-average median.
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace oracle
