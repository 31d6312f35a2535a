#include "switchlens/pattern_miner.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "switchlens/errors.hpp"

namespace switchlens {
namespace {

using IdSet = std::vector<int>;  // sorted item ids

struct Encoded {
  std::vector<Item> universe;  // id -> item, sorted
  std::vector<IdSet> records;

  int id(const Item& item) const {
    auto it = std::lower_bound(universe.begin(), universe.end(), item);
    return static_cast<int>(it - universe.begin());
  }
  bool characteristic(int id) const { return universe[static_cast<std::size_t>(id)].side == Side::Characteristic; }
};

Encoded encode(std::span<const MiningRecord> records) {
  Encoded e;
  std::set<Item> all;
  for (const auto& r : records) {
    all.insert(r.characteristics.begin(), r.characteristics.end());
    all.insert(r.disruptiveness.begin(), r.disruptiveness.end());
  }
  e.universe.assign(all.begin(), all.end());
  e.records.reserve(records.size());
  for (const auto& r : records) {
    IdSet ids;
    for (const auto& item : r.items()) ids.push_back(e.id(item));
    e.records.push_back(std::move(ids));
  }
  return e;
}

std::size_t count(const IdSet& candidate, const std::vector<IdSet>& records) {
  std::size_t n = 0;
  for (const auto& r : records) {
    if (std::includes(r.begin(), r.end(), candidate.begin(), candidate.end())) ++n;
  }
  return n;
}

bool mixed(const IdSet& ids, const Encoded& e) {
  bool c = false, d = false;
  for (int id : ids) (e.characteristic(id) ? c : d) = true;
  return c && d;
}

Itemset decode(const IdSet& ids, const Encoded& e) {
  Itemset out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(e.universe[static_cast<std::size_t>(id)]);
  return out;
}

}  // namespace

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::D1: return "D1";
    case Measure::D2: return "D2";
    case Measure::D3: return "D3";
  }
  return "D1";
}

std::string_view to_string(Level l) { return l == Level::Low ? "low" : "high"; }

Measure parse_measure(std::string_view text) {
  if (text == "D1") return Measure::D1;
  if (text == "D2") return Measure::D2;
  if (text == "D3") return Measure::D3;
  throw ParseError("unknown measure '" + std::string(text) + "'");
}

Level parse_level(std::string_view text) {
  if (text == "low") return Level::Low;
  if (text == "high") return Level::High;
  throw ParseError("unknown level '" + std::string(text) + "'");
}

Item Item::characteristic(std::string key, std::string value) {
  return {Side::Characteristic, std::move(key), std::move(value)};
}

Item Item::disruptiveness(Measure measure, Level level) {
  return {Side::Disruptiveness, std::string(switchlens::to_string(measure)), std::string(switchlens::to_string(level))};
}

Item Item::parse(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == text.size()) {
    throw ParseError("item '" + std::string(text) + "' is not key=value");
  }
  const std::string_view key = text.substr(0, eq);
  const std::string_view value = text.substr(eq + 1);
  if (key == "D1" || key == "D2" || key == "D3") return disruptiveness(parse_measure(key), parse_level(value));
  return characteristic(std::string(key), std::string(value));
}

Itemset make_itemset(std::vector<Item> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

bool is_mixed(const Itemset& items) {
  const bool c = std::any_of(items.begin(), items.end(), [](const Item& i) { return i.side == Side::Characteristic; });
  const bool d = std::any_of(items.begin(), items.end(), [](const Item& i) { return i.side == Side::Disruptiveness; });
  return c && d;
}

const Vocabulary& Vocabulary::standard() {
  static const Vocabulary vocab = [] {
    Vocabulary v;
    std::vector<std::string> types;
    for (TaskType t : kAllTaskTypes) types.emplace_back(to_string(t));
    types.emplace_back("unknown");
    v.characteristics_ = {
        {"initiator", {"self", "external"}},
        {"time_of_day", {"morning", "afternoon", "evening"}},
        {"context_switch", {"same_project", "different_project", "unknown"}},
        {"interrupting_type", types},
        {"priority_relation", {"higher", "same", "lower", "unknown"}},
        {"blockage", {"yes", "no"}},
        {"boredom", {"yes", "no"}},
    };
    return v;
  }();
  return vocab;
}

bool Vocabulary::contains(const Item& item) const {
  if (item.side == Side::Disruptiveness) {
    return (item.key == "D1" || item.key == "D2" || item.key == "D3") && (item.value == "low" || item.value == "high");
  }
  auto it = characteristics_.find(item.key);
  return it != characteristics_.end() && std::find(it->second.begin(), it->second.end(), item.value) != it->second.end();
}

const std::vector<std::string>& Vocabulary::values(const std::string& key) const {
  auto it = characteristics_.find(key);
  if (it == characteristics_.end()) throw UnknownVocabularyItem("unknown characteristic key '" + key + "'");
  return it->second;
}

Itemset MiningRecord::items() const {
  Itemset all = characteristics;
  all.insert(all.end(), disruptiveness.begin(), disruptiveness.end());
  return make_itemset(std::move(all));
}

Itemset AssociationRule::items() const {
  Itemset all = antecedent;
  all.insert(all.end(), consequent.begin(), consequent.end());
  return make_itemset(std::move(all));
}

void MiningParams::validate() const {
  const Rational zero{0}, one{1};
  if (min_support <= zero || min_support > one) throw std::invalid_argument("min_support must be in (0, 1]");
  if (min_confidence <= zero || min_confidence > one) throw std::invalid_argument("min_confidence must be in (0, 1]");
}

double median(std::vector<double> values) {
  if (values.empty()) throw EmptyInput("median of no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<MiningRecord> discretize(std::span<const RawMiningRecord> records, const Discretization& thresholds) {
  if (records.empty()) throw EmptyInput("no records to discretize");

  std::array<std::optional<double>, 3> cut{};
  for (std::size_t m = 0; m < 3; ++m) {
    const Threshold& t = thresholds.per_measure[m];
    if (t.mode == Threshold::Mode::Fixed) {
      if (!std::isfinite(t.value)) throw std::invalid_argument("discretization threshold must be finite");
      cut[m] = t.value;
      continue;
    }
    std::vector<double> values;
    for (const auto& r : records) {
      if (r.measures[m]) values.push_back(*r.measures[m]);
    }
    if (!values.empty()) cut[m] = median(std::move(values));
  }

  std::vector<MiningRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    MiningRecord rec{r.task_type, make_itemset(r.characteristics), {}};
    for (std::size_t m = 0; m < 3; ++m) {
      if (!r.measures[m]) continue;
      const Level level = *r.measures[m] > *cut[m] ? Level::High : Level::Low;
      rec.disruptiveness.push_back(Item::disruptiveness(static_cast<Measure>(m), level));
    }
    rec.disruptiveness = make_itemset(std::move(rec.disruptiveness));
    out.push_back(std::move(rec));
  }
  return out;
}

std::size_t support_count(const Itemset& itemset, std::span<const MiningRecord> records) {
  const Itemset wanted = make_itemset(itemset);
  std::size_t n = 0;
  for (const auto& r : records) {
    const Itemset items = r.items();
    if (std::includes(items.begin(), items.end(), wanted.begin(), wanted.end())) ++n;
  }
  return n;
}

Rational support(const Itemset& itemset, std::span<const MiningRecord> records) {
  if (records.empty()) throw EmptyInput("support over no records");
  return Rational(static_cast<std::int64_t>(support_count(itemset, records)), static_cast<std::int64_t>(records.size()));
}

std::vector<FrequentItemset> mine_frequent(std::span<const MiningRecord> records, const MiningParams& params) {
  params.validate();
  if (records.empty()) return {};

  const Encoded e = encode(records);
  const auto total = static_cast<std::int64_t>(records.size());
  auto frequent = [&](std::size_t n) { return Rational(static_cast<std::int64_t>(n), total) >= params.min_support; };

  // Seeding level: supports of single items, never emitted.
  std::vector<int> seeds;
  for (int id = 0; id < static_cast<int>(e.universe.size()); ++id) {
    if (frequent(count({id}, e.records))) seeds.push_back(id);
  }

  std::vector<FrequentItemset> out;
  std::set<IdSet> level;
  std::vector<std::pair<IdSet, std::size_t>> level_counts;

  // Size 2: one characteristic and one disruptiveness seed.
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t j = i + 1; j < seeds.size(); ++j) {
      IdSet candidate{seeds[i], seeds[j]};
      if (!mixed(candidate, e)) continue;
      if (const std::size_t n = count(candidate, e.records); frequent(n)) {
        level.insert(candidate);
        level_counts.emplace_back(std::move(candidate), n);
      }
    }
  }

  while (!level.empty()) {
    std::sort(level_counts.begin(), level_counts.end());
    for (const auto& [ids, n] : level_counts) {
      out.push_back({decode(ids, e), n, Rational(static_cast<std::int64_t>(n), total)});
    }

    // Extend every frequent mixed set by one seed; keep a candidate only if all
    // of its mixed (k-1)-subsets are frequent.
    std::set<IdSet> candidates;
    for (const IdSet& base : level) {
      for (int seed : seeds) {
        if (std::binary_search(base.begin(), base.end(), seed)) continue;
        IdSet candidate = base;
        candidate.insert(std::upper_bound(candidate.begin(), candidate.end(), seed), seed);
        candidates.insert(std::move(candidate));
      }
    }

    std::set<IdSet> next;
    std::vector<std::pair<IdSet, std::size_t>> next_counts;
    for (const IdSet& candidate : candidates) {
      bool pruned = false;
      for (std::size_t drop = 0; drop < candidate.size() && !pruned; ++drop) {
        IdSet subset;
        subset.reserve(candidate.size() - 1);
        for (std::size_t k = 0; k < candidate.size(); ++k) {
          if (k != drop) subset.push_back(candidate[k]);
        }
        if (mixed(subset, e) && !level.contains(subset)) pruned = true;
      }
      if (pruned) continue;
      if (const std::size_t n = count(candidate, e.records); frequent(n)) {
        next.insert(candidate);
        next_counts.emplace_back(candidate, n);
      }
    }
    level = std::move(next);
    level_counts = std::move(next_counts);
  }

  std::stable_sort(out.begin(), out.end(), [](const FrequentItemset& a, const FrequentItemset& b) {
    if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
    return a.items < b.items;
  });
  return out;
}

bool rule_order_less(const AssociationRule& a, const AssociationRule& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.support != b.support) return a.support > b.support;
  if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
  return a.consequent < b.consequent;
}

std::vector<AssociationRule> derive_rules(std::span<const FrequentItemset> frequent,
                                          std::span<const MiningRecord> records, const MiningParams& params) {
  params.validate();
  std::vector<AssociationRule> rules;
  if (records.empty()) return rules;
  const auto total = static_cast<std::int64_t>(records.size());
  for (const auto& set : frequent) {
    AssociationRule rule;
    rule.task_type = params.task_type;
    for (const auto& item : set.items) {
      (item.side == Side::Characteristic ? rule.antecedent : rule.consequent).push_back(item);
    }
    if (rule.antecedent.empty() || rule.consequent.empty()) continue;
    const std::size_t antecedent_count = support_count(rule.antecedent, records);
    if (antecedent_count == 0) continue;
    rule.support = Rational(static_cast<std::int64_t>(set.count), total);
    rule.confidence = Rational(static_cast<std::int64_t>(set.count), static_cast<std::int64_t>(antecedent_count));
    if (rule.confidence >= params.min_confidence) rules.push_back(std::move(rule));
  }
  std::sort(rules.begin(), rules.end(), rule_order_less);
  return rules;
}

std::vector<AssociationRule> mine(std::span<const RawMiningRecord> records, const MiningParams& params) {
  params.validate();
  const auto typed = filter_by_type(records, params.task_type);
  if (typed.empty()) return {};
  const auto discrete = discretize(typed, params.discretization);
  const auto frequent = mine_frequent(discrete, params);
  return derive_rules(frequent, discrete, params);
}

std::vector<AssociationRule> maximal_rules(std::span<const AssociationRule> rules) {
  std::vector<Itemset> sets;
  sets.reserve(rules.size());
  for (const auto& r : rules) sets.push_back(r.items());

  std::vector<AssociationRule> out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    bool contained = false;
    for (std::size_t j = 0; j < rules.size() && !contained; ++j) {
      contained = j != i && sets[j].size() > sets[i].size() &&
                  std::includes(sets[j].begin(), sets[j].end(), sets[i].begin(), sets[i].end());
    }
    if (!contained) out.push_back(rules[i]);
  }
  return out;
}

}  // namespace switchlens
