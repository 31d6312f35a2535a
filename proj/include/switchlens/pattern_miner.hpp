#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "switchlens/rational.hpp"
#include "switchlens/task_model.hpp"

namespace switchlens {

enum class Side { Characteristic, Disruptiveness };

enum class Measure { D1, D2, D3 };
enum class Level { Low, High };

std::string_view to_string(Measure m);
std::string_view to_string(Level l);
Measure parse_measure(std::string_view text);
Level parse_level(std::string_view text);

/// A categorical item of the mining alphabet: either an interruption
/// characteristic (`initiator=self`) or a discretized measure (`D3=high`).
/// Items order characteristics first, then by key and value.
struct Item {
  Side side = Side::Characteristic;
  std::string key;
  std::string value;

  static Item characteristic(std::string key, std::string value);
  static Item disruptiveness(Measure measure, Level level);

  /// Parses `key=value`; D1/D2/D3 keys become disruptiveness items.
  static Item parse(std::string_view text);
  std::string to_string() const { return key + "=" + value; }

  auto operator<=>(const Item&) const = default;
};

/// Sorted, duplicate-free.
using Itemset = std::vector<Item>;

Itemset make_itemset(std::vector<Item> items);
bool is_mixed(const Itemset& items);

/// Declared vocabulary of characteristic keys and their values.
class Vocabulary {
 public:
  static const Vocabulary& standard();

  bool contains(const Item& item) const;
  const std::vector<std::string>& values(const std::string& key) const;
  const std::map<std::string, std::vector<std::string>>& characteristics() const { return characteristics_; }

 private:
  std::map<std::string, std::vector<std::string>> characteristics_;
};

struct MiningRecord {
  TaskType task_type = TaskType::Other;
  Itemset characteristics;
  Itemset disruptiveness;  // at most one item per measure

  Itemset items() const;
};

/// Pre-discretization record: characteristics plus raw measure values
/// (D1 as a fragment count, D2/D3 in seconds). Absent measures stay absent.
struct RawMiningRecord {
  TaskType task_type = TaskType::Other;
  Itemset characteristics;
  std::array<std::optional<double>, 3> measures{};
};

struct Threshold {
  enum class Mode { Median, Fixed };
  Mode mode = Mode::Median;
  double value = 0.0;

  static Threshold median() { return {}; }
  static Threshold fixed(double v) { return {Mode::Fixed, v}; }
};

/// Per-measure low/high split; values strictly greater than the threshold are high.
struct Discretization {
  std::array<Threshold, 3> per_measure{};

  Threshold& operator[](Measure m) { return per_measure[static_cast<std::size_t>(m)]; }
  const Threshold& operator[](Measure m) const { return per_measure[static_cast<std::size_t>(m)]; }
};

struct MiningParams {
  Rational min_support{1, 2};
  Rational min_confidence{1, 2};
  TaskType task_type = TaskType::Modeling;
  Discretization discretization;

  /// Throws std::invalid_argument unless both minima lie in (0, 1].
  void validate() const;
};

struct FrequentItemset {
  Itemset items;
  std::size_t count = 0;
  Rational support;

  bool operator==(const FrequentItemset&) const = default;
};

struct AssociationRule {
  TaskType task_type = TaskType::Other;
  Itemset antecedent;  // characteristics only
  Itemset consequent;  // disruptiveness only
  Rational support;
  Rational confidence;

  Itemset items() const;
  bool operator==(const AssociationRule&) const = default;
};

/// Median of `values` (average of the middle pair for even sizes).
double median(std::vector<double> values);

/// Maps raw measures to low/high. Median thresholds are computed over the
/// records that carry the measure. Throws EmptyInput.
std::vector<MiningRecord> discretize(std::span<const RawMiningRecord> records, const Discretization& thresholds);

template <typename Record>
std::vector<Record> filter_by_type(std::span<const Record> records, TaskType task_type) {
  std::vector<Record> out;
  for (const auto& r : records) {
    if (r.task_type == task_type) out.push_back(r);
  }
  return out;
}

template <typename Record>
std::vector<Record> filter_by_type(const std::vector<Record>& records, TaskType task_type) {
  return filter_by_type(std::span<const Record>(records), task_type);
}

std::size_t support_count(const Itemset& itemset, std::span<const MiningRecord> records);

/// Fraction of records containing every item. Throws EmptyInput.
Rational support(const Itemset& itemset, std::span<const MiningRecord> records);

/// Level-wise Apriori restricted to mixed item sets (at least one
/// characteristic and one disruptiveness item). Single items seed the search
/// but are never emitted. Output is ordered by size, then lexicographically.
std::vector<FrequentItemset> mine_frequent(std::span<const MiningRecord> records, const MiningParams& params);

/// One rule per frequent set: characteristics => disruptiveness, with
/// confidence = support(set) / support(characteristics). Sorted by confidence
/// desc, support desc, antecedent, consequent.
std::vector<AssociationRule> derive_rules(std::span<const FrequentItemset> frequent,
                                          std::span<const MiningRecord> records, const MiningParams& params);

/// filter -> discretize -> mine_frequent -> derive_rules
std::vector<AssociationRule> mine(std::span<const RawMiningRecord> records, const MiningParams& params);

/// Rules whose item set is not strictly contained in another rule's item set.
std::vector<AssociationRule> maximal_rules(std::span<const AssociationRule> rules);

bool rule_order_less(const AssociationRule& a, const AssociationRule& b);

}  // namespace switchlens
