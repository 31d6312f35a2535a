#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "switchlens/cue_miner.hpp"
#include "switchlens/pattern_miner.hpp"

namespace switchlens {

/// Fixed phrase table used to turn structured rules into sentences. The
/// on-disk format is the JSON document shipped as data/lexicon.json.
class Lexicon {
 public:
  struct Subject {
    std::string subject;     // contains "{task}"
    std::string connective;  // "contributes to", "tend to"
    bool verb_form = false;  // pick verb phrases for the consequent
  };
  struct MeasurePhrase {
    std::string noun;
    std::string verb;
  };

  /// The lexicon compiled into the library (identical to data/lexicon.json).
  static const Lexicon& builtin();
  static Lexicon from_json(const nlohmann::json& doc);
  static Lexicon load(const std::filesystem::path& path);

  int version() const noexcept { return version_; }

  const std::string& task_phrase(TaskType t) const;
  const Subject& subject(const std::string& initiator) const;  // "self", "external", "unspecified"
  const std::string& characteristic_phrase(const Item& item) const;
  const MeasurePhrase& measure_phrase(const Item& item) const;
  const std::vector<std::string>& characteristic_order() const noexcept { return order_; }
  const std::string& cue_phrase(CueType c) const;
  const std::string& cue_subject(bool typed) const { return typed ? cue_typed_ : cue_untyped_; }
  const std::string& cue_connective() const noexcept { return cue_connective_; }
  const std::string& cue_separator() const noexcept { return cue_separator_; }

 private:
  int version_ = 0;
  std::map<std::string, std::string> task_types_;
  std::map<std::string, Subject> subjects_;
  std::vector<std::string> order_;
  std::map<std::string, std::map<std::string, std::string>> characteristics_;
  std::map<std::string, std::map<std::string, MeasurePhrase>> measures_;
  std::map<std::string, std::string> cues_;
  std::string cue_typed_;
  std::string cue_untyped_;
  std::string cue_connective_;
  std::string cue_separator_;
};

using StructuredRule = std::variant<AssociationRule, CueSequenceRule>;

struct NarrativeRule {
  std::string text;
  StructuredRule rule;
  Rational support;
  Rational confidence;
};

/// "(confidence 100%, support 60%)", halves rounded up.
std::string format_stats(const Rational& confidence, const Rational& support);

/// Throws std::invalid_argument for an empty or mis-sided rule and
/// UnknownVocabularyItem for items the lexicon does not cover.
NarrativeRule render_disruptiveness(const AssociationRule& rule, TaskType task_type,
                                    const Lexicon& lexicon = Lexicon::builtin());

NarrativeRule render_cue_sequence(const CueSequenceRule& rule, const Lexicon& lexicon = Lexicon::builtin());

/// Renders either rule kind; association rules use their own task type.
NarrativeRule render(const StructuredRule& rule, const Lexicon& lexicon = Lexicon::builtin());

}  // namespace switchlens
