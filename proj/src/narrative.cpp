#include "switchlens/narrative.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "switchlens/errors.hpp"
#include "switchlens/lexicon_data.hpp"

namespace switchlens {
namespace {

using nlohmann::json;

std::string replace_task(std::string pattern, const std::string& task) {
  const auto pos = pattern.find("{task}");
  if (pos == std::string::npos) return pattern;
  return pattern.replace(pos, 6, task);
}

const std::string& lookup(const std::map<std::string, std::string>& table, const std::string& key,
                          std::string_view what) {
  auto it = table.find(key);
  if (it == table.end()) {
    throw UnknownVocabularyItem("no " + std::string(what) + " phrase for '" + key + "'");
  }
  return it->second;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

const Lexicon& Lexicon::builtin() {
  static const Lexicon lexicon = from_json(json::parse(detail::kBuiltinLexicon));
  return lexicon;
}

Lexicon Lexicon::from_json(const json& doc) {
  try {
    Lexicon lx;
    lx.version_ = doc.at("version").get<int>();
    lx.task_types_ = doc.at("task_types").get<std::map<std::string, std::string>>();
    for (const auto& [key, s] : doc.at("subjects").items()) {
      lx.subjects_[key] = {s.at("subject").get<std::string>(), s.at("connective").get<std::string>(),
                           s.at("form").get<std::string>() == "verb"};
    }
    lx.order_ = doc.at("characteristic_order").get<std::vector<std::string>>();
    lx.characteristics_ = doc.at("characteristics").get<std::map<std::string, std::map<std::string, std::string>>>();
    for (const auto& [measure, levels] : doc.at("disruptiveness").items()) {
      for (const auto& [level, p] : levels.items()) {
        lx.measures_[measure][level] = {p.at("noun").get<std::string>(), p.at("verb").get<std::string>()};
      }
    }
    lx.cues_ = doc.at("cues").get<std::map<std::string, std::string>>();
    lx.cue_typed_ = doc.at("cue_subjects").at("typed").get<std::string>();
    lx.cue_untyped_ = doc.at("cue_subjects").at("untyped").get<std::string>();
    lx.cue_connective_ = doc.at("cue_connective").get<std::string>();
    lx.cue_separator_ = doc.at("cue_separator").get<std::string>();
    for (const char* required : {"self", "external", "unspecified"}) {
      if (!lx.subjects_.contains(required)) throw ParseError(std::string("lexicon lacks subject '") + required + "'");
    }
    return lx;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed lexicon: ") + e.what());
  }
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError("lexicon " + path.string() + ": " + e.what());
  }
}

const std::string& Lexicon::task_phrase(TaskType t) const {
  return lookup(task_types_, std::string(to_string(t)), "task type");
}

const Lexicon::Subject& Lexicon::subject(const std::string& initiator) const {
  auto it = subjects_.find(initiator);
  if (it == subjects_.end()) throw UnknownVocabularyItem("no subject phrase for initiator '" + initiator + "'");
  return it->second;
}

const std::string& Lexicon::characteristic_phrase(const Item& item) const {
  auto it = characteristics_.find(item.key);
  if (it == characteristics_.end()) throw UnknownVocabularyItem("no phrases for characteristic '" + item.key + "'");
  return lookup(it->second, item.value, item.key);
}

const Lexicon::MeasurePhrase& Lexicon::measure_phrase(const Item& item) const {
  auto it = measures_.find(item.key);
  if (it != measures_.end()) {
    auto level = it->second.find(item.value);
    if (level != it->second.end()) return level->second;
  }
  throw UnknownVocabularyItem("no phrase for disruptiveness item '" + item.to_string() + "'");
}

const std::string& Lexicon::cue_phrase(CueType c) const { return lookup(cues_, std::string(to_string(c)), "cue"); }

std::string format_stats(const Rational& confidence, const Rational& support) {
  return "(confidence " + std::to_string(confidence.percent_half_up()) + "%, support " +
         std::to_string(support.percent_half_up()) + "%)";
}

NarrativeRule render_disruptiveness(const AssociationRule& rule, TaskType task_type, const Lexicon& lexicon) {
  if (rule.antecedent.empty() || rule.consequent.empty()) {
    throw std::invalid_argument("association rule needs non-empty antecedent and consequent");
  }
  std::string initiator = "unspecified";
  std::map<std::string, const Item*> by_key;
  for (const auto& item : rule.antecedent) {
    if (item.side != Side::Characteristic) throw std::invalid_argument("antecedent holds " + item.to_string());
    if (item.key == "initiator") {
      if (item.value != "self" && item.value != "external") {
        throw UnknownVocabularyItem("no subject phrase for initiator '" + item.value + "'");
      }
      initiator = item.value;
      continue;
    }
    if (std::find(lexicon.characteristic_order().begin(), lexicon.characteristic_order().end(), item.key) ==
        lexicon.characteristic_order().end()) {
      throw UnknownVocabularyItem("characteristic '" + item.key + "' has no place in the phrase order");
    }
    by_key[item.key] = &item;
  }

  const Lexicon::Subject& subject = lexicon.subject(initiator);
  std::string text = replace_task(subject.subject, lexicon.task_phrase(task_type));
  for (const auto& key : lexicon.characteristic_order()) {
    if (auto it = by_key.find(key); it != by_key.end()) text += " " + lexicon.characteristic_phrase(*it->second);
  }

  std::vector<std::string> effects;
  for (const auto& item : rule.consequent) {
    if (item.side != Side::Disruptiveness) throw std::invalid_argument("consequent holds " + item.to_string());
    const auto& phrase = lexicon.measure_phrase(item);
    effects.push_back(subject.verb_form ? phrase.verb : phrase.noun);
  }
  text += " " + subject.connective + " " + join(effects, " and ") + " " + format_stats(rule.confidence, rule.support);

  AssociationRule stored = rule;
  stored.task_type = task_type;
  return {std::move(text), std::move(stored), rule.support, rule.confidence};
}

NarrativeRule render_cue_sequence(const CueSequenceRule& rule, const Lexicon& lexicon) {
  if (rule.sequence.size() < 2) throw std::invalid_argument("cue sequence rule needs at least two cues");
  std::string text = lexicon.cue_subject(rule.task_type.has_value());
  if (rule.task_type) text = replace_task(text, lexicon.task_phrase(*rule.task_type));
  text += " " + lexicon.cue_phrase(rule.sequence.front()) + " " + lexicon.cue_connective() + " ";
  std::vector<std::string> rest;
  for (std::size_t i = 1; i < rule.sequence.size(); ++i) rest.push_back(lexicon.cue_phrase(rule.sequence[i]));
  text += join(rest, lexicon.cue_separator()) + " " + format_stats(rule.confidence, rule.support);
  return {std::move(text), rule, rule.support, rule.confidence};
}

NarrativeRule render(const StructuredRule& rule, const Lexicon& lexicon) {
  return std::visit(
      [&](const auto& r) -> NarrativeRule {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, AssociationRule>) {
          return render_disruptiveness(r, r.task_type, lexicon);
        } else {
          return render_cue_sequence(r, lexicon);
        }
      },
      rule);
}

}  // namespace switchlens
