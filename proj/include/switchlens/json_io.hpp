#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "switchlens/cue_miner.hpp"
#include "switchlens/narrative.hpp"
#include "switchlens/pattern_miner.hpp"
#include "switchlens/task_model.hpp"

// nlohmann ADL hooks for the domain types. Rationals travel as a decimal for
// readers plus an exact "n/d" string that from_json uses.
namespace switchlens {

void to_json(nlohmann::json& j, const TaskDescriptor& d);
void from_json(const nlohmann::json& j, TaskDescriptor& d);

void to_json(nlohmann::json& j, const TaskEvent& e);
void from_json(const nlohmann::json& j, TaskEvent& e);

void to_json(nlohmann::json& j, const TaskState& s);
void to_json(nlohmann::json& j, const DisruptivenessMeasures& m);

void to_json(nlohmann::json& j, const AssociationRule& r);
void from_json(const nlohmann::json& j, AssociationRule& r);

void to_json(nlohmann::json& j, const CueSequenceRule& r);
void from_json(const nlohmann::json& j, CueSequenceRule& r);

void to_json(nlohmann::json& j, const CueGraph& g);

/// {"text": ..., "kind": "disruptiveness"|"cue_sequence", "rule": {...}}
void to_json(nlohmann::json& j, const NarrativeRule& n);

/// Rebuilds the structured rule embedded in a narrative payload and renders it again.
std::string regenerate_text(const nlohmann::json& narrative, const Lexicon& lexicon = Lexicon::builtin());

void put_rational(nlohmann::json& j, const std::string& key, const Rational& r);
Rational get_rational(const nlohmann::json& j, const std::string& key);

}  // namespace switchlens
