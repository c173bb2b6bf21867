#pragma once

// JSON file formats shared by the CLI, the HTTP API and the Python module.
// Field names are identical in files and request/response bodies.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "conductor/continuum.hpp"
#include "conductor/discovery.hpp"
#include "conductor/framework.hpp"
#include "conductor/placement.hpp"
#include "conductor/scenario.hpp"
#include "conductor/simulator.hpp"

namespace conductor {

using json = nlohmann::ordered_json;

/// Throws IoError / ParseError.
json read_json_file(const std::filesystem::path& path);
json parse_json_text(const std::string& text);
/// Pretty-printed, trailing newline, byte-stable.
void write_json_file(const std::filesystem::path& path, const json& value);
std::string dump_json(const json& value);

json catalog_to_json(const std::vector<Question>& questions);
std::vector<Question> catalog_from_json(const json& j);

json polarity_to_json(const PolarityTable& table);
PolarityTable polarity_from_json(const json& j);

json answer_to_json(const Answer& a);
Answer answer_from_json(const json& j);

/// Accepts `{"tie_break": ..., "answers": [...]}` or a bare answer list.
Assessment assessment_from_json(const json& j);
json assessment_to_json(const Assessment& a);

/// Accepts `{"answers": {"Pre1": true, ...}}` or a bare id -> bool object.
std::map<std::string, bool> booleans_from_json(const json& j);

json verdict_to_json(const PhaseVerdict& v);
json verdicts_to_json(const std::map<Phase, PhaseVerdict>& verdicts);
std::map<Phase, PhaseVerdict> verdicts_from_json(const json& j);
json hint_to_json(const ResolutionHint& h);

json topology_to_json(const Topology& t);
Topology topology_from_json(const json& j);

json rule_to_json(const FusionRule& r);
FusionRule rule_from_json(const json& j);
/// Accepts `{"rules": [...]}` or a bare list.
std::vector<FusionRule> rules_from_json(const json& j);
json rules_to_json(const std::vector<FusionRule>& rules);

json settings_to_json(const PipelineSettings& s);
PipelineSettings settings_from_json(const json& j);

json demands_to_json(const StageDemands& d);
StageDemands demands_from_json(const json& j);

json plan_to_json(const PlacementPlan& p);
PlacementPlan plan_from_json(const json& j);

json scenario_to_json(const ScenarioConfig& c);
/// Missing fields keep their defaults.
ScenarioConfig scenario_from_json(const json& j);

json metrics_to_json(const SimMetrics& m);
SimMetrics metrics_from_json(const json& j);

json comparison_to_json(const ComparisonReport& r);

json kpis_to_json(const Kpis& k);

}  // namespace conductor
