#include "conductor/fixtures.hpp"

#include <algorithm>
#include <fstream>

#include "conductor/error.hpp"
#include "conductor/json_io.hpp"

namespace conductor {

std::vector<std::pair<std::string, std::string>> fixture_files() {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("catalog.json", dump_json(catalog_to_json(catalog())));
    out.emplace_back("default_polarity.json", dump_json(polarity_to_json(default_polarity())));
    for (const auto& f : detail::embedded_fixture_files()) out.emplace_back(f.name, f.content);
    std::sort(out.begin(), out.end());
    return out;
}

std::string fixture_text(std::string_view name) {
    std::string want(name);
    if (!want.ends_with(".json")) want += ".json";
    for (auto& [n, content] : fixture_files())
        if (n == want) return content;
    throw UnknownFixture("unknown fixture '" + std::string(name) + "'");
}

std::vector<std::filesystem::path> install_fixtures(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    for (const auto& [name, content] : fixture_files()) {
        auto path = dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw IoError("cannot write " + path.string());
        written.push_back(path);
    }
    return written;
}

Assessment fixture_assessment() { return assessment_from_json(parse_json_text(fixture_text("integreatdrones.assessment"))); }
Topology fixture_topology() { return topology_from_json(parse_json_text(fixture_text("port_topology"))); }
StageDemands fixture_demands() { return demands_from_json(parse_json_text(fixture_text("port_demands"))); }
ScenarioConfig fixture_scenario() { return scenario_from_json(parse_json_text(fixture_text("port_scenario"))); }

PipelineSettings fixture_settings() {
    PipelineSettings s = settings_from_json(parse_json_text(fixture_text("port_pipeline")));
    s.rules = rules_from_json(parse_json_text(fixture_text("port_rules")));
    return s;
}

}  // namespace conductor
