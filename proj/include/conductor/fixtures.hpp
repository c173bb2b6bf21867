#pragma once

// The shipped inland-port fixtures, compiled into the library so the CLI and
// the service work without the source tree.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "conductor/continuum.hpp"
#include "conductor/framework.hpp"
#include "conductor/placement.hpp"
#include "conductor/scenario.hpp"

namespace conductor {

struct FixtureFile {
    std::string_view name;     // file name, e.g. "port_topology.json"
    std::string_view content;
};

namespace detail {
const std::vector<FixtureFile>& embedded_fixture_files();
}

/// Embedded files plus the generated catalog.json and default_polarity.json.
std::vector<std::pair<std::string, std::string>> fixture_files();

/// Throws UnknownFixture. Accepts the name with or without ".json".
std::string fixture_text(std::string_view name);

/// Writes every fixture into `dir` (created if needed); returns the paths written.
std::vector<std::filesystem::path> install_fixtures(const std::filesystem::path& dir);

Assessment fixture_assessment();
Topology fixture_topology();
StageDemands fixture_demands();
ScenarioConfig fixture_scenario();
/// Pipeline settings with the fusion rules filled in.
PipelineSettings fixture_settings();

}  // namespace conductor
