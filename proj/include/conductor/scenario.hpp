#pragma once

// Seeded inland-port scenario: cargo units flow through the terminal
// lifecycle and the terminal's sensors emit readings of each step.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "conductor/continuum.hpp"
#include "conductor/events.hpp"

namespace conductor {

struct NoiseConfig {
    double confusion_rate = 0.02;  // recognizer picks a wrong label
    double duplicate_rate = 0.05;  // a sensor sends the same observation twice
    double delay_max = 10.0;       // seconds a reading may be held on the device
    double drop_rate = 0.01;       // sensor outage per observation; also per unreliable-link hop

    friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

/// Which fixture sensors observe which part of the terminal.
struct SensorRoles {
    std::vector<std::string> gate_cameras{"cam-fixed-1", "cam-fixed-2"};
    std::string plate_camera = "cam-fixed-1";
    std::vector<std::string> vehicle_cameras{"cam-vehicle-1", "cam-vehicle-2"};
    std::string drone_camera = "cam-drone-1";
    std::string sensor_box = "sensorbox-1";

    friend bool operator==(const SensorRoles&, const SensorRoles&) = default;
};

struct ScenarioConfig {
    std::uint64_t seed = 42;
    std::uint64_t n_cases = 1000;
    NoiseConfig noise;
    double sensitive_fraction = 0.3;     // camera frames showing an identifiable person
    double case_gap = 20.0;              // seconds between consecutive arrivals
    double activity_step = 60.0;         // seconds between lifecycle steps of one case
    double relocate_probability = 0.3;
    std::uint32_t idle_frames = 2;       // frames without activity per camera observation
    SensorRoles sensors;

    /// Throws InvalidConfig.
    void validate() const;
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Lifecycle activities in process order; relocate is optional.
const std::vector<std::string>& lifecycle_activities();

/// One ground-truth step of one case.
struct LedgerEntry {
    std::string case_id;
    std::string activity;
    double time = 0.0;
    std::uint32_t observations = 0;  // readings emitted for it (after outages, before duplicates)

    friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

struct ScenarioSummary {
    std::uint64_t cases = 0;
    std::map<std::string, std::uint64_t> activity_totals;  // ledger entries per activity
    std::map<std::string, std::uint64_t> label_readings;   // readings per low-level label
    std::uint64_t readings = 0;
    std::uint64_t idle_readings = 0;
    std::uint64_t sensitive_readings = 0;
    std::uint64_t outages = 0;
    std::uint64_t duplicates = 0;

    friend bool operator==(const ScenarioSummary&, const ScenarioSummary&) = default;
};

struct GeneratedScenario {
    ScenarioConfig config;
    std::vector<RawReading> readings;  // sorted by (true_time, reading_id)
    std::vector<LedgerEntry> ledger;   // case order, then lifecycle order
    ScenarioSummary summary;
};

/// Deterministic in (config, topology skews). Throws InvalidConfig, UnknownNode.
GeneratedScenario generate_scenario(const ScenarioConfig& config, const Topology& topology);

/// Low-level labels the scenario can produce, sorted.
std::vector<std::string> scenario_labels();

/// label -> sources that can emit it under `roles`.
std::map<std::string, std::set<std::string>> scenario_emitters(const SensorRoles& roles);

/// The ledger as an event log (one event per ledger entry).
EventLog ground_truth_log(const std::vector<LedgerEntry>& ledger);

}  // namespace conductor
