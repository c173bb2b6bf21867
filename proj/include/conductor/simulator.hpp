#pragma once

// Executes the pipeline under a placement plan on the modeled continuum and
// measures bandwidth, latency and privacy exposure. Delays compose
// additively per message; there is no queueing or contention model.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conductor/continuum.hpp"
#include "conductor/discovery.hpp"
#include "conductor/events.hpp"
#include "conductor/placement.hpp"
#include "conductor/scenario.hpp"

namespace conductor {

struct LatencyStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double p95 = 0.0;  // nearest rank
    double max = 0.0;

    friend bool operator==(const LatencyStats&, const LatencyStats&) = default;
};

LatencyStats latency_stats(std::vector<double> samples);

struct SimMetrics {
    std::uint64_t seed = 0;
    std::string plan_label;
    std::map<std::string, std::uint64_t> bytes_per_link;  // "child->parent"
    std::uint64_t total_bytes_to_cloud = 0;  // bytes on links into the root
    LatencyStats event_latency;              // true occurrence -> event available at discovery
    std::uint64_t sensitive_crossings = 0;   // sensitive payload hops across a trust-zone boundary
    std::uint64_t late_event_count = 0;
    std::uint64_t dropped_count = 0;         // messages lost on unreliable links
    std::uint64_t filtered_count = 0;        // readings without a confident recognition
    std::uint64_t uncorrelated_count = 0;    // fused events without any object hint
    std::uint64_t ambiguous_count = 0;
    std::uint64_t high_level_events = 0;

    friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

std::string link_key(const LinkSpec& link);

struct RunResult {
    EventLog log;
    SimMetrics metrics;
    DirectlyFollowsGraph dfg;  // merged at the insights host
    FootprintMatrix footprint;
    Kpis kpis;
};

/// Throws PlanTopologyMismatch when the plan does not fit the topology or a
/// reading comes from an unknown node.
RunResult run(const PlacementPlan& plan, const ScenarioConfig& config, std::span<const RawReading> readings,
              const Topology& topology);

RunResult run(const PlacementPlan& plan, const GeneratedScenario& scenario, const Topology& topology);

struct MetricDelta {
    double a = 0.0;
    double b = 0.0;
    double delta = 0.0;            // a - b
    std::optional<double> ratio;   // a / b, absent when b == 0

    friend bool operator==(const MetricDelta&, const MetricDelta&) = default;
};

struct ComparisonReport {
    std::uint64_t seed = 0;
    std::string label_a;
    std::string label_b;
    std::map<std::string, MetricDelta> metrics;  // ordered by metric name

    friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

/// Throws SeedMismatch.
ComparisonReport compare(const SimMetrics& a, const SimMetrics& b);

std::string format_metrics_table(const SimMetrics& m, std::optional<double> latency_budget = std::nullopt);
std::string format_comparison_table(const ComparisonReport& r);

}  // namespace conductor
