#pragma once

#include <map>
#include <string>
#include <vector>

#include "conductor/continuum.hpp"
#include "conductor/error.hpp"
#include "conductor/framework.hpp"
#include "conductor/pipeline.hpp"

namespace conductor {

/// Operator settings carried by a plan, independent of where stages run.
struct PipelineSettings {
    PreprocessConfig preprocess;
    std::vector<FusionRule> rules;
    double fusion_cost_per_event = 0.5;       // compute units per contributing low-level event
    double watermark = 30.0;                  // seconds
    LatePolicy late_policy = LatePolicy::NewCase;
    bool skew_correction = true;
    double correlation_cost_per_event = 0.1;  // compute units
    std::uint64_t min_edge_count = 1;         // footprint noise threshold
    std::map<std::string, double> activity_durations;  // declared service times for KPIs

    friend bool operator==(const PipelineSettings&, const PipelineSettings&) = default;
};

using StageDemands = std::map<Phase, double>;

/// Stage-to-tier assignment plus the node hosting each stage for each data source.
struct PlacementPlan {
    std::string label = "derived";
    std::map<Phase, Tier> assignment;
    PipelineSettings settings;
    std::map<Phase, std::map<std::string, std::string>> nodes;  // phase -> sensor -> host node

    Tier tier(Phase p) const { return assignment.at(p); }
    friend bool operator==(const PlacementPlan&, const PlacementPlan&) = default;
};

class UnresolvedConflict : public Error {
  public:
    UnresolvedConflict(std::vector<PhaseVerdict> conflicts, const std::string& message)
        : Error("UnresolvedConflict", message), conflicts_(std::move(conflicts)) {}
    const std::vector<PhaseVerdict>& conflicts() const { return conflicts_; }

  private:
    std::vector<PhaseVerdict> conflicts_;
};

class InsufficientCapacity : public Error {
  public:
    InsufficientCapacity(Phase phase, double demand, const std::string& message)
        : Error("InsufficientCapacity", message), phase_(phase), demand_(demand),
          hint_(make_hint(HintKind::StrongerEdgeHardware)) {}
    Phase phase() const { return phase_; }
    double demand() const { return demand_; }
    const ResolutionHint& hint() const { return hint_; }

  private:
    Phase phase_;
    double demand_;
    ResolutionHint hint_;
};

/// True iff every sensor's first ancestor at or above `tier` sits exactly on
/// `tier` and has capacity >= demand.
bool tier_feasible(const Topology& topology, Tier tier, double demand);

/// Host node per (phase, sensor). Throws PlanTopologyMismatch when a sensor
/// has no node on the assigned tier, or the tiers decrease along the pipeline.
std::map<Phase, std::map<std::string, std::string>> assign_nodes(const std::map<Phase, Tier>& assignment,
                                                                 const Topology& topology);

/// Centralized outcomes go to the cloud; decentralized ones to the lowest
/// feasible tier at or above the previous stage's tier, below the cloud.
/// A decentralized-favorable stage with no feasible tier falls back to the cloud.
/// Throws UnresolvedConflict, InsufficientCapacity.
PlacementPlan plan_from_verdicts(const std::map<Phase, PhaseVerdict>& verdicts, const Topology& topology,
                                 const StageDemands& demands, PipelineSettings settings);

/// Every stage at the cloud root.
PlacementPlan all_cloud_plan(const Topology& topology, PipelineSettings settings);

/// Plan with an explicit tier per phase.
PlacementPlan make_plan(std::map<Phase, Tier> assignment, const Topology& topology, PipelineSettings settings,
                        std::string label = "custom");

}  // namespace conductor
