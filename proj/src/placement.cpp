#include "conductor/placement.hpp"

#include <algorithm>

namespace conductor {

bool tier_feasible(const Topology& topology, Tier tier, double demand) {
    for (const auto& s : topology.sensors()) {
        auto host = host_at_tier(topology, s, tier);
        if (!host || topology.node(*host).compute_capacity < demand) return false;
    }
    return true;
}

std::map<Phase, std::map<std::string, std::string>> assign_nodes(const std::map<Phase, Tier>& assignment,
                                                                 const Topology& topology) {
    std::map<Phase, std::map<std::string, std::string>> out;
    std::optional<Tier> prev;
    for (Phase p : kAllPhases) {
        auto it = assignment.find(p);
        if (it == assignment.end())
            throw PlanTopologyMismatch("plan assigns no tier to " + std::string(to_string(p)));
        if (prev && it->second < *prev)
            throw PlanTopologyMismatch(std::string(to_string(p)) + " runs below the previous stage");
        prev = it->second;
        for (const auto& s : topology.sensors()) {
            auto host = host_at_tier(topology, s, it->second);
            if (!host)
                throw PlanTopologyMismatch("sensor " + s + " has no " + std::string(to_string(it->second)) +
                                           " node for " + std::string(to_string(p)));
            out[p][s] = *host;
        }
    }
    return out;
}

PlacementPlan plan_from_verdicts(const std::map<Phase, PhaseVerdict>& verdicts, const Topology& topology,
                                 const StageDemands& demands, PipelineSettings settings) {
    std::vector<PhaseVerdict> conflicts;
    for (const auto& [phase, v] : verdicts)
        if (v.outcome == Outcome::Conflict) conflicts.push_back(v);
    if (!conflicts.empty()) {
        std::string msg = "conflicting critical answers in";
        for (const auto& c : conflicts) {
            msg += " " + std::string(to_string(c.phase)) + " (";
            std::vector<std::string> ids = c.centralized;
            ids.insert(ids.end(), c.decentralized.begin(), c.decentralized.end());
            for (std::size_t i = 0; i < ids.size(); ++i) msg += (i ? "," : "") + ids[i];
            msg += ")";
        }
        throw UnresolvedConflict(std::move(conflicts), msg);
    }

    PlacementPlan plan;
    plan.label = "derived";
    Tier prev = Tier::Sensor;
    for (Phase p : kAllPhases) {
        auto vit = verdicts.find(p);
        if (vit == verdicts.end()) throw InvalidConfig("no verdict for " + std::string(to_string(p)));
        const Outcome outcome = vit->second.outcome;
        Tier chosen = Tier::Cloud;
        if (is_decentralized(outcome)) {
            auto dit = demands.find(p);
            const double demand = dit == demands.end() ? 0.0 : dit->second;
            std::optional<Tier> found;
            for (Tier t : {Tier::Sensor, Tier::Edge, Tier::Fog}) {
                if (t < prev) continue;
                if (tier_feasible(topology, t, demand)) {
                    found = t;
                    break;
                }
            }
            if (found) {
                chosen = *found;
            } else if (outcome == Outcome::DecentralizedMandatory) {
                throw InsufficientCapacity(p, demand,
                                           "no tier below the cloud offers " + std::to_string(demand) +
                                               " compute units per data source for " +
                                               std::string(to_string(p)));
            }
        }
        chosen = std::max(chosen, prev);
        plan.assignment[p] = chosen;
        prev = chosen;
    }
    plan.settings = std::move(settings);
    plan.nodes = assign_nodes(plan.assignment, topology);
    return plan;
}

PlacementPlan all_cloud_plan(const Topology& topology, PipelineSettings settings) {
    std::map<Phase, Tier> a;
    for (Phase p : kAllPhases) a[p] = Tier::Cloud;
    return make_plan(std::move(a), topology, std::move(settings), "all-cloud");
}

PlacementPlan make_plan(std::map<Phase, Tier> assignment, const Topology& topology, PipelineSettings settings,
                        std::string label) {
    PlacementPlan plan;
    plan.label = std::move(label);
    plan.nodes = assign_nodes(assignment, topology);
    plan.assignment = std::move(assignment);
    plan.settings = std::move(settings);
    return plan;
}

}  // namespace conductor
