#include <doctest.h>

#include "conductor/error.hpp"
#include "conductor/fixtures.hpp"
#include "conductor/placement.hpp"
#include "support.hpp"

using namespace conductor;

namespace {

std::map<Phase, PhaseVerdict> verdicts_of(const std::map<Phase, Outcome>& outcomes) {
    std::map<Phase, PhaseVerdict> out;
    for (auto [p, o] : outcomes) out[p] = PhaseVerdict{p, o, {}, {}, {}};
    return out;
}

std::map<Phase, PhaseVerdict> all(Outcome o) {
    std::map<Phase, Outcome> m;
    for (Phase p : kAllPhases) m[p] = o;
    return verdicts_of(m);
}

Topology with_capacities(const Topology& t, testutil::Gen& g) {
    auto nodes = t.nodes();
    for (auto& n : nodes) n.compute_capacity = static_cast<double>(1 + testutil::below(g, 400));
    return Topology::build(nodes, t.links(), t.zones());
}

// Lowest tier at or above `from` where every sensor's first ancestor at that
// tier or higher sits exactly on it with enough capacity. Walks parents directly.
std::optional<Tier> lowest_feasible(const Topology& t, Tier from, double demand) {
    for (int k = static_cast<int>(from); k <= static_cast<int>(Tier::Fog); ++k) {
        const Tier tier = static_cast<Tier>(k);
        bool ok = true;
        for (const auto& n : t.nodes()) {
            if (n.tier != Tier::Sensor) continue;
            const NodeSpec* cur = &n;
            while (cur->tier < tier && cur->parent) cur = &t.node(*cur->parent);
            if (cur->tier != tier || cur->compute_capacity < demand) ok = false;
        }
        if (ok) return tier;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("plan from the shipped assessment") {
    auto plan = plan_from_verdicts(decide_all(fixture_assessment()), fixture_topology(), fixture_demands(),
                                   fixture_settings());
    CHECK(plan.tier(Phase::Preprocessing) == Tier::Edge);
    CHECK(plan.tier(Phase::Aggregation) == Tier::Fog);
    CHECK(plan.tier(Phase::Correlation) == Tier::Fog);
    CHECK(plan.tier(Phase::Discovery) == Tier::Cloud);
    CHECK(plan.tier(Phase::Insights) == Tier::Cloud);
    CHECK(plan.nodes.at(Phase::Preprocessing).at("cam-fixed-1") == "edge-gate");
    CHECK(plan.nodes.at(Phase::Preprocessing).at("cam-drone-1") == "edge-yard");
    CHECK(plan.nodes.at(Phase::Correlation).at("sensorbox-1") == "fog-gpu");
    CHECK(plan.label == "derived");
}

TEST_CASE("all centralized goes to the cloud") {
    auto plan = plan_from_verdicts(all(Outcome::CentralizedFavorable), fixture_topology(), fixture_demands(), {});
    for (Phase p : kAllPhases) CHECK(plan.tier(p) == Tier::Cloud);
    CHECK(plan.assignment == all_cloud_plan(fixture_topology(), {}).assignment);
}

TEST_CASE("mandatory preprocessing lands on the edge when sensors are too weak") {
    auto v = all(Outcome::CentralizedFavorable);
    v[Phase::Preprocessing].outcome = Outcome::DecentralizedMandatory;
    auto plan = plan_from_verdicts(v, fixture_topology(), {{Phase::Preprocessing, 10.0}}, {});
    CHECK(plan.tier(Phase::Preprocessing) == Tier::Edge);

    auto tiny = plan_from_verdicts(v, fixture_topology(), {{Phase::Preprocessing, 0.5}}, {});
    CHECK(tiny.tier(Phase::Preprocessing) == Tier::Sensor);
}

TEST_CASE("conflicts refuse a plan") {
    auto v = all(Outcome::CentralizedFavorable);
    v[Phase::Insights] = PhaseVerdict{Phase::Insights, Outcome::Conflict, {"Ins1"}, {"Ins3"},
                                      {make_hint(HintKind::StrongerEdgeHardware)}};
    try {
        plan_from_verdicts(v, fixture_topology(), fixture_demands(), {});
        FAIL("expected UnresolvedConflict");
    } catch (const UnresolvedConflict& e) {
        REQUIRE(e.conflicts().size() == 1);
        CHECK(e.conflicts()[0].phase == Phase::Insights);
        CHECK(std::string(e.what()).find("Ins1") != std::string::npos);
    }
}

TEST_CASE("insufficient capacity") {
    auto v = all(Outcome::CentralizedFavorable);
    v[Phase::Discovery].outcome = Outcome::DecentralizedMandatory;
    try {
        plan_from_verdicts(v, fixture_topology(), {{Phase::Discovery, 5000.0}}, {});
        FAIL("expected InsufficientCapacity");
    } catch (const InsufficientCapacity& e) {
        CHECK(e.phase() == Phase::Discovery);
        CHECK(e.demand() == 5000.0);
        CHECK(e.hint().kind == HintKind::StrongerEdgeHardware);
    }
    // A favorable stage falls back to the cloud instead.
    v[Phase::Discovery].outcome = Outcome::DecentralizedFavorable;
    CHECK(plan_from_verdicts(v, fixture_topology(), {{Phase::Discovery, 5000.0}}, {}).tier(Phase::Discovery) ==
          Tier::Cloud);
}

TEST_CASE("later stages are promoted above earlier ones") {
    auto v = all(Outcome::DecentralizedFavorable);
    // Preprocessing only fits the fog; aggregation alone would fit a sensor.
    auto plan = plan_from_verdicts(v, fixture_topology(),
                                   {{Phase::Preprocessing, 150.0}, {Phase::Aggregation, 0.1}}, {});
    CHECK(plan.tier(Phase::Preprocessing) == Tier::Fog);
    CHECK(plan.tier(Phase::Aggregation) == Tier::Fog);
}

TEST_CASE("property: plan matches the lowest-feasible-tier oracle") {
    testutil::Gen g(41);
    const std::vector<Outcome> outcomes = {Outcome::CentralizedMandatory, Outcome::CentralizedFavorable,
                                           Outcome::DecentralizedFavorable, Outcome::DecentralizedMandatory};
    const Topology base = fixture_topology();
    for (int iter = 0; iter < 500; ++iter) {
        const Topology t = with_capacities(base, g);
        std::map<Phase, Outcome> o;
        StageDemands d;
        for (Phase p : kAllPhases) {
            o[p] = outcomes[testutil::below(g, outcomes.size())];
            d[p] = static_cast<double>(testutil::below(g, 300));
        }
        std::map<Phase, Tier> want;
        bool throws = false;
        Tier prev = Tier::Sensor;
        for (Phase p : kAllPhases) {
            Tier chosen = Tier::Cloud;
            if (is_decentralized(o[p])) {
                auto f = lowest_feasible(t, prev, d[p]);
                if (f) chosen = *f;
                else if (o[p] == Outcome::DecentralizedMandatory) throws = true;
            }
            if (chosen < prev) chosen = prev;
            want[p] = chosen;
            prev = chosen;
        }
        if (throws) {
            CHECK_THROWS_AS(plan_from_verdicts(verdicts_of(o), t, d, {}), InsufficientCapacity);
            continue;
        }
        const auto plan = plan_from_verdicts(verdicts_of(o), t, d, {});
        CHECK(plan.assignment == want);
        Tier last = Tier::Sensor;
        for (Phase p : kAllPhases) {
            CHECK(plan.tier(p) >= last);
            last = plan.tier(p);
            if (o[p] == Outcome::CentralizedMandatory || o[p] == Outcome::CentralizedFavorable)
                CHECK(plan.tier(p) == Tier::Cloud);
        }
    }
}

TEST_CASE("plans that do not fit the topology") {
    std::map<Phase, Tier> down = {{Phase::Preprocessing, Tier::Fog}, {Phase::Aggregation, Tier::Edge},
                                  {Phase::Correlation, Tier::Cloud}, {Phase::Discovery, Tier::Cloud},
                                  {Phase::Insights, Tier::Cloud}};
    CHECK_THROWS_AS(make_plan(down, fixture_topology(), {}), PlanTopologyMismatch);
    std::map<Phase, Tier> missing = {{Phase::Preprocessing, Tier::Cloud}};
    CHECK_THROWS_AS(make_plan(missing, fixture_topology(), {}), PlanTopologyMismatch);

    // Sensor directly under the cloud has no edge host.
    auto flat = Topology::build({{"cloud", Tier::Cloud, 10, std::nullopt, "z", 0}, {"s", Tier::Sensor, 1, "cloud", "z", 0}},
                                {{"s", "cloud", 1e6, 0.05, true}}, {{"z", {"cloud", "s"}}});
    std::map<Phase, Tier> edge = {{Phase::Preprocessing, Tier::Edge}, {Phase::Aggregation, Tier::Cloud},
                                  {Phase::Correlation, Tier::Cloud}, {Phase::Discovery, Tier::Cloud},
                                  {Phase::Insights, Tier::Cloud}};
    CHECK_THROWS_AS(make_plan(edge, flat, {}), PlanTopologyMismatch);
}
