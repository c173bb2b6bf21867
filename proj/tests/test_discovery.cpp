#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "conductor/discovery.hpp"
#include "conductor/error.hpp"
#include "conductor/fixtures.hpp"
#include "conductor/scenario.hpp"
#include "support.hpp"

using namespace conductor;
using testutil::log_of;

namespace {

const std::vector<std::vector<std::string>> kReference = {{"a", "b", "c", "d"}, {"a", "c", "b", "d"}, {"a", "e", "d"}};

Place place(std::set<std::string> in, std::set<std::string> out) { return {std::move(in), std::move(out)}; }

std::vector<EventLog> random_partition(const EventLog& log, testutil::Gen& g, std::size_t parts) {
    std::vector<EventLog> out(parts);
    for (const auto& [_, trace] : log.traces()) {
        auto& dst = out[testutil::below(g, parts)];
        for (const auto& e : trace) dst.append(e);
    }
    return out;
}

}  // namespace

TEST_CASE("dfg_from_log") {
    SUBCASE("repeated trace") {
        auto d = dfg_from_log(log_of({{"a", "b"}, {"a", "b"}}));
        CHECK(d.edge("a", "b") == 2);
        CHECK(d.start_counts.at("a") == 2);
        CHECK(d.end_counts.at("b") == 2);
        CHECK(d.trace_count() == 2);
    }
    SUBCASE("empty") { CHECK(dfg_from_log(EventLog{}).empty()); }
    SUBCASE("reference log") {
        auto d = dfg_from_log(log_of(kReference));
        std::map<ActivityPair, std::uint64_t> want;
        for (auto [a, b] : std::vector<std::pair<const char*, const char*>>{
                 {"a", "b"}, {"b", "c"}, {"c", "d"}, {"a", "c"}, {"c", "b"}, {"b", "d"}, {"a", "e"}, {"e", "d"}})
            want[{a, b}] = 1;
        CHECK(d.edge_counts == want);
        CHECK(d.activities == std::vector<std::string>{"a", "b", "c", "d", "e"});
    }
}

TEST_CASE("merge_dfg") {
    CHECK(merge_dfg(std::vector<DirectlyFollowsGraph>{}).empty());
    auto g1 = dfg_from_log(log_of(kReference));
    std::vector<DirectlyFollowsGraph> one = {g1};
    CHECK(merge_dfg(one) == g1);
}

TEST_CASE("property: merge is associative, commutative, with the empty identity") {
    testutil::Gen g(17);
    for (int iter = 0; iter < 100; ++iter) {
        auto a = dfg_from_log(log_of(testutil::random_traces(g, 20, 6)));
        auto b = dfg_from_log(log_of(testutil::random_traces(g, 20, 6)));
        auto c = dfg_from_log(log_of(testutil::random_traces(g, 20, 6)));
        std::vector<DirectlyFollowsGraph> ab = {a, b}, ba = {b, a}, a_e = {a, DirectlyFollowsGraph{}};
        CHECK(merge_dfg(ab) == merge_dfg(ba));
        std::vector<DirectlyFollowsGraph> left = {merge_dfg(ab), c};
        std::vector<DirectlyFollowsGraph> bc = {b, c};
        std::vector<DirectlyFollowsGraph> right = {a, merge_dfg(bc)};
        CHECK(merge_dfg(left) == merge_dfg(right));
        CHECK(merge_dfg(a_e) == a);
    }
}

TEST_CASE("property: merged partial graphs equal the central graph on generated logs") {
    ScenarioConfig cfg;
    cfg.n_cases = 1000;
    const auto sc = generate_scenario(cfg, fixture_topology());
    const EventLog full = ground_truth_log(sc.ledger);
    testutil::Gen g(4);
    for (std::size_t parts : {2u, 3u, 5u}) {
        std::vector<DirectlyFollowsGraph> graphs;
        for (const auto& p : random_partition(full, g, parts)) graphs.push_back(dfg_from_log(p));
        CHECK(merge_dfg(graphs) == dfg_from_log(full));
    }
}

TEST_CASE("footprint") {
    SUBCASE("one edge") {
        auto fp = footprint(dfg_from_log(log_of({{"a", "b"}})));
        CHECK(fp.relation("a", "b") == Relation::Causality);
        CHECK(fp.relation("b", "a") == Relation::ReverseCausality);
        CHECK(fp.relation("a", "a") == Relation::Choice);
        CHECK(fp.relation("b", "b") == Relation::Choice);
    }
    SUBCASE("both directions") {
        auto fp = footprint(dfg_from_log(log_of({{"a", "b"}, {"b", "a"}})));
        CHECK(fp.relation("a", "b") == Relation::Parallel);
        CHECK(fp.relation("b", "a") == Relation::Parallel);
    }
    SUBCASE("reference log") {
        auto fp = footprint(dfg_from_log(log_of(kReference)));
        CHECK(fp.relation("a", "b") == Relation::Causality);
        CHECK(fp.relation("a", "c") == Relation::Causality);
        CHECK(fp.relation("a", "e") == Relation::Causality);
        CHECK(fp.relation("b", "c") == Relation::Parallel);
        CHECK(fp.relation("b", "d") == Relation::Causality);
        CHECK(fp.relation("c", "d") == Relation::Causality);
        CHECK(fp.relation("e", "d") == Relation::Causality);
        CHECK(fp.relation("b", "e") == Relation::Choice);
        CHECK(fp.relation("a", "d") == Relation::Choice);
        CHECK_FALSE(fp.check());
    }
    SUBCASE("edge threshold") {
        auto d = dfg_from_log(log_of({{"a", "b"}, {"a", "b"}, {"b", "a"}}));
        CHECK(footprint(d, 1).relation("a", "b") == Relation::Parallel);
        CHECK(footprint(d, 2).relation("a", "b") == Relation::Causality);
    }
    SUBCASE("text grid") {
        const std::string grid = format_footprint(footprint(dfg_from_log(log_of({{"a", "b"}}))));
        CHECK(grid == "   a  b\na  #  ->\nb  <- #\n");
    }
}

TEST_CASE("property: footprint equals the relation oracle and is consistent") {
    testutil::Gen g(29);
    for (int iter = 0; iter < 300; ++iter) {
        const auto traces = testutil::random_traces(g, 30, 1 + testutil::below(g, 10));
        const auto fp = footprint(dfg_from_log(log_of(traces)));
        CHECK(testutil::relations_of(fp) == testutil::relation_oracle(traces));
        CHECK_FALSE(fp.check());
    }
}

TEST_CASE("alpha_net") {
    SUBCASE("two activity chain") {
        auto log = log_of({{"a", "b"}});
        auto d = dfg_from_log(log);
        auto net = alpha_net(footprint(d), d);
        CHECK(net.source.outputs == std::set<std::string>{"a"});
        CHECK(net.sink.inputs == std::set<std::string>{"b"});
        CHECK(net.places == std::vector<Place>{place({"a"}, {"b"})});
    }
    SUBCASE("reference log places") {
        auto d = dfg_from_log(log_of(kReference));
        auto net = alpha_net(footprint(d), d);
        std::vector<Place> want = {place({"a"}, {"b", "e"}), place({"a"}, {"c", "e"}), place({"b", "e"}, {"d"}),
                                   place({"c", "e"}, {"d"})};
        std::sort(want.begin(), want.end());
        CHECK(net.places == want);
        CHECK(net.source.outputs == std::set<std::string>{"a"});
        CHECK(net.sink.inputs == std::set<std::string>{"d"});
        CHECK(to_dot(net).find("digraph") != std::string::npos);
    }
    SUBCASE("empty log") {
        DirectlyFollowsGraph d;
        CHECK_THROWS_AS(alpha_net(footprint(d), d), DegenerateLog);
    }
}

TEST_CASE("property: alpha net ignores trace order") {
    testutil::Gen g(31);
    for (int iter = 0; iter < 100; ++iter) {
        auto traces = testutil::random_traces(g, 15, 5, 5);
        auto d1 = dfg_from_log(log_of(traces));
        std::shuffle(traces.begin(), traces.end(), g);
        auto d2 = dfg_from_log(log_of(traces));
        CHECK(alpha_net(footprint(d1), d1) == alpha_net(footprint(d2), d2));
    }
}

TEST_CASE("fitness") {
    auto ab = log_of({{"a", "b"}});
    CHECK(fitness(ab, footprint(dfg_from_log(log_of({{"b", "a"}})))) == 0.0);
    CHECK(fitness(EventLog{}, FootprintMatrix{}) == 1.0);
    CHECK(fitness(log_of({{"a"}}), FootprintMatrix{}) == 1.0);
    // Model allows a->b, b->c only. Log pairs: a->b ok, b->c ok, c->a no, a->c no.
    auto model = footprint(dfg_from_log(log_of({{"a", "b", "c"}})));
    CHECK(fitness(log_of({{"a", "b", "c"}, {"c", "a", "c"}}), model) == 0.5);
}

TEST_CASE("property: every log fits its own footprint") {
    testutil::Gen g(37);
    for (int iter = 0; iter < 200; ++iter) {
        auto log = log_of(testutil::random_traces(g, 40, 1 + testutil::below(g, 10)));
        CHECK(fitness(log, footprint(dfg_from_log(log))) == 1.0);
    }
}

TEST_CASE("kpis examples") {
    SUBCASE("single event case") {
        auto k = kpis(log_of({{"a"}}), {});
        CHECK(k.throughput.at("c0") == 0.0);
    }
    SUBCASE("waiting after declared service") {
        auto k = kpis(log_of({{"a", "b"}}, 10.0), {{"a", 4.0}});
        CHECK(k.waiting.at("b").mean == doctest::Approx(6.0));
        CHECK(k.service.at("a").mean == doctest::Approx(4.0));
        CHECK(k.throughput.at("c0") == doctest::Approx(10.0));
    }
}

TEST_CASE("kpis agree with a full-scan recomputation on a generated scenario") {
    ScenarioConfig cfg;
    cfg.n_cases = 100;
    const auto sc = generate_scenario(cfg, fixture_topology());
    const EventLog log = ground_truth_log(sc.ledger);
    const auto durations = fixture_settings().activity_durations;
    const Kpis k = kpis(log, durations);

    std::map<std::string, std::vector<double>> service, waiting;
    std::map<std::string, double> throughput;
    for (const auto& [c, trace] : log.traces()) {
        throughput[c] = trace.back().time - trace.front().time;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const double declared = durations.count(trace[i].activity) ? durations.at(trace[i].activity) : 0.0;
            if (i + 1 < trace.size()) {
                const double gap = trace[i + 1].time - trace[i].time;
                service[trace[i].activity].push_back(std::min(declared, gap));
                waiting[trace[i + 1].activity].push_back(std::max(0.0, gap - declared));
            } else {
                service[trace[i].activity].push_back(declared);
            }
        }
    }
    CHECK(k.throughput.size() == throughput.size());
    for (const auto& [c, t] : throughput) CHECK(k.throughput.at(c) == doctest::Approx(t));
    auto check_stats = [](const std::map<std::string, DurationStats>& got, const std::map<std::string, std::vector<double>>& want) {
        CHECK(got.size() == want.size());
        for (const auto& [a, xs] : want) {
            CAPTURE(a);
            REQUIRE(got.count(a));
            CHECK(got.at(a).count == xs.size());
            CHECK(got.at(a).mean == doctest::Approx(std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size())));
            CHECK(got.at(a).max == doctest::Approx(*std::max_element(xs.begin(), xs.end())));
        }
    };
    check_stats(k.service, service);
    check_stats(k.waiting, waiting);
    CHECK(k.fitness == 1.0);
}
