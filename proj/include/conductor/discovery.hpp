#pragma once

// Pipeline stages 4-5: directly-follows discovery that merges across
// case-disjoint partial logs, footprint relations, alpha-style net
// construction, footprint conformance and performance KPIs.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conductor/events.hpp"

namespace conductor {

using ActivityPair = std::pair<std::string, std::string>;

struct DirectlyFollowsGraph {
    std::vector<std::string> activities;  // order of first appearance
    std::map<ActivityPair, std::uint64_t> edge_counts;
    std::map<std::string, std::uint64_t> start_counts;
    std::map<std::string, std::uint64_t> end_counts;

    std::uint64_t trace_count() const;
    std::uint64_t edge(const std::string& a, const std::string& b) const;
    bool empty() const { return activities.empty(); }

    /// Equality over counts and the activity set; first-appearance order is ignored.
    friend bool operator==(const DirectlyFollowsGraph& a, const DirectlyFollowsGraph& b);
};

DirectlyFollowsGraph dfg_from_log(const EventLog& log);

/// Pointwise sum. Parts must come from case-disjoint partial logs.
DirectlyFollowsGraph merge_dfg(std::span<const DirectlyFollowsGraph> parts);

enum class Relation { Causality, ReverseCausality, Parallel, Choice };

std::string_view symbol(Relation r);

class FootprintMatrix {
  public:
    FootprintMatrix() = default;
    FootprintMatrix(std::vector<std::string> activities, std::map<ActivityPair, Relation> relations);

    const std::vector<std::string>& activities() const { return activities_; }
    const std::map<ActivityPair, Relation>& relations() const { return relations_; }
    std::optional<Relation> relation(const std::string& a, const std::string& b) const;
    bool contains(const std::string& activity) const;

    /// Reports the first broken invariant (asymmetric pair, missing pair), or nullopt.
    std::optional<std::string> check() const;

    /// Equality over the relation map; activity order is ignored.
    friend bool operator==(const FootprintMatrix& a, const FootprintMatrix& b) {
        return a.relations_ == b.relations_ && a.sorted() == b.sorted();
    }

  private:
    std::vector<std::string> sorted() const;
    std::vector<std::string> activities_;
    std::map<ActivityPair, Relation> relations_;
};

/// a > b iff edge_counts(a, b) >= min_edge_count.
FootprintMatrix footprint(const DirectlyFollowsGraph& dfg, std::uint64_t min_edge_count = 1);

/// Grid with `->`, `<-`, `||`, `#` in activity order.
std::string format_footprint(const FootprintMatrix& fp);

struct Place {
    std::set<std::string> inputs;   // transitions producing into the place
    std::set<std::string> outputs;  // transitions consuming from it

    friend auto operator<=>(const Place&, const Place&) = default;
};

struct ProcessNet {
    std::vector<std::string> transitions;
    std::vector<Place> places;  // maximal (A, B) pairs, sorted
    Place source;               // outputs = start activities
    Place sink;                 // inputs = end activities

    friend bool operator==(const ProcessNet&, const ProcessNet&) = default;
};

/// Classic alpha construction from the footprint; start/end activities come
/// from the graph. Throws DegenerateLog without start or end activities.
ProcessNet alpha_net(const FootprintMatrix& fp, const DirectlyFollowsGraph& dfg);

/// Graphviz text for inspection.
std::string to_dot(const ProcessNet& net);

/// Fraction of adjacent event pairs allowed by the footprint (-> or || in
/// trace direction). 1.0 for logs without pairs.
double fitness(const EventLog& log, const FootprintMatrix& fp);

struct DurationStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double max = 0.0;

    friend bool operator==(const DurationStats&, const DurationStats&) = default;
};

struct Kpis {
    std::map<std::string, double> throughput;  // per case, last minus first event time
    std::map<std::string, DurationStats> service;  // per activity
    std::map<std::string, DurationStats> waiting;  // per activity, waiting before it starts
    double fitness = 1.0;

    friend bool operator==(const Kpis&, const Kpis&) = default;
};

/// Service time of an occurrence is its declared duration, capped by the gap
/// to the next event; waiting before an event is the gap minus the
/// predecessor's declared duration, floored at zero.
Kpis kpis(const EventLog& log, const std::map<std::string, double>& activity_durations,
          const FootprintMatrix& model);

/// Same, checking fitness against the log's own footprint.
Kpis kpis(const EventLog& log, const std::map<std::string, double>& activity_durations);

}  // namespace conductor
