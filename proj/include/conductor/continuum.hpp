#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace conductor {

/// Compute tiers, ordered from the data source upward.
enum class Tier { Sensor = 0, Edge, Fog, Cloud };

std::string_view to_string(Tier t);
std::optional<Tier> parse_tier(std::string_view s);

struct NodeSpec {
    std::string node_id;
    Tier tier = Tier::Sensor;
    double compute_capacity = 1.0;  // compute-units per second
    std::optional<std::string> parent;
    std::string trust_zone;
    double clock_skew = 0.0;  // seconds added to true time by this node's clock

    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct LinkSpec {
    std::string child;
    std::string parent;
    double bandwidth = 1.0;  // bytes per second
    double latency = 0.0;    // seconds
    bool reliable = true;

    /// Seconds needed to push `bytes` across this link.
    double transfer_time(double bytes) const { return latency + bytes / bandwidth; }

    friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

struct TrustZone {
    std::string zone_id;
    std::vector<std::string> member_nodes;

    friend bool operator==(const TrustZone&, const TrustZone&) = default;
};

struct Violation {
    enum class Kind {
        MultipleRoots,
        NoRoot,
        Cycle,
        TierInversion,
        UnknownParent,
        DuplicateNode,
        MissingLink,
        LinkMismatch,
        OrphanZone,
        ZoneMembership,
        BadCapacity,
        BadLink,
    } kind;
    std::string detail;
};

std::string_view to_string(Violation::Kind k);

/// Hierarchical sensor → edge → fog → cloud tree with links and trust zones.
/// Construct through Topology::build, which indexes the node and link sets;
/// the value is immutable afterwards.
class Topology {
  public:
    Topology() = default;

    static Topology build(std::vector<NodeSpec> nodes, std::vector<LinkSpec> links,
                          std::vector<TrustZone> zones);

    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    const std::vector<LinkSpec>& links() const { return links_; }
    const std::vector<TrustZone>& zones() const { return zones_; }

    bool contains(std::string_view node_id) const;
    /// Throws UnknownNode.
    const NodeSpec& node(std::string_view node_id) const;
    /// Link from `child` to its parent, or nullptr for the root.
    const LinkSpec* uplink(std::string_view child) const;
    /// Id of the unique parentless node; throws if none.
    const std::string& root() const;
    std::vector<std::string> children(std::string_view node_id) const;
    /// Nodes of tier Sensor, in declaration order.
    std::vector<std::string> sensors() const;
    /// Zone id of `node_id` according to the zone partition (falls back to NodeSpec::trust_zone).
    const std::string& zone_of(std::string_view node_id) const;

    friend bool operator==(const Topology& a, const Topology& b) {
        return a.nodes_ == b.nodes_ && a.links_ == b.links_ && a.zones_ == b.zones_;
    }

  private:
    std::vector<NodeSpec> nodes_;
    std::vector<LinkSpec> links_;
    std::vector<TrustZone> zones_;
    std::map<std::string, std::size_t, std::less<>> node_index_;
    std::map<std::string, std::size_t, std::less<>> uplink_index_;
    std::map<std::string, std::string, std::less<>> zone_index_;
};

std::vector<Violation> validate(const Topology& topology);

/// Links from `node` up to the root, in order; empty for the root. Throws UnknownNode.
std::vector<LinkSpec> path_to_root(const Topology& topology, std::string_view node);

/// Nodes from `node` up to the root, inclusive of both ends.
std::vector<std::string> ancestors_inclusive(const Topology& topology, std::string_view node);

/// True iff the nodes lie in different trust zones. Throws UnknownNode.
bool crosses_zone(const Topology& topology, std::string_view from, std::string_view to);

/// One hop of a route: the link used and the endpoints in travel direction.
struct Hop {
    const LinkSpec* link;
    std::string from;
    std::string to;
};

/// Tree route from `from` to `to`: up to the lowest common ancestor, then down.
std::vector<Hop> route(const Topology& topology, std::string_view from, std::string_view to);

/// First node on the path from `node` to the root (inclusive) whose tier is at
/// least `tier`. Returns nullopt if that node's tier is not exactly `tier`.
std::optional<std::string> host_at_tier(const Topology& topology, std::string_view node, Tier tier);

}  // namespace conductor
