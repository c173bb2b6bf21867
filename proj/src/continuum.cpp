#include "conductor/continuum.hpp"

#include <algorithm>
#include <set>

#include "conductor/error.hpp"

namespace conductor {

std::string_view to_string(Tier t) {
    switch (t) {
        case Tier::Sensor: return "sensor";
        case Tier::Edge: return "edge";
        case Tier::Fog: return "fog";
        case Tier::Cloud: return "cloud";
    }
    return {};
}

std::optional<Tier> parse_tier(std::string_view s) {
    for (Tier t : {Tier::Sensor, Tier::Edge, Tier::Fog, Tier::Cloud})
        if (to_string(t) == s) return t;
    return std::nullopt;
}

std::string_view to_string(Violation::Kind k) {
    using K = Violation::Kind;
    switch (k) {
        case K::MultipleRoots: return "MultipleRoots";
        case K::NoRoot: return "NoRoot";
        case K::Cycle: return "Cycle";
        case K::TierInversion: return "TierInversion";
        case K::UnknownParent: return "UnknownParent";
        case K::DuplicateNode: return "DuplicateNode";
        case K::MissingLink: return "MissingLink";
        case K::LinkMismatch: return "LinkMismatch";
        case K::OrphanZone: return "OrphanZone";
        case K::ZoneMembership: return "ZoneMembership";
        case K::BadCapacity: return "BadCapacity";
        case K::BadLink: return "BadLink";
    }
    return {};
}

Topology Topology::build(std::vector<NodeSpec> nodes, std::vector<LinkSpec> links,
                         std::vector<TrustZone> zones) {
    Topology t;
    t.nodes_ = std::move(nodes);
    t.links_ = std::move(links);
    t.zones_ = std::move(zones);
    for (std::size_t i = 0; i < t.nodes_.size(); ++i) t.node_index_.try_emplace(t.nodes_[i].node_id, i);
    for (std::size_t i = 0; i < t.links_.size(); ++i) t.uplink_index_.try_emplace(t.links_[i].child, i);
    for (const auto& z : t.zones_)
        for (const auto& m : z.member_nodes) t.zone_index_.try_emplace(m, z.zone_id);
    return t;
}

bool Topology::contains(std::string_view node_id) const { return node_index_.contains(node_id); }

const NodeSpec& Topology::node(std::string_view node_id) const {
    auto it = node_index_.find(node_id);
    if (it == node_index_.end()) throw UnknownNode("unknown node '" + std::string(node_id) + "'");
    return nodes_[it->second];
}

const LinkSpec* Topology::uplink(std::string_view child) const {
    auto it = uplink_index_.find(child);
    return it == uplink_index_.end() ? nullptr : &links_[it->second];
}

const std::string& Topology::root() const {
    for (const auto& n : nodes_)
        if (!n.parent) return n.node_id;
    throw UnknownNode("topology has no root");
}

std::vector<std::string> Topology::children(std::string_view node_id) const {
    std::vector<std::string> out;
    for (const auto& n : nodes_)
        if (n.parent && *n.parent == node_id) out.push_back(n.node_id);
    return out;
}

std::vector<std::string> Topology::sensors() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_)
        if (n.tier == Tier::Sensor) out.push_back(n.node_id);
    return out;
}

const std::string& Topology::zone_of(std::string_view node_id) const {
    auto it = zone_index_.find(node_id);
    if (it != zone_index_.end()) return it->second;
    return node(node_id).trust_zone;
}

std::vector<Violation> validate(const Topology& topology) {
    using K = Violation::Kind;
    std::vector<Violation> out;
    const auto& nodes = topology.nodes();

    std::set<std::string> seen;
    for (const auto& n : nodes) {
        if (!seen.insert(n.node_id).second) out.push_back({K::DuplicateNode, n.node_id});
        if (!(n.compute_capacity > 0)) out.push_back({K::BadCapacity, n.node_id});
    }

    std::vector<std::string> roots;
    for (const auto& n : nodes) {
        if (!n.parent) {
            roots.push_back(n.node_id);
            continue;
        }
        if (!topology.contains(*n.parent)) {
            out.push_back({K::UnknownParent, n.node_id + " -> " + *n.parent});
            continue;
        }
        const auto& p = topology.node(*n.parent);
        if (p.tier < n.tier)
            out.push_back({K::TierInversion, n.node_id + " (" + std::string(to_string(n.tier)) +
                                                 ") under " + p.node_id + " (" +
                                                 std::string(to_string(p.tier)) + ")"});
        const LinkSpec* l = topology.uplink(n.node_id);
        if (!l)
            out.push_back({K::MissingLink, n.node_id});
        else if (l->parent != *n.parent)
            out.push_back({K::LinkMismatch, n.node_id + " link points to " + l->parent});
    }
    if (roots.empty() && !nodes.empty()) out.push_back({K::NoRoot, ""});
    if (roots.size() > 1) {
        std::string ids;
        for (const auto& r : roots) ids += (ids.empty() ? "" : ",") + r;
        out.push_back({K::MultipleRoots, ids});
    }

    std::map<std::string, int> link_count;
    for (const auto& l : topology.links()) {
        ++link_count[l.child];
        if (!topology.contains(l.child) || !topology.contains(l.parent))
            out.push_back({K::LinkMismatch, l.child + " -> " + l.parent});
        if (!(l.bandwidth > 0) || l.latency < 0) out.push_back({K::BadLink, l.child});
    }
    for (const auto& [child, count] : link_count) {
        if (count > 1) out.push_back({K::LinkMismatch, child + " has multiple uplinks"});
        if (topology.contains(child) && !topology.node(child).parent)
            out.push_back({K::LinkMismatch, "root " + child + " has an uplink"});
    }

    // Cycle detection: walk parents, at most |nodes| steps.
    std::set<std::string> reported;
    for (const auto& n : nodes) {
        std::set<std::string> path{n.node_id};
        std::optional<std::string> cur = n.parent;
        while (cur && topology.contains(*cur)) {
            if (!path.insert(*cur).second) {
                if (reported.insert(*cur).second) out.push_back({K::Cycle, *cur});
                break;
            }
            cur = topology.node(*cur).parent;
        }
    }

    std::map<std::string, int> membership;
    std::set<std::string> zone_ids;
    for (const auto& z : topology.zones()) {
        zone_ids.insert(z.zone_id);
        for (const auto& m : z.member_nodes) {
            ++membership[m];
            if (!topology.contains(m)) out.push_back({K::ZoneMembership, m + " in zone " + z.zone_id});
        }
    }
    for (const auto& n : nodes) {
        if (!zone_ids.contains(n.trust_zone)) out.push_back({K::OrphanZone, n.node_id + " -> " + n.trust_zone});
        const int c = membership[n.node_id];
        if (c != 1)
            out.push_back({K::ZoneMembership, n.node_id + " listed in " + std::to_string(c) + " zones"});
        else if (topology.zone_of(n.node_id) != n.trust_zone)
            out.push_back({K::ZoneMembership, n.node_id + " zone disagrees with partition"});
    }
    return out;
}

std::vector<LinkSpec> path_to_root(const Topology& topology, std::string_view node) {
    std::vector<LinkSpec> out;
    const NodeSpec* cur = &topology.node(node);
    std::size_t guard = topology.nodes().size();
    while (cur->parent && guard-- > 0) {
        const LinkSpec* l = topology.uplink(cur->node_id);
        if (!l) throw UnknownNode("node '" + cur->node_id + "' has no uplink");
        out.push_back(*l);
        cur = &topology.node(*cur->parent);
    }
    return out;
}

std::vector<std::string> ancestors_inclusive(const Topology& topology, std::string_view node) {
    std::vector<std::string> out{topology.node(node).node_id};
    for (const auto& l : path_to_root(topology, node)) out.push_back(l.parent);
    return out;
}

bool crosses_zone(const Topology& topology, std::string_view from, std::string_view to) {
    topology.node(from);
    topology.node(to);
    return topology.zone_of(from) != topology.zone_of(to);
}

std::vector<Hop> route(const Topology& topology, std::string_view from, std::string_view to) {
    const auto up_from = ancestors_inclusive(topology, from);
    const auto up_to = ancestors_inclusive(topology, to);
    std::size_t i = 0;
    std::size_t lca_in_to = up_to.size();
    for (; i < up_from.size(); ++i) {
        auto it = std::find(up_to.begin(), up_to.end(), up_from[i]);
        if (it != up_to.end()) {
            lca_in_to = static_cast<std::size_t>(it - up_to.begin());
            break;
        }
    }
    std::vector<Hop> hops;
    for (std::size_t k = 0; k < i; ++k)
        hops.push_back({topology.uplink(up_from[k]), up_from[k], up_from[k + 1]});
    for (std::size_t k = lca_in_to; k-- > 0;)
        hops.push_back({topology.uplink(up_to[k]), up_to[k + 1], up_to[k]});
    return hops;
}

std::optional<std::string> host_at_tier(const Topology& topology, std::string_view node, Tier tier) {
    for (const auto& id : ancestors_inclusive(topology, node)) {
        const auto& n = topology.node(id);
        if (n.tier >= tier) {
            if (n.tier == tier) return id;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace conductor
