#include "conductor/discovery.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "conductor/error.hpp"

namespace conductor {

namespace {

void note_activity(DirectlyFollowsGraph& g, std::set<std::string>& seen, const std::string& a) {
    if (seen.insert(a).second) g.activities.push_back(a);
}

using Mask = std::uint64_t;

bool subset(Mask a, Mask b) { return (a & ~b) == 0; }

}  // namespace

std::uint64_t DirectlyFollowsGraph::trace_count() const {
    std::uint64_t n = 0;
    for (const auto& [_, c] : start_counts) n += c;
    return n;
}

std::uint64_t DirectlyFollowsGraph::edge(const std::string& a, const std::string& b) const {
    auto it = edge_counts.find({a, b});
    return it == edge_counts.end() ? 0 : it->second;
}

bool operator==(const DirectlyFollowsGraph& a, const DirectlyFollowsGraph& b) {
    if (a.edge_counts != b.edge_counts || a.start_counts != b.start_counts || a.end_counts != b.end_counts)
        return false;
    return std::set<std::string>(a.activities.begin(), a.activities.end()) ==
           std::set<std::string>(b.activities.begin(), b.activities.end());
}

DirectlyFollowsGraph dfg_from_log(const EventLog& log) {
    DirectlyFollowsGraph g;
    std::set<std::string> seen;
    for (const auto& [_, trace] : log.traces()) {
        if (trace.empty()) continue;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            note_activity(g, seen, trace[i].activity);
            if (i + 1 < trace.size()) ++g.edge_counts[{trace[i].activity, trace[i + 1].activity}];
        }
        ++g.start_counts[trace.front().activity];
        ++g.end_counts[trace.back().activity];
    }
    return g;
}

DirectlyFollowsGraph merge_dfg(std::span<const DirectlyFollowsGraph> parts) {
    DirectlyFollowsGraph g;
    std::set<std::string> seen;
    for (const auto& p : parts) {
        for (const auto& a : p.activities) note_activity(g, seen, a);
        for (const auto& [k, c] : p.edge_counts) g.edge_counts[k] += c;
        for (const auto& [k, c] : p.start_counts) g.start_counts[k] += c;
        for (const auto& [k, c] : p.end_counts) g.end_counts[k] += c;
    }
    return g;
}

std::string_view symbol(Relation r) {
    switch (r) {
        case Relation::Causality: return "->";
        case Relation::ReverseCausality: return "<-";
        case Relation::Parallel: return "||";
        case Relation::Choice: return "#";
    }
    return {};
}

FootprintMatrix::FootprintMatrix(std::vector<std::string> activities, std::map<ActivityPair, Relation> relations)
    : activities_(std::move(activities)), relations_(std::move(relations)) {}

std::optional<Relation> FootprintMatrix::relation(const std::string& a, const std::string& b) const {
    auto it = relations_.find({a, b});
    if (it == relations_.end()) return std::nullopt;
    return it->second;
}

bool FootprintMatrix::contains(const std::string& activity) const {
    return std::find(activities_.begin(), activities_.end(), activity) != activities_.end();
}

std::vector<std::string> FootprintMatrix::sorted() const {
    auto s = activities_;
    std::sort(s.begin(), s.end());
    return s;
}

std::optional<std::string> FootprintMatrix::check() const {
    if (relations_.size() != activities_.size() * activities_.size())
        return "relation count " + std::to_string(relations_.size()) + " != activities squared";
    for (const auto& a : activities_) {
        for (const auto& b : activities_) {
            auto ab = relation(a, b), ba = relation(b, a);
            if (!ab || !ba) return "missing pair (" + a + "," + b + ")";
            const bool ok = (*ab == Relation::Causality && *ba == Relation::ReverseCausality) ||
                            (*ab == Relation::ReverseCausality && *ba == Relation::Causality) ||
                            (*ab == Relation::Parallel && *ba == Relation::Parallel) ||
                            (*ab == Relation::Choice && *ba == Relation::Choice);
            if (!ok) return "inconsistent pair (" + a + "," + b + ")";
        }
    }
    return std::nullopt;
}

FootprintMatrix footprint(const DirectlyFollowsGraph& dfg, std::uint64_t min_edge_count) {
    const std::uint64_t threshold = std::max<std::uint64_t>(1, min_edge_count);
    std::map<ActivityPair, Relation> rel;
    for (const auto& a : dfg.activities) {
        for (const auto& b : dfg.activities) {
            const bool ab = dfg.edge(a, b) >= threshold;
            const bool ba = dfg.edge(b, a) >= threshold;
            Relation r = Relation::Choice;
            if (ab && ba)
                r = Relation::Parallel;
            else if (ab)
                r = Relation::Causality;
            else if (ba)
                r = Relation::ReverseCausality;
            rel.emplace(ActivityPair{a, b}, r);
        }
    }
    return FootprintMatrix(dfg.activities, std::move(rel));
}

std::string format_footprint(const FootprintMatrix& fp) {
    std::size_t width = 2;
    for (const auto& a : fp.activities()) width = std::max(width, a.size());
    auto pad = [&](std::string_view s) {
        std::string out(s);
        out.resize(width + 1, ' ');
        return out;
    };
    std::string out = pad("");
    for (const auto& a : fp.activities()) out += pad(a);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
    for (const auto& a : fp.activities()) {
        std::string row = pad(a);
        for (const auto& b : fp.activities()) row += pad(symbol(*fp.relation(a, b)));
        while (!row.empty() && row.back() == ' ') row.pop_back();
        out += row + '\n';
    }
    return out;
}

ProcessNet alpha_net(const FootprintMatrix& fp, const DirectlyFollowsGraph& dfg) {
    if (dfg.start_counts.empty() || dfg.end_counts.empty())
        throw DegenerateLog("log has no start or end activities");

    std::vector<std::string> acts = fp.activities();
    std::sort(acts.begin(), acts.end());
    if (acts.size() > 64) throw InvalidConfig("alpha construction supports at most 64 activities");
    const std::size_t n = acts.size();

    std::vector<Mask> choice(n, 0), causal_to(n, 0), causal_from(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            auto r = fp.relation(acts[i], acts[j]);
            if (!r) continue;
            if (*r == Relation::Choice) choice[i] |= Mask{1} << j;
            if (*r == Relation::Causality) {
                causal_to[i] |= Mask{1} << j;
                causal_from[j] |= Mask{1} << i;
            }
        }
    }
    auto self_choice = [&](std::size_t x) { return (choice[x] >> x) & 1; };
    auto can_add_a = [&](Mask a, Mask b, std::size_t x) {
        return !((a >> x) & 1) && self_choice(x) && subset(a, choice[x]) && subset(b, causal_to[x]);
    };
    auto can_add_b = [&](Mask a, Mask b, std::size_t x) {
        return !((b >> x) & 1) && self_choice(x) && subset(b, choice[x]) && subset(a, causal_from[x]);
    };

    // Every subset of a valid (A, B) is valid, so the valid pairs are reachable
    // from singleton pairs by single-element extensions; a pair is maximal iff
    // no extension applies.
    std::set<std::pair<Mask, Mask>> visited;
    std::vector<std::pair<Mask, Mask>> stack, maximal;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (((causal_to[a] >> b) & 1) && self_choice(a) && self_choice(b)) {
                std::pair<Mask, Mask> p{Mask{1} << a, Mask{1} << b};
                if (visited.insert(p).second) stack.push_back(p);
            }
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        bool extended = false;
        for (std::size_t x = 0; x < n; ++x) {
            if (can_add_a(a, b, x)) {
                extended = true;
                std::pair<Mask, Mask> p{a | (Mask{1} << x), b};
                if (visited.insert(p).second) stack.push_back(p);
            }
            if (can_add_b(a, b, x)) {
                extended = true;
                std::pair<Mask, Mask> p{a, b | (Mask{1} << x)};
                if (visited.insert(p).second) stack.push_back(p);
            }
        }
        if (!extended) maximal.push_back({a, b});
    }

    auto to_set = [&](Mask m) {
        std::set<std::string> s;
        for (std::size_t i = 0; i < n; ++i)
            if ((m >> i) & 1) s.insert(acts[i]);
        return s;
    };

    ProcessNet net;
    net.transitions = acts;
    for (auto [a, b] : maximal) net.places.push_back({to_set(a), to_set(b)});
    std::sort(net.places.begin(), net.places.end());
    for (const auto& [a, _] : dfg.start_counts) net.source.outputs.insert(a);
    for (const auto& [a, _] : dfg.end_counts) net.sink.inputs.insert(a);
    return net;
}

std::string to_dot(const ProcessNet& net) {
    std::ostringstream out;
    auto name = [](const Place& p) {
        std::string s = "p_";
        for (const auto& a : p.inputs) s += a + "_";
        s += "_";
        for (const auto& b : p.outputs) s += "_" + b;
        return s;
    };
    out << "digraph net {\n  rankdir=LR;\n";
    out << "  source [shape=circle,label=\"start\"];\n  sink [shape=doublecircle,label=\"end\"];\n";
    for (const auto& t : net.transitions) out << "  \"t_" << t << "\" [shape=box,label=\"" << t << "\"];\n";
    for (const auto& p : net.places) out << "  \"" << name(p) << "\" [shape=circle,label=\"\"];\n";
    for (const auto& t : net.source.outputs) out << "  source -> \"t_" << t << "\";\n";
    for (const auto& t : net.sink.inputs) out << "  \"t_" << t << "\" -> sink;\n";
    for (const auto& p : net.places) {
        for (const auto& a : p.inputs) out << "  \"t_" << a << "\" -> \"" << name(p) << "\";\n";
        for (const auto& b : p.outputs) out << "  \"" << name(p) << "\" -> \"t_" << b << "\";\n";
    }
    out << "}\n";
    return out.str();
}

double fitness(const EventLog& log, const FootprintMatrix& fp) {
    std::uint64_t pairs = 0, allowed = 0;
    for (const auto& [_, trace] : log.traces()) {
        for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
            ++pairs;
            auto r = fp.relation(trace[i].activity, trace[i + 1].activity);
            if (r && (*r == Relation::Causality || *r == Relation::Parallel)) ++allowed;
        }
    }
    return pairs == 0 ? 1.0 : static_cast<double>(allowed) / static_cast<double>(pairs);
}

namespace {

struct Accumulator {
    std::uint64_t count = 0;
    double sum = 0.0;
    double max = 0.0;

    void add(double v) {
        max = count == 0 ? v : std::max(max, v);
        sum += v;
        ++count;
    }
    DurationStats stats() const { return {count, count ? sum / static_cast<double>(count) : 0.0, max}; }
};

}  // namespace

Kpis kpis(const EventLog& log, const std::map<std::string, double>& activity_durations,
          const FootprintMatrix& model) {
    auto declared = [&](const std::string& a) {
        auto it = activity_durations.find(a);
        return it == activity_durations.end() ? 0.0 : it->second;
    };
    Kpis out;
    std::map<std::string, Accumulator> service, waiting;
    for (const auto& [case_id, trace] : log.traces()) {
        if (trace.empty()) continue;
        out.throughput[case_id] = trace.back().time - trace.front().time;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const double d = declared(trace[i].activity);
            if (i + 1 < trace.size()) {
                const double gap = trace[i + 1].time - trace[i].time;
                service[trace[i].activity].add(std::min(d, gap));
                waiting[trace[i + 1].activity].add(std::max(0.0, gap - d));
            } else {
                service[trace[i].activity].add(d);
            }
        }
    }
    for (const auto& [a, acc] : service) out.service[a] = acc.stats();
    for (const auto& [a, acc] : waiting) out.waiting[a] = acc.stats();
    out.fitness = fitness(log, model);
    return out;
}

Kpis kpis(const EventLog& log, const std::map<std::string, double>& activity_durations) {
    return kpis(log, activity_durations, footprint(dfg_from_log(log)));
}

}  // namespace conductor
