#include "conductor/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "conductor/error.hpp"
#include "conductor/rng.hpp"

namespace conductor {

namespace {

constexpr std::uint64_t kDropSalt = 0xD809;
constexpr std::uint64_t kDfgEntryBytes = 16;
constexpr std::uint64_t kDfgHeaderBytes = 32;

struct LowRecord {
    LowLevelEvent event;
    std::string sensor;
    double true_time;
    double arrival;
};

struct HighRecord {
    HighLevelEvent event;
    std::string sensor;  // source of the first contributor
    std::string host;    // node currently holding the event
    double true_time;
    double clock;
    bool sensitive;
};

class Network {
  public:
    Network(const Topology& topology, std::uint64_t seed, double drop_rate, SimMetrics& metrics)
        : topology_(topology), seed_(seed), drop_rate_(drop_rate), metrics_(metrics) {}

    /// Moves a message hop by hop, advancing `clock`. Returns false when an
    /// unreliable hop loses it.
    bool send(const std::string& from, const std::string& to, std::uint64_t bytes, std::uint64_t sensitive_payloads,
              double& clock, const std::string& message_id) {
        if (from == to) return true;
        for (const Hop& hop : route(topology_, from, to)) {
            if (!hop.link->reliable && drop_rate_ > 0.0 &&
                draw(seed_, message_id + "@" + hop.link->child, kDropSalt) < drop_rate_) {
                ++metrics_.dropped_count;
                return false;
            }
            clock += hop.link->transfer_time(static_cast<double>(bytes));
            metrics_.bytes_per_link[link_key(*hop.link)] += bytes;
            if (sensitive_payloads > 0 && topology_.zone_of(hop.from) != topology_.zone_of(hop.to))
                metrics_.sensitive_crossings += sensitive_payloads;
        }
        return true;
    }

  private:
    const Topology& topology_;
    std::uint64_t seed_;
    double drop_rate_;
    SimMetrics& metrics_;
};

double processing_time(const Topology& topology, const std::string& node, double cost) {
    return cost / topology.node(node).compute_capacity;
}

const std::string& host_for(const std::map<Phase, std::map<std::string, std::string>>& nodes, Phase phase,
                            const std::string& sensor) {
    const auto& by_sensor = nodes.at(phase);
    auto it = by_sensor.find(sensor);
    if (it == by_sensor.end())
        throw PlanTopologyMismatch("reading source '" + sensor + "' is not a sensor of the topology");
    return it->second;
}

std::uint64_t dfg_bytes(const DirectlyFollowsGraph& g) {
    return kDfgHeaderBytes + kDfgEntryBytes * (g.edge_counts.size() + g.start_counts.size() + g.end_counts.size());
}

}  // namespace

std::string link_key(const LinkSpec& link) { return link.child + "->" + link.parent; }

LatencyStats latency_stats(std::vector<double> samples) {
    LatencyStats s;
    if (samples.empty()) return s;
    std::sort(samples.begin(), samples.end());
    s.count = samples.size();
    double sum = 0.0;
    for (double v : samples) sum += v;
    s.mean = sum / static_cast<double>(samples.size());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(samples.size())));
    s.p95 = samples[std::max<std::size_t>(rank, 1) - 1];
    s.max = samples.back();
    return s;
}

RunResult run(const PlacementPlan& plan, const ScenarioConfig& config, std::span<const RawReading> readings,
              const Topology& topology) {
    const auto nodes = assign_nodes(plan.assignment, topology);
    if (!plan.nodes.empty() && plan.nodes != nodes)
        throw PlanTopologyMismatch("plan node assignment does not match the topology");
    const PipelineSettings& settings = plan.settings;
    settings.preprocess.validate();

    RunResult result;
    SimMetrics& m = result.metrics;
    m.seed = config.seed;
    m.plan_label = plan.label;
    for (const auto& l : topology.links()) m.bytes_per_link[link_key(l)] = 0;

    Network net(topology, config.seed, config.noise.drop_rate, m);
    const Recognizer recognizer{config.seed, config.noise.confusion_rate, scenario_labels()};

    // Preprocessing, then shipping low-level events to their aggregation host.
    std::map<std::string, std::vector<LowRecord>> at_agg;
    for (const RawReading& r : readings) {
        const std::string& pre = host_for(nodes, Phase::Preprocessing, r.source);
        double clock = r.true_time + r.delay;
        if (!net.send(r.source, pre, r.payload_size, r.sensitive ? 1 : 0, clock, r.reading_id)) continue;
        clock += processing_time(topology, pre, settings.preprocess.per_reading_cost);
        auto low = preprocess(r, settings.preprocess, recognizer);
        if (!low) {
            ++m.filtered_count;
            continue;
        }
        const std::string& agg = host_for(nodes, Phase::Aggregation, r.source);
        if (!net.send(pre, agg, low->size, low->sensitive ? 1 : 0, clock, r.reading_id)) continue;
        at_agg[agg].push_back({std::move(*low), r.source, r.true_time, clock});
    }

    // Fusion per aggregation host.
    std::map<std::string, std::vector<HighRecord>> at_cor;
    std::map<std::string, std::size_t> rule_min_sources;
    for (const auto& rule : settings.rules) rule_min_sources[rule.rule_id] = static_cast<std::size_t>(rule.min_sources);
    for (auto& [agg, records] : at_agg) {
        std::vector<LowLevelEvent> events;
        events.reserve(records.size());
        for (const auto& rec : records) events.push_back(rec.event);
        events = apply_skew_correction(std::move(events), topology, settings.skew_correction);

        std::map<std::string, const LowRecord*> by_id;
        for (const auto& rec : records) by_id.emplace(rec.event.event_id, &rec);

        for (auto& fused : fuse(events, settings.rules)) {
            if (fused.ambiguous) ++m.ambiguous_count;
            if (fused.event.case_id.empty()) {
                ++m.uncorrelated_count;
                continue;
            }
            // Fires once min_sources distinct sources have delivered.
            std::map<std::string, double> first_arrival;
            double true_time = std::numeric_limits<double>::infinity();
            bool sensitive = false;
            const LowRecord* first = by_id.at(fused.contributors.front());
            for (const auto& id : fused.contributors) {
                const LowRecord* rec = by_id.at(id);
                auto [it, inserted] = first_arrival.try_emplace(rec->event.source, rec->arrival);
                if (!inserted) it->second = std::min(it->second, rec->arrival);
                true_time = std::min(true_time, rec->true_time);
                sensitive = sensitive || rec->event.sensitive;
            }
            std::vector<double> arrivals;
            for (const auto& [_, a] : first_arrival) arrivals.push_back(a);
            std::sort(arrivals.begin(), arrivals.end());
            const std::size_t k = std::clamp<std::size_t>(rule_min_sources[fused.event.attributes.at("rule")], 1,
                                                          arrivals.size());
            double clock = arrivals[k - 1] +
                           processing_time(topology, agg,
                                           settings.fusion_cost_per_event *
                                               static_cast<double>(fused.contributors.size()));

            const std::string& cor = host_for(nodes, Phase::Correlation, first->sensor);
            if (!net.send(agg, cor, fused.event.size, sensitive ? 1 : 0, clock, fused.event.event_id)) continue;
            at_cor[cor].push_back({std::move(fused.event), first->sensor, cor, true_time, clock, sensitive});
        }
    }

    // Correlation per host, replaying arrivals in (arrival, event_id) order.
    std::vector<HighRecord> emitted;
    for (auto& [cor, records] : at_cor) {
        std::sort(records.begin(), records.end(), [](const HighRecord& a, const HighRecord& b) {
            if (a.clock != b.clock) return a.clock < b.clock;
            return a.event.event_id < b.event.event_id;
        });
        std::map<std::string, const HighRecord*> by_id;
        for (const auto& rec : records) by_id.emplace(rec.event.event_id, &rec);

        Correlator correlator(settings.watermark, settings.late_policy);
        const double per_event = processing_time(topology, cor, settings.correlation_cost_per_event);
        auto collect = [&](std::vector<HighLevelEvent> released, double now) {
            for (auto& e : released) {
                HighRecord rec = *by_id.at(e.event_id);
                rec.event = std::move(e);
                rec.clock = std::max(now, rec.clock) + per_event;
                emitted.push_back(std::move(rec));
            }
        };
        for (const auto& rec : records) collect(correlator.push(rec.event), rec.clock);
        collect(correlator.flush(), records.empty() ? 0.0 : records.back().clock);
        m.late_event_count += correlator.state().late_events;
    }

    // Each case is owned by the discovery host of its earliest emitted event,
    // so partial logs stay case-disjoint.
    std::sort(emitted.begin(), emitted.end(), [](const HighRecord& a, const HighRecord& b) {
        if (a.clock != b.clock) return a.clock < b.clock;
        return a.event.event_id < b.event.event_id;
    });
    std::map<std::string, std::string> owner;
    for (const auto& rec : emitted) owner.try_emplace(rec.event.case_id, host_for(nodes, Phase::Discovery, rec.sensor));

    std::map<std::string, EventLog> partial;
    std::map<std::string, std::uint64_t> partial_sensitive;
    std::vector<double> latencies;
    for (auto& rec : emitted) {
        const std::string& dis = owner.at(rec.event.case_id);
        double clock = rec.clock;
        if (!net.send(rec.host, dis, rec.event.size, rec.sensitive ? 1 : 0, clock, rec.event.event_id)) continue;
        latencies.push_back(clock - rec.true_time);
        if (rec.sensitive) ++partial_sensitive[dis];
        result.log.append(rec.event);
        partial[dis].append(std::move(rec.event));
    }

    // Discovery per host; partial graphs and logs travel to the insights host.
    std::vector<DirectlyFollowsGraph> delivered;
    for (const auto& [dis, log] : partial) {
        DirectlyFollowsGraph g = dfg_from_log(log);
        const std::string ins = host_at_tier(topology, dis, plan.tier(Phase::Insights)).value_or(dis);
        std::uint64_t bytes = dfg_bytes(g);
        for (const auto& [_, trace] : log.traces())
            for (const auto& e : trace) bytes += e.size;
        double clock = 0.0;
        if (!net.send(dis, ins, bytes, partial_sensitive[dis], clock, "dis:" + dis)) continue;
        delivered.push_back(std::move(g));
    }

    result.dfg = merge_dfg(delivered);
    result.footprint = footprint(result.dfg, settings.min_edge_count);
    result.kpis = kpis(result.log, settings.activity_durations, result.footprint);

    const std::string& root = topology.root();
    for (const auto& l : topology.links())
        if (l.parent == root) m.total_bytes_to_cloud += m.bytes_per_link[link_key(l)];
    m.event_latency = latency_stats(std::move(latencies));
    m.high_level_events = result.log.event_count();
    return result;
}

RunResult run(const PlacementPlan& plan, const GeneratedScenario& scenario, const Topology& topology) {
    return run(plan, scenario.config, scenario.readings, topology);
}

ComparisonReport compare(const SimMetrics& a, const SimMetrics& b) {
    if (a.seed != b.seed)
        throw SeedMismatch("runs use different seeds (" + std::to_string(a.seed) + " vs " + std::to_string(b.seed) + ")");
    ComparisonReport r;
    r.seed = a.seed;
    r.label_a = a.plan_label;
    r.label_b = b.plan_label;
    auto add = [&](const std::string& name, double x, double y) {
        MetricDelta d{x, y, x - y, std::nullopt};
        if (y != 0.0) d.ratio = x / y;
        r.metrics[name] = d;
    };
    auto u = [](std::uint64_t v) { return static_cast<double>(v); };
    add("total_bytes_to_cloud", u(a.total_bytes_to_cloud), u(b.total_bytes_to_cloud));
    add("event_latency.mean", a.event_latency.mean, b.event_latency.mean);
    add("event_latency.p95", a.event_latency.p95, b.event_latency.p95);
    add("event_latency.max", a.event_latency.max, b.event_latency.max);
    add("sensitive_crossings", u(a.sensitive_crossings), u(b.sensitive_crossings));
    add("late_event_count", u(a.late_event_count), u(b.late_event_count));
    add("dropped_count", u(a.dropped_count), u(b.dropped_count));
    add("filtered_count", u(a.filtered_count), u(b.filtered_count));
    add("high_level_events", u(a.high_level_events), u(b.high_level_events));
    std::set<std::string> links;
    for (const auto& [k, _] : a.bytes_per_link) links.insert(k);
    for (const auto& [k, _] : b.bytes_per_link) links.insert(k);
    auto get = [](const std::map<std::string, std::uint64_t>& mp, const std::string& k) {
        auto it = mp.find(k);
        return it == mp.end() ? 0.0 : static_cast<double>(it->second);
    };
    for (const auto& k : links) add("bytes." + k, get(a.bytes_per_link, k), get(b.bytes_per_link, k));
    return r;
}

namespace {

std::string num(double v) {
    char buf[64];
    if (std::abs(v - std::round(v)) < 1e-9 && std::abs(v) < 1e15)
        std::snprintf(buf, sizeof buf, "%.0f", v);
    else
        std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string row(const std::string& name, const std::string& value) {
    std::string out = name;
    out.resize(std::max<std::size_t>(out.size() + 1, 40), ' ');
    return out + value + "\n";
}

}  // namespace

std::string format_metrics_table(const SimMetrics& m, std::optional<double> latency_budget) {
    std::string out = row("plan", m.plan_label) + row("seed", std::to_string(m.seed));
    out += row("total_bytes_to_cloud", std::to_string(m.total_bytes_to_cloud));
    for (const auto& [k, v] : m.bytes_per_link) out += row("  bytes " + k, std::to_string(v));
    std::string p95 = num(m.event_latency.p95);
    if (latency_budget)
        p95 += m.event_latency.p95 > *latency_budget ? "  [over budget " + num(*latency_budget) + "]"
                                                     : "  [within budget " + num(*latency_budget) + "]";
    out += row("event_latency.mean", num(m.event_latency.mean));
    out += row("event_latency.p95", p95);
    out += row("event_latency.max", num(m.event_latency.max));
    out += row("sensitive_crossings", std::to_string(m.sensitive_crossings));
    out += row("late_event_count", std::to_string(m.late_event_count));
    out += row("dropped_count", std::to_string(m.dropped_count));
    out += row("filtered_count", std::to_string(m.filtered_count));
    out += row("uncorrelated_count", std::to_string(m.uncorrelated_count));
    out += row("ambiguous_count", std::to_string(m.ambiguous_count));
    out += row("high_level_events", std::to_string(m.high_level_events));
    return out;
}

std::string format_comparison_table(const ComparisonReport& r) {
    auto cell = [](std::string s, std::size_t w) {
        s.resize(std::max(s.size() + 1, w), ' ');
        return s;
    };
    std::string out = cell("metric", 40) + cell(r.label_a, 18) + cell(r.label_b, 18) + cell("delta", 18) + "ratio\n";
    for (const auto& [name, d] : r.metrics) {
        out += cell(name, 40) + cell(num(d.a), 18) + cell(num(d.b), 18) + cell(num(d.delta), 18) +
               (d.ratio ? num(*d.ratio) : std::string("-")) + "\n";
    }
    return out;
}

}  // namespace conductor
