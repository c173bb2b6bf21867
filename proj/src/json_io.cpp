#include "conductor/json_io.hpp"

#include <fstream>
#include <sstream>

#include "conductor/error.hpp"

namespace conductor {

namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

template <class Enum, class Parser>
Enum parse_enum(const json& j, Parser parse, const char* what) {
    const auto s = j.get<std::string>();
    auto v = parse(s);
    if (!v) throw ParseError(std::string("unknown ") + what + " '" + s + "'");
    return *v;
}

Phase phase_of(const json& j) { return parse_enum<Phase>(j, [](std::string_view s) { return parse_phase(s); }, "phase"); }
Tier tier_of(const json& j) { return parse_enum<Tier>(j, [](std::string_view s) { return parse_tier(s); }, "tier"); }
Verdict verdict_of(const json& j) {
    return parse_enum<Verdict>(j, [](std::string_view s) { return parse_verdict(s); }, "verdict");
}

template <class T>
T value_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->template get<T>();
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
}

std::string dump_json(const json& value) { return value.dump(2) + "\n"; }

void write_json_file(const std::filesystem::path& path, const json& value) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << dump_json(value);
    if (!out) throw IoError("write failed for " + path.string());
}

json catalog_to_json(const std::vector<Question>& questions) {
    json arr = json::array();
    for (const auto& q : questions) {
        json tags = json::array();
        for (Tag t : q.tags) tags.push_back(tag_code(t));
        arr.push_back({{"id", q.id}, {"phase", to_string(q.phase)}, {"text", q.text}, {"tags", tags}});
    }
    return arr;
}

std::vector<Question> catalog_from_json(const json& j) {
    return guarded("catalog", [&] {
        std::vector<Question> out;
        for (const auto& e : j) {
            Question q{e.at("id").get<std::string>(), phase_of(e.at("phase")), e.at("text").get<std::string>(), {}};
            for (const auto& t : e.at("tags")) {
                auto tag = parse_tag(t.get<std::string>());
                if (!tag) throw ParseError("unknown tag '" + t.get<std::string>() + "'");
                q.tags.push_back(*tag);
            }
            out.push_back(std::move(q));
        }
        return out;
    });
}

json polarity_to_json(const PolarityTable& table) {
    json arr = json::array();
    // Catalog order reads better than map order.
    for (const auto& q : catalog()) {
        auto it = table.find(q.id);
        if (it == table.end()) continue;
        arr.push_back({{"id", q.id}, {"if_yes", to_string(it->second.if_yes)}, {"if_no", to_string(it->second.if_no)}});
    }
    for (const auto& [id, p] : table)
        if (!find_question(id))
            arr.push_back({{"id", id}, {"if_yes", to_string(p.if_yes)}, {"if_no", to_string(p.if_no)}});
    return arr;
}

PolarityTable polarity_from_json(const json& j) {
    return guarded("polarity", [&] {
        PolarityTable out;
        for (const auto& e : j)
            out[e.at("id").get<std::string>()] = Polarity{verdict_of(e.at("if_yes")), verdict_of(e.at("if_no"))};
        return out;
    });
}

json answer_to_json(const Answer& a) {
    json j = {{"question_id", a.question_id}, {"verdict", to_string(a.verdict)}};
    if (a.note) j["note"] = *a.note;
    return j;
}

Answer answer_from_json(const json& j) {
    return guarded("answer", [&] {
        Answer a{j.at("question_id").get<std::string>(), verdict_of(j.at("verdict")), std::nullopt};
        if (auto it = j.find("note"); it != j.end() && !it->is_null()) a.note = it->get<std::string>();
        return a;
    });
}

Assessment assessment_from_json(const json& j) {
    return guarded("assessment", [&] {
        Assessment out;
        const json* answers = &j;
        if (j.is_object()) {
            if (auto it = j.find("tie_break"); it != j.end()) {
                auto t = parse_tie_break(it->get<std::string>());
                if (!t) throw ParseError("unknown tie_break '" + it->get<std::string>() + "'");
                out.set_tie_break(*t);
            }
            answers = &j.at("answers");
        }
        if (!answers->is_array()) throw ParseError("answers must be a list");
        std::set<std::string> seen;
        for (const auto& e : *answers) {
            Answer a = answer_from_json(e);
            if (!seen.insert(a.question_id).second) throw ParseError("duplicate answer for " + a.question_id);
            out.set(std::move(a));
        }
        return out;
    });
}

json assessment_to_json(const Assessment& a) {
    json answers = json::array();
    for (const auto& q : catalog())
        if (const Answer* ans = a.find(q.id)) answers.push_back(answer_to_json(*ans));
    return {{"tie_break", to_string(a.tie_break())}, {"answers", answers}};
}

std::map<std::string, bool> booleans_from_json(const json& j) {
    return guarded("boolean answers", [&] {
        const json& obj = j.contains("answers") ? j.at("answers") : j;
        std::map<std::string, bool> out;
        for (const auto& [k, v] : obj.items()) out[k] = v.get<bool>();
        return out;
    });
}

json hint_to_json(const ResolutionHint& h) { return {{"kind", to_string(h.kind)}, {"text", h.text}}; }

json verdict_to_json(const PhaseVerdict& v) {
    json hints = json::array();
    for (const auto& h : v.resolution_hints) hints.push_back(hint_to_json(h));
    return {{"phase", to_string(v.phase)},
            {"outcome", to_string(v.outcome)},
            {"centralized", v.centralized},
            {"decentralized", v.decentralized},
            {"resolution_hints", hints}};
}

json verdicts_to_json(const std::map<Phase, PhaseVerdict>& verdicts) {
    json arr = json::array();
    for (const auto& [_, v] : verdicts) arr.push_back(verdict_to_json(v));
    return arr;
}

std::map<Phase, PhaseVerdict> verdicts_from_json(const json& j) {
    return guarded("verdicts", [&] {
        std::map<Phase, PhaseVerdict> out;
        for (const auto& e : j) {
            PhaseVerdict v;
            v.phase = phase_of(e.at("phase"));
            v.outcome = parse_enum<Outcome>(e.at("outcome"), [](std::string_view s) { return parse_outcome(s); }, "outcome");
            v.centralized = value_or(e, "centralized", std::vector<std::string>{});
            v.decentralized = value_or(e, "decentralized", std::vector<std::string>{});
            if (auto it = e.find("resolution_hints"); it != e.end()) {
                for (const auto& h : *it) {
                    const auto kind = h.at("kind").get<std::string>();
                    if (kind == to_string(HintKind::StrongerEdgeHardware))
                        v.resolution_hints.push_back(make_hint(HintKind::StrongerEdgeHardware));
                    else if (kind == to_string(HintKind::NewAlgorithmPrivacyUtility))
                        v.resolution_hints.push_back(make_hint(HintKind::NewAlgorithmPrivacyUtility));
                    else
                        throw ParseError("unknown hint kind '" + kind + "'");
                }
            }
            out[v.phase] = std::move(v);
        }
        return out;
    });
}

json topology_to_json(const Topology& t) {
    json nodes = json::array(), links = json::array(), zones = json::array();
    for (const auto& n : t.nodes()) {
        json e = {{"node_id", n.node_id}, {"tier", to_string(n.tier)}, {"compute_capacity", n.compute_capacity}};
        e["parent"] = n.parent ? json(*n.parent) : json(nullptr);
        e["trust_zone"] = n.trust_zone;
        e["clock_skew"] = n.clock_skew;
        nodes.push_back(std::move(e));
    }
    for (const auto& l : t.links())
        links.push_back({{"child", l.child},
                         {"parent", l.parent},
                         {"bandwidth", l.bandwidth},
                         {"latency", l.latency},
                         {"reliable", l.reliable}});
    for (const auto& z : t.zones()) zones.push_back({{"zone_id", z.zone_id}, {"member_nodes", z.member_nodes}});
    return {{"nodes", nodes}, {"links", links}, {"zones", zones}};
}

Topology topology_from_json(const json& j) {
    return guarded("topology", [&] {
        std::vector<NodeSpec> nodes;
        std::vector<LinkSpec> links;
        std::vector<TrustZone> zones;
        for (const auto& e : j.at("nodes")) {
            NodeSpec n;
            n.node_id = e.at("node_id").get<std::string>();
            n.tier = tier_of(e.at("tier"));
            n.compute_capacity = e.at("compute_capacity").get<double>();
            if (auto it = e.find("parent"); it != e.end() && !it->is_null()) n.parent = it->get<std::string>();
            n.trust_zone = e.at("trust_zone").get<std::string>();
            n.clock_skew = value_or(e, "clock_skew", 0.0);
            nodes.push_back(std::move(n));
        }
        for (const auto& e : j.value("links", json::array()))
            links.push_back({e.at("child").get<std::string>(), e.at("parent").get<std::string>(),
                             e.at("bandwidth").get<double>(), value_or(e, "latency", 0.0),
                             value_or(e, "reliable", true)});
        for (const auto& e : j.value("zones", json::array()))
            zones.push_back({e.at("zone_id").get<std::string>(), e.at("member_nodes").get<std::vector<std::string>>()});
        Topology t = Topology::build(std::move(nodes), std::move(links), std::move(zones));
        if (auto v = validate(t); !v.empty()) {
            std::string msg = "invalid topology:";
            for (const auto& x : v) msg += " " + std::string(to_string(x.kind)) + "(" + x.detail + ")";
            throw InvalidTopology(msg);
        }
        return t;
    });
}

json rule_to_json(const FusionRule& r) {
    json guard = json::object();
    for (const auto& [k, v] : r.context_guard) guard[k] = v;
    return {{"rule_id", r.rule_id},
            {"input_labels", std::vector<std::string>(r.input_labels.begin(), r.input_labels.end())},
            {"window", r.window},
            {"min_sources", r.min_sources},
            {"output_activity", r.output_activity},
            {"context_guard", guard}};
}

FusionRule rule_from_json(const json& j) {
    return guarded("fusion rule", [&] {
        FusionRule r;
        r.rule_id = j.at("rule_id").get<std::string>();
        for (const auto& l : j.at("input_labels")) r.input_labels.insert(l.get<std::string>());
        r.window = j.at("window").get<double>();
        r.min_sources = j.at("min_sources").get<int>();
        r.output_activity = j.at("output_activity").get<std::string>();
        if (auto it = j.find("context_guard"); it != j.end() && !it->is_null())
            for (const auto& [k, v] : it->items()) r.context_guard[k] = v.get<std::string>();
        if (!(r.window > 0) || r.min_sources < 1) throw ParseError("rule " + r.rule_id + ": bad window or min_sources");
        return r;
    });
}

std::vector<FusionRule> rules_from_json(const json& j) {
    return guarded("fusion rules", [&] {
        const json& arr = j.is_object() ? j.at("rules") : j;
        std::vector<FusionRule> out;
        for (const auto& e : arr) out.push_back(rule_from_json(e));
        return out;
    });
}

json rules_to_json(const std::vector<FusionRule>& rules) {
    json arr = json::array();
    for (const auto& r : rules) arr.push_back(rule_to_json(r));
    return {{"rules", arr}};
}

json settings_to_json(const PipelineSettings& s) {
    json durations = json::object();
    for (const auto& [a, d] : s.activity_durations) durations[a] = d;
    return {{"preprocess",
             {{"anonymize", s.preprocess.anonymize},
              {"filter_min_confidence", s.preprocess.filter_min_confidence},
              {"reduction_ratio", s.preprocess.reduction_ratio},
              {"per_reading_cost", s.preprocess.per_reading_cost}}},
            {"rules", rules_to_json(s.rules).at("rules")},
            {"fusion_cost_per_event", s.fusion_cost_per_event},
            {"watermark", s.watermark},
            {"late_policy", to_string(s.late_policy)},
            {"skew_correction", s.skew_correction},
            {"correlation_cost_per_event", s.correlation_cost_per_event},
            {"min_edge_count", s.min_edge_count},
            {"activity_durations", durations}};
}

PipelineSettings settings_from_json(const json& j) {
    return guarded("pipeline settings", [&] {
        PipelineSettings s;
        if (auto it = j.find("preprocess"); it != j.end()) {
            s.preprocess.anonymize = value_or(*it, "anonymize", s.preprocess.anonymize);
            s.preprocess.filter_min_confidence = value_or(*it, "filter_min_confidence", s.preprocess.filter_min_confidence);
            s.preprocess.reduction_ratio = value_or(*it, "reduction_ratio", s.preprocess.reduction_ratio);
            s.preprocess.per_reading_cost = value_or(*it, "per_reading_cost", s.preprocess.per_reading_cost);
        }
        if (auto it = j.find("rules"); it != j.end()) s.rules = rules_from_json(*it);
        s.fusion_cost_per_event = value_or(j, "fusion_cost_per_event", s.fusion_cost_per_event);
        s.watermark = value_or(j, "watermark", s.watermark);
        if (auto it = j.find("late_policy"); it != j.end())
            s.late_policy = parse_enum<LatePolicy>(*it, [](std::string_view v) { return parse_late_policy(v); }, "late_policy");
        s.skew_correction = value_or(j, "skew_correction", s.skew_correction);
        s.correlation_cost_per_event = value_or(j, "correlation_cost_per_event", s.correlation_cost_per_event);
        s.min_edge_count = value_or<std::uint64_t>(j, "min_edge_count", s.min_edge_count);
        if (auto it = j.find("activity_durations"); it != j.end())
            for (const auto& [k, v] : it->items()) s.activity_durations[k] = v.get<double>();
        s.preprocess.validate();
        return s;
    });
}

json demands_to_json(const StageDemands& d) {
    json j = json::object();
    for (const auto& [p, v] : d) j[std::string(to_string(p))] = v;
    return j;
}

StageDemands demands_from_json(const json& j) {
    return guarded("stage demands", [&] {
        StageDemands d;
        for (const auto& [k, v] : j.items()) {
            auto p = parse_phase(k);
            if (!p) throw ParseError("unknown phase '" + k + "'");
            d[*p] = v.get<double>();
        }
        return d;
    });
}

json plan_to_json(const PlacementPlan& p) {
    json assignment = json::object(), nodes = json::object();
    for (const auto& [phase, tier] : p.assignment) assignment[std::string(to_string(phase))] = to_string(tier);
    for (const auto& [phase, by_sensor] : p.nodes) {
        json m = json::object();
        for (const auto& [s, n] : by_sensor) m[s] = n;
        nodes[std::string(to_string(phase))] = m;
    }
    return {{"label", p.label}, {"assignment", assignment}, {"nodes", nodes}, {"settings", settings_to_json(p.settings)}};
}

PlacementPlan plan_from_json(const json& j) {
    return guarded("plan", [&] {
        PlacementPlan p;
        p.label = value_or<std::string>(j, "label", "derived");
        for (const auto& [k, v] : j.at("assignment").items()) {
            auto phase = parse_phase(k);
            if (!phase) throw ParseError("unknown phase '" + k + "'");
            p.assignment[*phase] = tier_of(v);
        }
        if (auto it = j.find("nodes"); it != j.end()) {
            for (const auto& [k, v] : it->items()) {
                auto phase = parse_phase(k);
                if (!phase) throw ParseError("unknown phase '" + k + "'");
                for (const auto& [s, n] : v.items()) p.nodes[*phase][s] = n.get<std::string>();
            }
        }
        p.settings = settings_from_json(j.value("settings", json::object()));
        return p;
    });
}

json scenario_to_json(const ScenarioConfig& c) {
    return {{"seed", c.seed},
            {"n_cases", c.n_cases},
            {"noise",
             {{"confusion_rate", c.noise.confusion_rate},
              {"duplicate_rate", c.noise.duplicate_rate},
              {"delay_max", c.noise.delay_max},
              {"drop_rate", c.noise.drop_rate}}},
            {"sensitive_fraction", c.sensitive_fraction},
            {"case_gap", c.case_gap},
            {"activity_step", c.activity_step},
            {"relocate_probability", c.relocate_probability},
            {"idle_frames", c.idle_frames},
            {"sensors",
             {{"gate_cameras", c.sensors.gate_cameras},
              {"plate_camera", c.sensors.plate_camera},
              {"vehicle_cameras", c.sensors.vehicle_cameras},
              {"drone_camera", c.sensors.drone_camera},
              {"sensor_box", c.sensors.sensor_box}}}};
}

ScenarioConfig scenario_from_json(const json& j) {
    return guarded("scenario", [&] {
        ScenarioConfig c;
        c.seed = value_or<std::uint64_t>(j, "seed", c.seed);
        c.n_cases = value_or<std::uint64_t>(j, "n_cases", c.n_cases);
        if (auto it = j.find("noise"); it != j.end()) {
            c.noise.confusion_rate = value_or(*it, "confusion_rate", c.noise.confusion_rate);
            c.noise.duplicate_rate = value_or(*it, "duplicate_rate", c.noise.duplicate_rate);
            c.noise.delay_max = value_or(*it, "delay_max", c.noise.delay_max);
            c.noise.drop_rate = value_or(*it, "drop_rate", c.noise.drop_rate);
        }
        c.sensitive_fraction = value_or(j, "sensitive_fraction", c.sensitive_fraction);
        c.case_gap = value_or(j, "case_gap", c.case_gap);
        c.activity_step = value_or(j, "activity_step", c.activity_step);
        c.relocate_probability = value_or(j, "relocate_probability", c.relocate_probability);
        c.idle_frames = value_or<std::uint32_t>(j, "idle_frames", c.idle_frames);
        if (auto it = j.find("sensors"); it != j.end()) {
            auto& s = c.sensors;
            s.gate_cameras = value_or(*it, "gate_cameras", s.gate_cameras);
            s.plate_camera = value_or(*it, "plate_camera", s.plate_camera);
            s.vehicle_cameras = value_or(*it, "vehicle_cameras", s.vehicle_cameras);
            s.drone_camera = value_or(*it, "drone_camera", s.drone_camera);
            s.sensor_box = value_or(*it, "sensor_box", s.sensor_box);
        }
        c.validate();
        return c;
    });
}

json metrics_to_json(const SimMetrics& m) {
    json links = json::object();
    for (const auto& [k, v] : m.bytes_per_link) links[k] = v;
    return {{"seed", m.seed},
            {"plan_label", m.plan_label},
            {"bytes_per_link", links},
            {"total_bytes_to_cloud", m.total_bytes_to_cloud},
            {"event_latency",
             {{"count", m.event_latency.count},
              {"mean", m.event_latency.mean},
              {"p95", m.event_latency.p95},
              {"max", m.event_latency.max}}},
            {"sensitive_crossings", m.sensitive_crossings},
            {"late_event_count", m.late_event_count},
            {"dropped_count", m.dropped_count},
            {"filtered_count", m.filtered_count},
            {"uncorrelated_count", m.uncorrelated_count},
            {"ambiguous_count", m.ambiguous_count},
            {"high_level_events", m.high_level_events}};
}

SimMetrics metrics_from_json(const json& j) {
    return guarded("metrics", [&] {
        SimMetrics m;
        m.seed = j.at("seed").get<std::uint64_t>();
        m.plan_label = value_or<std::string>(j, "plan_label", "");
        for (const auto& [k, v] : j.at("bytes_per_link").items()) m.bytes_per_link[k] = v.get<std::uint64_t>();
        m.total_bytes_to_cloud = j.at("total_bytes_to_cloud").get<std::uint64_t>();
        const auto& lat = j.at("event_latency");
        m.event_latency = {lat.at("count").get<std::uint64_t>(), lat.at("mean").get<double>(),
                           lat.at("p95").get<double>(), lat.at("max").get<double>()};
        m.sensitive_crossings = j.at("sensitive_crossings").get<std::uint64_t>();
        m.late_event_count = j.at("late_event_count").get<std::uint64_t>();
        m.dropped_count = j.at("dropped_count").get<std::uint64_t>();
        m.filtered_count = value_or<std::uint64_t>(j, "filtered_count", 0);
        m.uncorrelated_count = value_or<std::uint64_t>(j, "uncorrelated_count", 0);
        m.ambiguous_count = value_or<std::uint64_t>(j, "ambiguous_count", 0);
        m.high_level_events = value_or<std::uint64_t>(j, "high_level_events", 0);
        return m;
    });
}

json comparison_to_json(const ComparisonReport& r) {
    json metrics = json::object();
    for (const auto& [name, d] : r.metrics)
        metrics[name] = {{"a", d.a}, {"b", d.b}, {"delta", d.delta}, {"ratio", d.ratio ? json(*d.ratio) : json(nullptr)}};
    return {{"seed", r.seed}, {"label_a", r.label_a}, {"label_b", r.label_b}, {"metrics", metrics}};
}

json kpis_to_json(const Kpis& k) {
    auto stats = [](const std::map<std::string, DurationStats>& m) {
        json j = json::object();
        for (const auto& [a, s] : m) j[a] = {{"count", s.count}, {"mean", s.mean}, {"max", s.max}};
        return j;
    };
    double throughput_sum = 0.0, throughput_max = 0.0;
    for (const auto& [_, t] : k.throughput) {
        throughput_sum += t;
        throughput_max = std::max(throughput_max, t);
    }
    const double n = static_cast<double>(k.throughput.size());
    return {{"cases", k.throughput.size()},
            {"throughput", {{"mean", n > 0 ? throughput_sum / n : 0.0}, {"max", throughput_max}}},
            {"service", stats(k.service)},
            {"waiting", stats(k.waiting)},
            {"fitness", k.fitness}};
}

}  // namespace conductor
