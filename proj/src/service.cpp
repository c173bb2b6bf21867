#include "conductor/service.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "conductor/error.hpp"
#include "conductor/fixtures.hpp"
#include "conductor/simulator.hpp"

namespace conductor {

namespace {

const std::regex kSessionPath(R"(^/api/session/([A-Za-z0-9_.-]{1,64})(/(answers|plan|run|compare))?$)");

ApiResponse ok(json body) { return {200, std::move(body)}; }

ApiResponse conflict_response(const UnresolvedConflict& e) {
    json conflicts = json::array(), hints = json::array(), ids = json::array();
    std::set<HintKind> seen;
    for (const auto& v : e.conflicts()) {
        conflicts.push_back(verdict_to_json(v));
        for (const auto& h : v.resolution_hints)
            if (seen.insert(h.kind).second) hints.push_back(hint_to_json(h));
        for (const auto& q : v.centralized) ids.push_back(q);
        for (const auto& q : v.decentralized) ids.push_back(q);
    }
    json body = error_body(e.code(), e.what());
    body["conflicts"] = conflicts;
    body["hints"] = hints;
    body["question_ids"] = ids;
    return {409, std::move(body)};
}

ApiResponse capacity_response(const InsufficientCapacity& e) {
    json body = error_body(e.code(), e.what());
    body["phase"] = to_string(e.phase());
    body["demand"] = e.demand();
    body["hints"] = json::array({hint_to_json(e.hint())});
    return {409, std::move(body)};
}

template <class F>
ApiResponse guarded(F&& f) {
    try {
        return f();
    } catch (const UnresolvedConflict& e) {
        return conflict_response(e);
    } catch (const InsufficientCapacity& e) {
        return capacity_response(e);
    } catch (const UnknownFixture& e) {
        return {404, error_body(e.code(), e.what())};
    } catch (const SeedMismatch& e) {
        return {409, error_body(e.code(), e.what())};
    } catch (const Error& e) {
        return {400, error_body(e.code(), e.what())};
    } catch (const std::exception& e) {
        return {500, error_body("InternalError", e.what())};
    }
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    return parse_json_text(body);
}

}  // namespace

json error_body(const std::string& code, const std::string& message) {
    return {{"error", code}, {"message", message}};
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {}

std::string Service::fixture(const std::string& name) const {
    if (name.find('/') != std::string::npos || name.find("..") != std::string::npos)
        throw UnknownFixture("unknown fixture '" + name + "'");
    if (options_.fixtures_dir) {
        auto path = *options_.fixtures_dir / (name.ends_with(".json") ? name : name + ".json");
        if (std::filesystem::is_regular_file(path)) {
            std::ifstream in(path, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }
    }
    return fixture_text(name);
}

json Service::resolve(const json& value, const std::string& fallback_fixture) const {
    if (value.is_null()) return parse_json_text(fixture(fallback_fixture));
    if (value.is_string()) return parse_json_text(fixture(value.get<std::string>()));
    return value;
}

std::shared_ptr<Service::Session> Service::find(const std::string& session_id) {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(session_id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<Service::Session> Service::find_or_create(const std::string& session_id) {
    std::lock_guard lock(sessions_mutex_);
    auto& s = sessions_[session_id];
    if (!s) {
        s = std::make_shared<Session>();
        s->state.session_id = session_id;
    }
    return s;
}

std::optional<SessionState> Service::snapshot(const std::string& session_id) {
    auto s = find(session_id);
    if (!s) return std::nullopt;
    std::lock_guard lock(s->mutex);
    return s->state;
}

ApiResponse Service::get_catalog() const { return ok(catalog_to_json(catalog())); }

ApiResponse Service::get_fixtures() const {
    return guarded([&] {
        json out = json::object();
        out["assessment"] = parse_json_text(fixture("integreatdrones.assessment"));
        out["topology"] = parse_json_text(fixture("port_topology"));
        out["rules"] = parse_json_text(fixture("port_rules"));
        out["scenario"] = parse_json_text(fixture("port_scenario"));
        out["demands"] = parse_json_text(fixture("port_demands"));
        out["pipeline"] = parse_json_text(fixture("port_pipeline"));
        return ok(std::move(out));
    });
}

ApiResponse Service::put_answers(const std::string& session_id, const std::string& body) {
    return guarded([&] {
        // Parse before touching the session so a bad body leaves no trace.
        Assessment a = assessment_from_json(parse_body(body));
        auto verdicts = decide_all(a);
        auto s = find_or_create(session_id);
        std::lock_guard lock(s->mutex);
        s->state.assessment = std::move(a);
        s->state.verdicts = verdicts;
        s->state.plan.reset();
        return ok({{"session_id", session_id}, {"verdicts", verdicts_to_json(verdicts)}});
    });
}

ApiResponse Service::post_plan(const std::string& session_id, const std::string& body) {
    return guarded([&]() -> ApiResponse {
        auto s = find(session_id);
        if (!s) return {404, error_body("UnknownSession", "unknown session '" + session_id + "'")};
        const json req = parse_body(body);
        const Topology topo = topology_from_json(resolve(req.value("topology", json()), "port_topology"));
        const StageDemands demands = demands_from_json(resolve(req.value("demands", json()), "port_demands"));
        PipelineSettings settings = settings_from_json(resolve(req.value("settings", json()), "port_pipeline"));
        settings.rules = rules_from_json(resolve(req.value("rules", json()), "port_rules"));

        std::lock_guard lock(s->mutex);
        PlacementPlan plan = plan_from_verdicts(s->state.verdicts, topo, demands, std::move(settings));
        s->state.plan = plan;
        return ok(plan_to_json(plan));
    });
}

ApiResponse Service::post_run(const std::string& session_id, const std::string& body) {
    return guarded([&]() -> ApiResponse {
        auto s = find(session_id);
        if (!s) return {404, error_body("UnknownSession", "unknown session '" + session_id + "'")};
        const json req = parse_body(body);
        const ScenarioConfig config = scenario_from_json(resolve(req.value("scenario", json()), "port_scenario"));
        const Topology topo = topology_from_json(resolve(req.value("topology", json()), "port_topology"));
        const std::string variant = req.value("plan", std::string("derived"));
        if (variant != "derived" && variant != "all-cloud")
            return {400, error_body("ParseError", "plan must be \"derived\" or \"all-cloud\"")};

        PlacementPlan plan;
        {
            std::lock_guard lock(s->mutex);
            if (variant == "derived") {
                if (!s->state.plan) {
                    PipelineSettings settings = settings_from_json(parse_json_text(fixture("port_pipeline")));
                    settings.rules = rules_from_json(parse_json_text(fixture("port_rules")));
                    const StageDemands demands = demands_from_json(parse_json_text(fixture("port_demands")));
                    s->state.plan = plan_from_verdicts(s->state.verdicts, topo, demands, std::move(settings));
                }
                plan = *s->state.plan;
            } else {
                PipelineSettings settings = s->state.plan ? s->state.plan->settings : [&] {
                    PipelineSettings d = settings_from_json(parse_json_text(fixture("port_pipeline")));
                    d.rules = rules_from_json(parse_json_text(fixture("port_rules")));
                    return d;
                }();
                plan = all_cloud_plan(topo, std::move(settings));
            }
        }
        // The run itself works on copies; other requests to this session proceed meanwhile.
        const GeneratedScenario scenario = generate_scenario(config, topo);
        RunResult result = run(plan, scenario, topo);

        std::lock_guard lock(s->mutex);
        s->state.runs.push_back(result.metrics);
        while (s->state.runs.size() > options_.retained_runs) s->state.runs.pop_front();
        return ok(metrics_to_json(result.metrics));
    });
}

ApiResponse Service::get_compare(const std::string& session_id) {
    return guarded([&]() -> ApiResponse {
        auto s = find(session_id);
        if (!s) return {404, error_body("UnknownSession", "unknown session '" + session_id + "'")};
        std::lock_guard lock(s->mutex);
        if (s->state.runs.size() < 2)
            return {409, error_body("NotEnoughRuns", "compare needs two runs, session has " +
                                                         std::to_string(s->state.runs.size()))};
        const auto& runs = s->state.runs;
        return ok(comparison_to_json(compare(runs[runs.size() - 2], runs.back())));
    });
}

ApiResponse Service::get_session(const std::string& session_id) {
    auto state = snapshot(session_id);
    if (!state) return {404, error_body("UnknownSession", "unknown session '" + session_id + "'")};
    json runs = json::array();
    for (const auto& m : state->runs) runs.push_back(metrics_to_json(m));
    return ok({{"session_id", state->session_id},
               {"assessment", assessment_to_json(state->assessment)},
               {"verdicts", verdicts_to_json(state->verdicts)},
               {"plan", state->plan ? plan_to_json(*state->plan) : json(nullptr)},
               {"runs", runs}});
}

ApiResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
    auto not_allowed = [&] { return ApiResponse{405, error_body("MethodNotAllowed", method + " " + path)}; };
    if (path == "/api/catalog") return method == "GET" ? get_catalog() : not_allowed();
    if (path == "/api/fixtures") return method == "GET" ? get_fixtures() : not_allowed();

    std::smatch m;
    if (!std::regex_match(path, m, kSessionPath)) return {404, error_body("NotFound", "no route for " + path)};
    const std::string id = m[1];
    const std::string action = m[3];
    if (action.empty()) return method == "GET" ? get_session(id) : not_allowed();
    if (action == "answers") return method == "PUT" ? put_answers(id, body) : not_allowed();
    if (action == "plan") return method == "POST" ? post_plan(id, body) : not_allowed();
    if (action == "run") return method == "POST" ? post_run(id, body) : not_allowed();
    return method == "GET" ? get_compare(id) : not_allowed();
}

}  // namespace conductor
