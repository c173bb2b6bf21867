#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "conductor/error.hpp"
#include "conductor/fixtures.hpp"
#include "conductor/json_io.hpp"
#include "conductor/placement.hpp"
#include "conductor/scenario.hpp"
#include "conductor/service.hpp"
#include "conductor/simulator.hpp"

namespace py = pybind11;
using namespace conductor;

namespace {

// JSON text in, JSON text out; the Python side decodes.

json or_fixture(const std::optional<std::string>& text, const char* fixture) {
    return parse_json_text(text ? *text : fixture_text(fixture));
}

Assessment assessment_from_text(const std::string& text, const std::optional<std::string>& tie_break) {
    const json j = parse_json_text(text);
    Assessment a;
    // Yes/no answers are an object of booleans without an "answers" list.
    const bool booleans = j.is_object() && !(j.contains("answers") && j["answers"].is_array()) &&
                          !j.contains("tie_break");
    if (booleans)
        a = answers_from_booleans(booleans_from_json(j), default_polarity());
    else
        a = assessment_from_json(j);
    if (tie_break) {
        auto t = parse_tie_break(*tie_break);
        if (!t) throw InvalidConfig("tie_break must be central or decentral");
        a.set_tie_break(*t);
    }
    return a;
}

std::string assess(const std::string& answers, const std::optional<std::string>& tie_break) {
    return verdicts_to_json(decide_all(assessment_from_text(answers, tie_break))).dump();
}

std::string plan(const std::string& answers, const std::optional<std::string>& topology,
                 const std::optional<std::string>& demands, const std::optional<std::string>& settings,
                 const std::optional<std::string>& rules, const std::optional<std::string>& tie_break) {
    PipelineSettings s = settings_from_json(or_fixture(settings, "port_pipeline"));
    s.rules = rules_from_json(or_fixture(rules, "port_rules"));
    const auto p = plan_from_verdicts(decide_all(assessment_from_text(answers, tie_break)),
                                      topology_from_json(or_fixture(topology, "port_topology")),
                                      demands_from_json(or_fixture(demands, "port_demands")), std::move(s));
    return plan_to_json(p).dump();
}

std::string all_cloud(const std::optional<std::string>& topology, const std::optional<std::string>& settings,
                      const std::optional<std::string>& rules) {
    PipelineSettings s = settings_from_json(or_fixture(settings, "port_pipeline"));
    s.rules = rules_from_json(or_fixture(rules, "port_rules"));
    return plan_to_json(all_cloud_plan(topology_from_json(or_fixture(topology, "port_topology")), std::move(s))).dump();
}

py::dict simulate(const std::string& plan_text, const std::optional<std::string>& scenario,
                  const std::optional<std::string>& topology) {
    const Topology topo = topology_from_json(or_fixture(topology, "port_topology"));
    const ScenarioConfig config = scenario_from_json(or_fixture(scenario, "port_scenario"));
    const PlacementPlan p = plan_from_json(parse_json_text(plan_text));
    RunResult r;
    {
        py::gil_scoped_release release;
        r = run(p, generate_scenario(config, topo), topo);
    }
    py::dict out;
    out["metrics"] = metrics_to_json(r.metrics).dump();
    out["log"] = format_log(r.log);
    out["footprint"] = format_footprint(r.footprint);
    out["kpis"] = kpis_to_json(r.kpis).dump();
    return out;
}

std::string compare_metrics(const std::string& a, const std::string& b) {
    return comparison_to_json(compare(metrics_from_json(parse_json_text(a)), metrics_from_json(parse_json_text(b))))
        .dump();
}

py::dict discover(const std::string& log_text, std::uint64_t min_edge_count) {
    const EventLog log = parse_log_text(log_text);
    const auto dfg = dfg_from_log(log);
    const auto fp = footprint(dfg, min_edge_count);
    py::dict out;
    out["footprint"] = format_footprint(fp);
    out["fitness"] = fitness(log, fp);
    out["cases"] = log.case_count();
    out["events"] = log.event_count();
    py::list places;
    if (!dfg.empty()) {
        for (const auto& pl : alpha_net(fp, dfg).places)
            places.append(py::make_tuple(std::vector<std::string>(pl.inputs.begin(), pl.inputs.end()),
                                         std::vector<std::string>(pl.outputs.begin(), pl.outputs.end())));
    }
    out["places"] = places;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    static py::exception<Error> conductor_error(m, "ConductorError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = conductor_error;
            PyErr_SetObject(err.ptr(), py::make_tuple(e.code(), e.what()).ptr());
        }
    });

    m.def("catalog", [] { return catalog_to_json(catalog()).dump(); });
    m.def("fixture", [](const std::string& name) { return fixture_text(name); }, py::arg("name"));
    m.def("fixture_names", [] {
        std::vector<std::string> names;
        for (const auto& [n, _] : fixture_files()) names.push_back(n);
        return names;
    });
    m.def("assess", &assess, py::arg("answers"), py::arg("tie_break") = py::none());
    m.def("plan", &plan, py::arg("answers"), py::arg("topology") = py::none(), py::arg("demands") = py::none(),
          py::arg("settings") = py::none(), py::arg("rules") = py::none(), py::arg("tie_break") = py::none());
    m.def("all_cloud_plan", &all_cloud, py::arg("topology") = py::none(), py::arg("settings") = py::none(),
          py::arg("rules") = py::none());
    m.def("simulate", &simulate, py::arg("plan"), py::arg("scenario") = py::none(), py::arg("topology") = py::none());
    m.def("compare", &compare_metrics, py::arg("a"), py::arg("b"));
    m.def("discover", &discover, py::arg("log"), py::arg("min_edge_count") = 1);

    py::class_<Service>(m, "Service")
        .def(py::init([](std::optional<std::string> fixtures_dir) {
                 ServiceOptions o;
                 if (fixtures_dir) o.fixtures_dir = *fixtures_dir;
                 return std::make_unique<Service>(o);
             }),
             py::arg("fixtures_dir") = py::none())
        .def(
            "handle",
            [](Service& s, const std::string& method, const std::string& path, const std::string& body) {
                ApiResponse r;
                {
                    py::gil_scoped_release release;
                    r = s.handle(method, path, body);
                }
                return py::make_tuple(r.status, r.body.dump());
            },
            py::arg("method"), py::arg("path"), py::arg("body") = "");
}
