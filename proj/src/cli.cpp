#include "conductor/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "conductor/error.hpp"
#include "conductor/fixtures.hpp"
#include "conductor/json_io.hpp"
#include "conductor/server.hpp"
#include "conductor/service.hpp"
#include "conductor/simulator.hpp"

namespace conductor {

namespace {

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s + " ";
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
    return out.empty() ? "-" : out;
}

/// Assessment from either answer format. Boolean answers go through `polarity`.
Assessment load_assessment(const std::string& path, const std::string& polarity_path) {
    const json j = read_json_file(path);
    if (j.is_object() && j.contains("answers") && j.at("answers").is_object()) {
        const PolarityTable table = polarity_path.empty() ? default_polarity() : polarity_from_json(read_json_file(polarity_path));
        TieBreak tb = TieBreak::PreferDecentralized;
        if (auto it = j.find("tie_break"); it != j.end()) {
            auto t = parse_tie_break(it->get<std::string>());
            if (!t) throw ParseError("unknown tie_break '" + it->get<std::string>() + "'");
            tb = *t;
        }
        return answers_from_booleans(booleans_from_json(j), table, tb);
    }
    return assessment_from_json(j);
}

void apply_tie_break(Assessment& a, const std::string& flag) {
    if (flag.empty()) return;
    auto t = parse_tie_break(flag);
    if (!t) throw ParseError("--tie-break must be central or decentral");
    a.set_tie_break(*t);
}

void report_conflicts(const std::vector<PhaseVerdict>& conflicts, std::ostream& err) {
    for (const auto& v : conflicts) {
        err << "conflict in " << to_string(v.phase) << ": centralized critical " << join(v.centralized)
            << " vs decentralized critical " << join(v.decentralized) << "\n";
        for (const auto& h : v.resolution_hints) err << "  hint [" << to_string(h.kind) << "] " << h.text << "\n";
    }
}

std::string format_plan_table(const PlacementPlan& p) {
    std::string out = pad("phase", 15) + pad("tier", 6) + "hosts\n";
    for (const auto& [phase, tier] : p.assignment) {
        std::vector<std::string> hosts;
        if (auto it = p.nodes.find(phase); it != p.nodes.end())
            for (const auto& [_, h] : it->second)
                if (std::find(hosts.begin(), hosts.end(), h) == hosts.end()) hosts.push_back(h);
        out += pad(std::string(to_string(phase)), 15) + pad(std::string(to_string(tier)), 6) + join(hosts) + "\n";
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

PipelineSettings load_settings(const std::string& settings_path, const std::string& rules_path) {
    PipelineSettings s = fixture_settings();
    if (!settings_path.empty()) {
        auto rules = s.rules;
        s = settings_from_json(read_json_file(settings_path));
        if (s.rules.empty()) s.rules = std::move(rules);
    }
    if (!rules_path.empty()) s.rules = rules_from_json(read_json_file(rules_path));
    return s;
}

}  // namespace

std::string format_verdicts_table(const std::map<Phase, PhaseVerdict>& verdicts) {
    std::string out = pad("phase", 15) + pad("outcome", 25) + pad("centralized", 20) + "decentralized\n";
    for (const auto& [phase, v] : verdicts)
        out += pad(std::string(to_string(phase)), 15) + pad(std::string(to_string(v.outcome)), 25) +
               pad(join(v.centralized), 20) + join(v.decentralized) + "\n";
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"conduct: placement decisions for process mining on the edge-cloud continuum", "conduct"};
    app.require_subcommand(1);

    std::string answers, tie_break, polarity, topology, demands, plan_out, settings, rules;
    bool as_json = false, all_cloud = false;

    auto* assess = app.add_subcommand("assess", "Per-phase verdicts for an answer file");
    assess->add_option("--answers", answers, "Assessment or yes/no answer file")->required();
    assess->add_option("--tie-break", tie_break, "central | decentral");
    assess->add_option("--polarity", polarity, "Polarity table for yes/no answers");
    assess->add_flag("--json", as_json, "Print verdicts as JSON");

    auto* plan = app.add_subcommand("plan", "Derive a placement plan");
    auto* all_cloud_flag = plan->add_flag("--all-cloud", all_cloud, "Every phase on the cloud; ignores answers");
    plan->add_option("--answers", answers)->excludes(all_cloud_flag);
    plan->add_option("--topology", topology)->required();
    plan->add_option("--demands", demands)->excludes(all_cloud_flag);
    plan->add_option("--out", plan_out)->required();
    plan->add_option("--tie-break", tie_break);
    plan->add_option("--polarity", polarity);
    plan->add_option("--settings", settings, "Pipeline settings (default: shipped port settings)");
    plan->add_option("--rules", rules, "Fusion rules (default: shipped port rules)");

    std::string plan_in, scenario, metrics_out, log_out, readings_out;
    std::optional<double> latency_budget;
    auto* simulate = app.add_subcommand("simulate", "Run a plan on a generated scenario");
    simulate->add_option("--plan", plan_in)->required();
    simulate->add_option("--scenario", scenario)->required();
    simulate->add_option("--topology", topology)->required();
    simulate->add_option("--out-metrics", metrics_out)->required();
    simulate->add_option("--out-log", log_out)->required();
    simulate->add_option("--out-readings", readings_out, "Also write the generated readings");
    simulate->add_option("--latency-budget", latency_budget, "Seconds; marks the latency rows");

    std::string metrics_a, metrics_b, compare_out;
    auto* cmp = app.add_subcommand("compare", "Delta table of two metric files");
    cmp->add_option("--a", metrics_a)->required();
    cmp->add_option("--b", metrics_b)->required();
    cmp->add_option("--out", compare_out, "Also write the report as JSON");

    std::string log_in, dot_out;
    std::uint64_t min_edge_count = 1;
    auto* discover = app.add_subcommand("discover", "Footprint, net and fitness of an event log");
    discover->add_option("--log", log_in)->required();
    discover->add_option("--min-edge-count", min_edge_count);
    discover->add_option("--dot", dot_out, "Write the discovered net as Graphviz");

    std::string install_dir;
    auto* fixtures = app.add_subcommand("fixtures", "Shipped fixtures");
    fixtures->require_subcommand(1);
    auto* install = fixtures->add_subcommand("install", "Write all fixtures into DIR");
    install->add_option("dir", install_dir)->required();
    auto* list = fixtures->add_subcommand("list", "List fixture names");

    std::string host = "127.0.0.1", fixtures_dir, static_dir;
    std::optional<int> port;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API (port from CONDUCT_PORT, default 8787)");
    serve_cmd->add_option("--port", port);
    serve_cmd->add_option("--host", host);
    serve_cmd->add_option("--fixtures-dir", fixtures_dir);
    serve_cmd->add_option("--static-dir", static_dir, "Directory served at /");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (*plan && !all_cloud) {
            if (answers.empty()) throw CLI::RequiredError("--answers");
            if (demands.empty()) throw CLI::RequiredError("--demands");
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*assess) {
            Assessment a = load_assessment(answers, polarity);
            apply_tie_break(a, tie_break);
            const auto verdicts = decide_all(a);
            out << (as_json ? dump_json(verdicts_to_json(verdicts)) : format_verdicts_table(verdicts));
            std::vector<PhaseVerdict> conflicts;
            for (const auto& [_, v] : verdicts)
                if (v.outcome == Outcome::Conflict) conflicts.push_back(v);
            report_conflicts(conflicts, err);
            return conflicts.empty() ? 0 : 2;
        }
        if (*plan && all_cloud) {
            PlacementPlan p =
                all_cloud_plan(topology_from_json(read_json_file(topology)), load_settings(settings, rules));
            write_json_file(plan_out, plan_to_json(p));
            out << format_plan_table(p);
            return 0;
        }
        if (*plan) {
            Assessment a = load_assessment(answers, polarity);
            apply_tie_break(a, tie_break);
            const Topology topo = topology_from_json(read_json_file(topology));
            const StageDemands d = demands_from_json(read_json_file(demands));
            try {
                PlacementPlan p = plan_from_verdicts(decide_all(a), topo, d, load_settings(settings, rules));
                write_json_file(plan_out, plan_to_json(p));
                out << format_plan_table(p);
            } catch (const UnresolvedConflict& e) {
                err << "error: " << e.what() << "\n";
                report_conflicts(e.conflicts(), err);
                return 2;
            } catch (const InsufficientCapacity& e) {
                err << "error: " << e.what() << "\n";
                err << "  hint [" << to_string(e.hint().kind) << "] " << e.hint().text << "\n";
                return 2;
            }
            return 0;
        }
        if (*simulate) {
            const PlacementPlan p = plan_from_json(read_json_file(plan_in));
            const ScenarioConfig config = scenario_from_json(read_json_file(scenario));
            const Topology topo = topology_from_json(read_json_file(topology));
            const GeneratedScenario sc = generate_scenario(config, topo);
            const RunResult r = run(p, sc, topo);
            write_json_file(metrics_out, metrics_to_json(r.metrics));
            write_log(r.log, log_out);
            if (!readings_out.empty()) write_readings(sc.readings, readings_out, false);
            out << format_metrics_table(r.metrics, latency_budget);
            return 0;
        }
        if (*cmp) {
            const ComparisonReport report =
                compare(metrics_from_json(read_json_file(metrics_a)), metrics_from_json(read_json_file(metrics_b)));
            if (!compare_out.empty()) write_json_file(compare_out, comparison_to_json(report));
            out << format_comparison_table(report);
            return 0;
        }
        if (*discover) {
            const EventLog log = read_log(log_in);
            const DirectlyFollowsGraph dfg = dfg_from_log(log);
            const FootprintMatrix fp = footprint(dfg, min_edge_count);
            out << format_footprint(fp);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f", fitness(log, fp));
            out << "cases " << log.case_count() << "  events " << log.event_count() << "  fitness " << buf << "\n";
            if (!dot_out.empty()) write_text(dot_out, to_dot(alpha_net(fp, dfg)));
            return 0;
        }
        if (*install) {
            for (const auto& path : install_fixtures(install_dir)) out << path.string() << "\n";
            return 0;
        }
        if (*list) {
            for (const auto& [name, _] : fixture_files()) out << name << "\n";
            return 0;
        }
        if (*serve_cmd) {
            ServiceOptions so;
            if (!fixtures_dir.empty()) so.fixtures_dir = fixtures_dir;
            Service service(so);
            ServerOptions opts;
            opts.host = host;
            opts.port = port ? *port : port_from_env();
            if (!static_dir.empty()) opts.static_dir = static_dir;
            err << "listening on http://" << opts.host << ":" << opts.port << "\n";
            serve(service, opts);
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.code() << ": " << e.what() << "\n";
        return e.is_domain() ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace conductor
