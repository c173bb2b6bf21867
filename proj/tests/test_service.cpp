#include <doctest.h>
#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "conductor/error.hpp"
#include "conductor/fixtures.hpp"
#include "conductor/json_io.hpp"
#include "conductor/server.hpp"
#include "conductor/service.hpp"
#include "support.hpp"

using namespace conductor;

namespace {

const std::string kFixtureAnswers = fixture_text("integreatdrones.assessment");

// Set CONDUCTOR_UPDATE_GOLDEN=1 to rewrite the files after an intended change.
void check_golden(const std::string& name, const json& body) {
    const std::filesystem::path path = std::filesystem::path(CONDUCTOR_SOURCE_DIR) / "tests" / "golden" / name;
    const std::string text = dump_json(body);
    if (std::getenv("CONDUCTOR_UPDATE_GOLDEN")) {
        std::filesystem::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << text;
    }
    CAPTURE(name);
    REQUIRE(std::filesystem::exists(path));
    CHECK(testutil::slurp(path) == text);
}

std::string conflict_answers() {
    return R"([{"question_id":"Pre1","verdict":"centralized_critical"},
               {"question_id":"Pre2","verdict":"decentralized_critical"}])";
}

std::vector<std::string> hint_kinds(const json& body) {
    std::vector<std::string> out;
    for (const auto& h : body.at("hints")) out.push_back(h.at("kind").get<std::string>());
    return out;
}

}  // namespace

TEST_CASE("catalog endpoint") {
    Service svc;
    auto r = svc.handle("GET", "/api/catalog", "");
    CHECK(r.status == 200);
    CHECK(r.body.size() == 16);
    CHECK(r.body == catalog_to_json(catalog()));
    CHECK(svc.handle("POST", "/api/catalog", "").status == 405);
    CHECK(svc.handle("GET", "/api/nothing", "").status == 404);
    check_golden("catalog.json", r.body);
}

TEST_CASE("fixtures endpoint") {
    Service svc;
    auto r = svc.handle("GET", "/api/fixtures", "");
    REQUIRE(r.status == 200);
    for (const char* k : {"assessment", "topology", "rules", "scenario", "demands", "pipeline"}) CHECK(r.body.contains(k));
    CHECK(assessment_from_json(r.body["assessment"]) == fixture_assessment());
    CHECK(topology_from_json(r.body["topology"]) == fixture_topology());
}

TEST_CASE("fixture answers give the use-case verdicts") {
    Service svc;
    auto r = svc.handle("PUT", "/api/session/s1/answers", kFixtureAnswers);
    REQUIRE(r.status == 200);
    CHECK(r.body["session_id"] == "s1");
    CHECK(r.body["verdicts"] == verdicts_to_json(decide_all(fixture_assessment())));
    std::vector<std::string> outcomes;
    for (const auto& v : r.body["verdicts"]) outcomes.push_back(v["outcome"].get<std::string>());
    CHECK(outcomes == std::vector<std::string>{"decentralized_mandatory", "decentralized_favorable",
                                               "decentralized_favorable", "centralized_mandatory",
                                               "centralized_mandatory"});
    check_golden("fixture_answers.json", r.body);

    // Replaying the same PUT changes nothing.
    auto before = svc.snapshot("s1");
    auto again = svc.handle("PUT", "/api/session/s1/answers", kFixtureAnswers);
    CHECK(again.body == r.body);
    CHECK(svc.snapshot("s1")->assessment == before->assessment);
}

TEST_CASE("plan endpoint") {
    Service svc;
    CHECK(svc.handle("POST", "/api/session/none/plan", "").status == 404);
    svc.handle("PUT", "/api/session/s/answers", kFixtureAnswers);
    auto r = svc.handle("POST", "/api/session/s/plan", "{}");
    REQUIRE(r.status == 200);
    const auto expected = plan_from_verdicts(decide_all(fixture_assessment()), fixture_topology(), fixture_demands(),
                                             fixture_settings());
    CHECK(r.body == plan_to_json(expected));
    CHECK(r.body["assignment"]["preprocessing"] == "edge");
    check_golden("fixture_plan.json", r.body);

    auto named = svc.handle("POST", "/api/session/s/plan", R"({"topology":"port_topology","demands":{"preprocessing":1000}})");
    CHECK(named.status == 409);
    CHECK(named.body["error"] == "InsufficientCapacity");
    CHECK(hint_kinds(named.body) == std::vector<std::string>{"stronger_edge_hardware"});

    CHECK(svc.handle("POST", "/api/session/s/plan", R"({"topology":"missing"})").status == 404);
    CHECK(svc.handle("POST", "/api/session/s/plan", R"({"topology":"../etc/passwd"})").status == 404);
    CHECK(svc.handle("POST", "/api/session/s/plan", "{broken").status == 400);
    CHECK(svc.handle("GET", "/api/session/s/plan", "").status == 405);
}

TEST_CASE("conflicting answers block the plan with hints") {
    Service svc;
    auto put = svc.handle("PUT", "/api/session/c/answers", conflict_answers());
    REQUIRE(put.status == 200);
    CHECK(put.body["verdicts"][0]["outcome"] == "conflict");
    CHECK_FALSE(put.body["verdicts"][0]["resolution_hints"].empty());

    auto plan = svc.handle("POST", "/api/session/c/plan", "");
    CHECK(plan.status == 409);
    CHECK(plan.body["error"] == "UnresolvedConflict");
    const auto kinds = hint_kinds(plan.body);
    CHECK(std::find(kinds.begin(), kinds.end(), "stronger_edge_hardware") != kinds.end());
    CHECK(plan.body["question_ids"] == json::array({"Pre1", "Pre2"}));
    CHECK(svc.handle("POST", "/api/session/c/run", "").status == 409);
}

TEST_CASE("malformed answers") {
    Service svc;
    CHECK(svc.handle("PUT", "/api/session/m/answers", "[{").status == 400);
    CHECK(svc.handle("PUT", "/api/session/m/answers", R"([{"question_id":"X1","verdict":"unanswered"}])").status == 400);
    // A rejected body does not create the session.
    CHECK_FALSE(svc.snapshot("m"));
    CHECK(svc.handle("GET", "/api/session/m", "").status == 404);
    CHECK(svc.handle("PUT", "/api/session/bad%20id/answers", "[]").status == 404);
}

TEST_CASE("run and compare") {
    testutil::TempDir dir;
    // A small scenario under the fixture name keeps this quick.
    auto small = parse_json_text(fixture_text("port_scenario"));
    small["n_cases"] = 60;
    write_json_file(dir / "port_scenario.json", small);
    Service svc(ServiceOptions{dir.path, 2});

    svc.handle("PUT", "/api/session/r/answers", kFixtureAnswers);
    CHECK(svc.handle("GET", "/api/session/r/compare", "").status == 409);
    CHECK(svc.handle("POST", "/api/session/r/run", R"({"plan":"sideways"})").status == 400);

    auto derived = svc.handle("POST", "/api/session/r/run", R"({"plan":"derived"})");
    REQUIRE(derived.status == 200);
    auto central = svc.handle("POST", "/api/session/r/run", R"({"plan":"all-cloud"})");
    REQUIRE(central.status == 200);
    CHECK(derived.body["plan_label"] == "derived");
    CHECK(derived.body["sensitive_crossings"] == 0);
    CHECK(central.body["sensitive_crossings"].get<std::uint64_t>() > 0);

    // Thin layer: the payload equals a direct library run.
    const auto config = scenario_from_json(small);
    const auto sc = generate_scenario(config, fixture_topology());
    const auto plan = plan_from_verdicts(decide_all(fixture_assessment()), fixture_topology(), fixture_demands(),
                                         fixture_settings());
    CHECK(derived.body == metrics_to_json(run(plan, sc, fixture_topology()).metrics));

    auto cmp = svc.handle("GET", "/api/session/r/compare", "");
    REQUIRE(cmp.status == 200);
    CHECK(cmp.body["label_a"] == "derived");
    CHECK(cmp.body["label_b"] == "all-cloud");
    CHECK(cmp.body["metrics"]["total_bytes_to_cloud"]["delta"].get<double>() < 0);
    CHECK(cmp.body["metrics"]["sensitive_crossings"]["delta"].get<double>() < 0);

    // Only the last two runs are kept.
    svc.handle("POST", "/api/session/r/run", R"({"plan":"derived"})");
    CHECK(svc.snapshot("r")->runs.size() == 2);
    auto cmp2 = svc.handle("GET", "/api/session/r/compare", "");
    CHECK(cmp2.body["label_a"] == "all-cloud");
    CHECK(cmp2.body["label_b"] == "derived");

    auto other_seed = small;
    other_seed["seed"] = 7;
    svc.handle("POST", "/api/session/r/run", json{{"scenario", other_seed}}.dump());
    auto mismatch = svc.handle("GET", "/api/session/r/compare", "");
    CHECK(mismatch.status == 409);
    CHECK(mismatch.body["error"] == "SeedMismatch");

    auto session = svc.handle("GET", "/api/session/r", "");
    CHECK(session.status == 200);
    CHECK(session.body["runs"].size() == 2);
    CHECK(session.body["plan"]["label"] == "derived");
}

TEST_CASE("fixture scenario responses are pinned") {
    Service svc;
    svc.handle("PUT", "/api/session/g/answers", kFixtureAnswers);
    auto derived = svc.handle("POST", "/api/session/g/run", R"({"plan":"derived"})");
    auto central = svc.handle("POST", "/api/session/g/run", R"({"plan":"all-cloud"})");
    REQUIRE(derived.status == 200);
    REQUIRE(central.status == 200);
    check_golden("fixture_run_derived.json", derived.body);
    check_golden("fixture_run_all_cloud.json", central.body);
    check_golden("fixture_compare.json", svc.handle("GET", "/api/session/g/compare", "").body);
}

TEST_CASE("sessions are independent, also under concurrent requests") {
    Service svc;
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&svc, i] {
            const std::string id = "t" + std::to_string(i);
            const std::string body = i % 2 ? conflict_answers() : kFixtureAnswers;
            for (int k = 0; k < 20; ++k) svc.handle("PUT", "/api/session/" + id + "/answers", body);
            svc.handle("PUT", "/api/session/shared/answers", body);
        });
    }
    for (auto& t : threads) t.join();
    for (int i = 0; i < 8; ++i) {
        auto s = svc.snapshot("t" + std::to_string(i));
        REQUIRE(s);
        CHECK(s->verdicts.at(Phase::Preprocessing).outcome ==
              (i % 2 ? Outcome::Conflict : Outcome::DecentralizedMandatory));
    }
    CHECK(svc.snapshot("shared"));

    svc.handle("PUT", "/api/session/a/answers", kFixtureAnswers);
    svc.handle("PUT", "/api/session/b/answers", kFixtureAnswers);
    svc.handle("POST", "/api/session/a/plan", "");
    CHECK(svc.snapshot("a")->plan);
    CHECK_FALSE(svc.snapshot("b")->plan);
}

TEST_CASE("http adapter") {
    Service svc;
    httplib::Server server;
    mount_api(server, svc);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto cat = client.Get("/api/catalog");
    REQUIRE(cat);
    CHECK(cat->status == 200);
    CHECK(cat->get_header_value("Content-Type").starts_with("application/json"));
    CHECK(parse_json_text(cat->body).size() == 16);

    auto put = client.Put("/api/session/h/answers", kFixtureAnswers, "application/json");
    REQUIRE(put);
    CHECK(put->status == 200);
    auto missing = client.Get("/api/session/nobody/compare");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(parse_json_text(missing->body)["error"] == "UnknownSession");

    server.stop();
    th.join();
}

TEST_CASE("port from environment") {
    ::unsetenv("CONDUCT_PORT");
    CHECK(port_from_env() == 8787);
    ::setenv("CONDUCT_PORT", "9001", 1);
    CHECK(port_from_env() == 9001);
    ::setenv("CONDUCT_PORT", "nine", 1);
    CHECK_THROWS_AS(port_from_env(), InvalidConfig);
    ::setenv("CONDUCT_PORT", "70000", 1);
    CHECK_THROWS_AS(port_from_env(), InvalidConfig);
    ::unsetenv("CONDUCT_PORT");
}
