#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <tuple>

#include "conductor/error.hpp"
#include "conductor/events.hpp"
#include "support.hpp"

using namespace conductor;

namespace {

HighLevelEvent ev(const std::string& id, const std::string& c, const std::string& act, double t) {
    HighLevelEvent e;
    e.event_id = id;
    e.case_id = c;
    e.activity = act;
    e.time = t;
    e.size = 96;
    return e;
}

/// Random log with awkward strings to exercise escaping.
EventLog random_log(testutil::Gen& g) {
    static const std::vector<std::string> alphabet = {"arrive", "un,load", "st;ore", "a=b", "x%y", "plain",
                                                      "new\nline", "hash#tag"};
    EventLog log;
    const auto cases = 1 + testutil::below(g, 20);
    int id = 0;
    for (std::uint64_t c = 0; c < cases; ++c) {
        const auto len = 1 + testutil::below(g, 6);
        for (std::uint64_t k = 0; k < len; ++k) {
            HighLevelEvent e = ev("e" + std::to_string(id++) + alphabet[testutil::below(g, alphabet.size())],
                                  "case " + std::to_string(c) + alphabet[testutil::below(g, alphabet.size())],
                                  alphabet[testutil::below(g, alphabet.size())],
                                  static_cast<double>(testutil::below(g, 100000)) / 1000.0);
            e.size = testutil::below(g, 1000);
            if (testutil::below(g, 2)) e.attributes["conf"] = std::to_string(testutil::below(g, 1000));
            if (testutil::below(g, 3) == 0) e.attributes["note;x"] = alphabet[testutil::below(g, alphabet.size())];
            log.append(std::move(e));
        }
    }
    return log;
}

}  // namespace

TEST_CASE("append") {
    SUBCASE("one event") {
        EventLog log = append(EventLog{}, ev("e1", "T1", "arrive", 5));
        REQUIRE(log.case_count() == 1);
        CHECK(log.trace("T1")->size() == 1);
    }
    SUBCASE("duplicate id") {
        EventLog log = append(EventLog{}, ev("e1", "T1", "arrive", 5));
        CHECK_THROWS_AS(log.append(ev("e1", "T2", "depart", 9)), DuplicateEvent);
    }
    SUBCASE("empty case") { CHECK_THROWS_AS(append(EventLog{}, ev("e1", "", "arrive", 5)), EmptyCaseId); }
    SUBCASE("reserved attribute") {
        auto e = ev("e1", "T1", "arrive", 5);
        e.attributes["size"] = "7";
        CHECK_THROWS_AS(append(EventLog{}, e), ReservedAttribute);
    }
    SUBCASE("out of order appends are sorted by time then id") {
        const std::vector<HighLevelEvent> es = {ev("b", "T1", "x", 7), ev("a", "T1", "y", 7), ev("c", "T1", "z", 3)};
        std::vector<std::size_t> perm = {0, 1, 2};
        do {
            EventLog log;
            for (auto i : perm) log.append(es[i]);
            std::vector<std::string> ids;
            for (const auto& e : *log.trace("T1")) ids.push_back(e.event_id);
            CHECK(ids == std::vector<std::string>{"c", "a", "b"});
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    SUBCASE("times are kept to the millisecond") {
        EventLog log = append(EventLog{}, ev("e1", "T1", "arrive", 1.23456));
        CHECK(log.trace("T1")->front().time == 1.235);
    }
}

TEST_CASE("log text canonical order") {
    EventLog log;
    log.append(ev("e3", "B", "store", 1));
    log.append(ev("e2", "A", "unload", 9));
    log.append(ev("e1", "A", "arrive", 2));
    const std::string text = format_log(log);
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    REQUIRE(lines.size() == 3);
    // Oracle: full sort by (case, time, id).
    std::vector<std::tuple<std::string, double, std::string>> keys = {{"B", 1, "e3"}, {"A", 9, "e2"}, {"A", 2, "e1"}};
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(lines[i].starts_with(std::get<0>(keys[i]) + ","));
        CHECK(lines[i].find("event_id=" + std::get<2>(keys[i])) != std::string::npos);
    }
    CHECK(lines[0] == "A,arrive,2.000,event_id=e1;size=96");
}

TEST_CASE("log parse errors carry the line") {
    const std::string text = "A,arrive,1.000,event_id=e1;size=96\nA,store,2.000,event_id=e2;size=96\nbroken line\n";
    try {
        parse_log_text(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_log_text("A,arrive,notatime,event_id=e1;size=1\n"), ParseError);
    CHECK_THROWS_AS(parse_log_text("A,arrive,1.000,size=1\n"), ParseError);
    CHECK_THROWS_AS(read_log("/nonexistent/dir/log.csv"), IoError);
}

TEST_CASE("property: log round-trip through text and files") {
    testutil::Gen g(3);
    testutil::TempDir dir;
    for (int i = 0; i < 200; ++i) {
        const EventLog log = random_log(g);
        const std::string text = format_log(log);
        const EventLog back = parse_log_text(text);
        CHECK(back == log);
        CHECK(format_log(back) == text);
    }
    const EventLog log = random_log(g);
    write_log(log, dir / "a.log");
    write_log(read_log(dir / "a.log"), dir / "b.log");
    CHECK(testutil::slurp(dir / "a.log") == testutil::slurp(dir / "b.log"));
    CHECK(read_log(dir / "a.log") == log);
}

TEST_CASE("readings text keeps truth on a comment channel") {
    RawReading r;
    r.reading_id = "r1";
    r.source = "cam-fixed-1";
    r.true_time = 10.5;
    r.observed_time = 11.0;
    r.kind = ReadingKind::Frame;
    r.payload_size = 2000000;
    r.sensitive = true;
    r.delay = 0.25;
    r.truth = GroundTruth{"plate_read", "CARGO-0001", std::string("person-1")};

    const std::string without = format_readings({r}, false);
    CHECK(without.find("#truth") == std::string::npos);
    CHECK(without.find("plate_read") == std::string::npos);
    CHECK(without.find("person-1") == std::string::npos);

    const std::string with = format_readings({r}, true);
    CHECK(with.find("#truth") != std::string::npos);

    std::istringstream a(with), b(with);
    auto blind = parse_readings(a, false);
    REQUIRE(blind.size() == 1);
    CHECK_FALSE(blind[0].truth);
    auto seeing = parse_readings(b, true);
    REQUIRE(seeing.size() == 1);
    CHECK(seeing[0] == r);
}

TEST_CASE("format_time") {
    CHECK(format_time(0) == "0.000");
    CHECK(format_time(1.0005) == "1.001");
    CHECK(format_time(12345.6) == "12345.600");
}
