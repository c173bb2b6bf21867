#pragma once

// Shared generators and oracles. Oracles here are written against the
// definitions, not against the library code they check.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "conductor/discovery.hpp"
#include "conductor/events.hpp"

namespace testutil {

using Gen = std::mt19937_64;

inline std::uint64_t below(Gen& g, std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(g); }
inline double uniform(Gen& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }

inline std::string activity_name(std::size_t i) { return std::string(1, static_cast<char>('a' + i)); }

/// Random traces as activity sequences.
inline std::vector<std::vector<std::string>> random_traces(Gen& g, std::size_t max_cases, std::size_t alphabet,
                                                           std::size_t max_len = 8) {
    const std::size_t n = 1 + below(g, max_cases);
    std::vector<std::vector<std::string>> out(n);
    for (auto& t : out) {
        const std::size_t len = 1 + below(g, max_len);
        for (std::size_t k = 0; k < len; ++k) t.push_back(activity_name(below(g, alphabet)));
    }
    return out;
}

/// One event per step, one time unit apart, case ids "c<i>".
inline conductor::EventLog log_of(const std::vector<std::vector<std::string>>& traces, double step = 1.0) {
    conductor::EventLog log;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        for (std::size_t k = 0; k < traces[i].size(); ++k) {
            conductor::HighLevelEvent e;
            e.case_id = "c" + std::to_string(i);
            e.activity = traces[i][k];
            e.time = static_cast<double>(k) * step;
            e.event_id = e.case_id + "." + std::to_string(k);
            e.size = 96;
            log.append(std::move(e));
        }
    }
    return log;
}

inline std::vector<std::vector<std::string>> sequences(const conductor::EventLog& log) {
    std::vector<std::vector<std::string>> out;
    for (const auto& [_, trace] : log.traces()) {
        std::vector<std::string> s;
        for (const auto& e : trace) s.push_back(e.activity);
        out.push_back(std::move(s));
    }
    return out;
}

/// Relation oracle: (a,b) -> "->", "<-", "||", "#" from the set of observed successions.
inline std::map<std::pair<std::string, std::string>, std::string> relation_oracle(
    const std::vector<std::vector<std::string>>& traces) {
    std::set<std::pair<std::string, std::string>> follows;
    std::set<std::string> acts;
    for (const auto& t : traces) {
        for (std::size_t k = 0; k < t.size(); ++k) {
            acts.insert(t[k]);
            if (k + 1 < t.size()) follows.insert({t[k], t[k + 1]});
        }
    }
    std::map<std::pair<std::string, std::string>, std::string> out;
    for (const auto& a : acts) {
        for (const auto& b : acts) {
            const bool ab = follows.contains({a, b}), ba = follows.contains({b, a});
            out[{a, b}] = ab && ba ? "||" : ab ? "->" : ba ? "<-" : "#";
        }
    }
    return out;
}

inline std::map<std::pair<std::string, std::string>, std::string> relations_of(const conductor::FootprintMatrix& fp) {
    std::map<std::pair<std::string, std::string>, std::string> out;
    for (const auto& [k, r] : fp.relations()) out[k] = std::string(conductor::symbol(r));
    return out;
}

/// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               ("conductor-test-" + std::to_string(rd()) + "-" + std::to_string(++counter));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testutil
