#pragma once

// Session-based JSON API. `Service::handle` is the whole HTTP surface minus
// the socket; the httplib adapter in server.hpp only forwards to it.

#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "conductor/json_io.hpp"

namespace conductor {

struct ApiResponse {
    int status = 200;
    json body;
};

struct ServiceOptions {
    /// Named fixtures are read from here first, then from the embedded set.
    std::optional<std::filesystem::path> fixtures_dir;
    std::size_t retained_runs = 2;
};

struct SessionState {
    std::string session_id;
    Assessment assessment;
    std::map<Phase, PhaseVerdict> verdicts;
    std::optional<PlacementPlan> plan;
    std::deque<SimMetrics> runs;  // oldest first
};

class Service {
  public:
    explicit Service(ServiceOptions options = {});

    ApiResponse handle(const std::string& method, const std::string& path, const std::string& body);

    ApiResponse get_catalog() const;
    ApiResponse get_fixtures() const;
    ApiResponse put_answers(const std::string& session_id, const std::string& body);
    ApiResponse post_plan(const std::string& session_id, const std::string& body);
    ApiResponse post_run(const std::string& session_id, const std::string& body);
    ApiResponse get_compare(const std::string& session_id);
    ApiResponse get_session(const std::string& session_id);

    /// Copy of a session, or nullopt.
    std::optional<SessionState> snapshot(const std::string& session_id);

    /// Raw fixture text, honouring fixtures_dir. Throws UnknownFixture.
    std::string fixture(const std::string& name) const;

  private:
    struct Session {
        std::mutex mutex;
        SessionState state;
    };

    std::shared_ptr<Session> find(const std::string& session_id);
    std::shared_ptr<Session> find_or_create(const std::string& session_id);
    json resolve(const json& value, const std::string& fallback_fixture) const;

    ServiceOptions options_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// `{"error": code, "message": message}`.
json error_body(const std::string& code, const std::string& message);

}  // namespace conductor
