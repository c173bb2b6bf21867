#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "conductor/service.hpp"

namespace httplib {
class Server;
}

namespace conductor {

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8787;
    std::optional<std::filesystem::path> static_dir;  // mounted at "/"
};

/// Port from CONDUCT_PORT, or 8787. Throws InvalidConfig on garbage.
int port_from_env();

/// Registers the /api routes on `server`, forwarding to `service`.
void mount_api(httplib::Server& server, Service& service);

/// Blocks until the server stops. Throws IoError when the port cannot be bound.
void serve(Service& service, const ServerOptions& options);

}  // namespace conductor
