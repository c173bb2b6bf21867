#include "conductor/server.hpp"

#include <cstdlib>

#include <httplib.h>

#include "conductor/error.hpp"

namespace conductor {

int port_from_env() {
    const char* v = std::getenv("CONDUCT_PORT");
    if (!v || !*v) return 8787;
    char* end = nullptr;
    const long p = std::strtol(v, &end, 10);
    if (*end != '\0' || p <= 0 || p > 65535) throw InvalidConfig(std::string("CONDUCT_PORT is not a port: ") + v);
    return static_cast<int>(p);
}

void mount_api(httplib::Server& server, Service& service) {
    auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
        ApiResponse r = service.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    server.Get(R"(/api/.*)", forward);
    server.Put(R"(/api/.*)", forward);
    server.Post(R"(/api/.*)", forward);
    server.Delete(R"(/api/.*)", forward);
}

void serve(Service& service, const ServerOptions& options) {
    httplib::Server server;
    mount_api(server, service);
    if (options.static_dir && !server.set_mount_point("/", options.static_dir->string()))
        throw IoError("cannot mount " + options.static_dir->string());
    if (!server.bind_to_port(options.host, options.port))
        throw IoError("cannot bind " + options.host + ":" + std::to_string(options.port));
    server.listen_after_bind();
}

}  // namespace conductor
