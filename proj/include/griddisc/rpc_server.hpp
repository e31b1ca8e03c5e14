#pragma once

#include "griddisc/clock.hpp"
#include "griddisc/registry.hpp"
#include "griddisc/replication.hpp"

#include <memory>
#include <string>
#include <thread>

#include <json.hpp>

namespace httplib {
class Server;
}

namespace griddisc {

// JSON-RPC 2.0 over HTTP POST /rpc. Methods: discovery.register, .renew,
// .deregister, .find, .find_key, .find_server, .list. register/renew/
// deregister push their mutation through the publisher after the local
// commit. Protocol errors never touch the registry.
class RpcServer {
public:
    RpcServer(std::string host, int port, Registry& registry, Publisher* publisher, Clock& clock,
              std::int64_t default_lease_secs = 3600);
    ~RpcServer();

    RpcServer(const RpcServer&) = delete;
    RpcServer& operator=(const RpcServer&) = delete;

    // Binds and serves; throws BindFailure. Returns once ready.
    void start();
    // Stops listening and drains in-flight calls.
    void stop();

    int port() const { return port_; }

private:
    static bool known_method(const std::string& method);
    nlohmann::json dispatch(const std::string& method, const nlohmann::json& params);
    std::string handle_body(const std::string& body);

    std::string host_;
    int port_;
    Registry& registry_;
    Publisher* publisher_;
    Clock& clock_;
    std::int64_t default_lease_secs_;
    std::unique_ptr<httplib::Server> server_;
    std::thread serve_thread_;
};

} // namespace griddisc
