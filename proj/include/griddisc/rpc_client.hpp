#pragma once

#include "griddisc/clock.hpp"

#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

namespace httplib {
class Client;
}

namespace griddisc {

// One delivered JSON-RPC response. latency_micros covers the full round
// trip including response parsing, measured on the steady clock.
struct RpcResult {
    bool ok = false;
    nlohmann::json result;
    int error_code = 0;
    std::string error_message;
    Micros latency_micros = 0;
};

// Measurement-grade client: keeps one warm connection, serializes calls,
// throws Timeout / ConnectFailure / ProtocolError on transport trouble.
class RpcClient {
public:
    RpcClient(const std::string& host, int port, int timeout_ms = 5000);
    ~RpcClient();

    RpcClient(const RpcClient&) = delete;
    RpcClient& operator=(const RpcClient&) = delete;

    RpcResult call(const std::string& method, const nlohmann::json& params);

    // Establishes the connection outside any timed window.
    void warm_up();

private:
    std::unique_ptr<httplib::Client> cli_;
    std::mutex mu_;
    int next_id_ = 1;
};

} // namespace griddisc
