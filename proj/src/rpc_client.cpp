#include "griddisc/rpc_client.hpp"

#include "griddisc/errors.hpp"

#include <httplib.h>

namespace griddisc {

using nlohmann::json;

RpcClient::RpcClient(const std::string& host, int port, int timeout_ms) {
    cli_ = std::make_unique<httplib::Client>(host, port);
    cli_->set_connection_timeout(0, timeout_ms * 1000);
    cli_->set_read_timeout(0, timeout_ms * 1000);
    cli_->set_write_timeout(0, timeout_ms * 1000);
    cli_->set_keep_alive(true);
    cli_->set_tcp_nodelay(true);
}

RpcClient::~RpcClient() = default;

RpcResult RpcClient::call(const std::string& method, const json& params) {
    std::lock_guard<std::mutex> lock(mu_);
    json request{{"jsonrpc", "2.0"}, {"id", next_id_++}, {"method", method}, {"params", params}};
    const std::string body = request.dump();

    const Micros t0 = steady_micros();
    httplib::Result res = cli_->Post("/rpc", body, "application/json");
    if (!res) {
        switch (res.error()) {
        case httplib::Error::ConnectionTimeout:
        case httplib::Error::Read:
        case httplib::Error::Write:
            throw Timeout("rpc call " + method + " timed out");
        case httplib::Error::Connection:
            throw ConnectFailure("rpc: cannot connect for " + method);
        default:
            throw ProtocolError("rpc transport error " +
                                std::to_string(static_cast<int>(res.error())));
        }
    }
    if (res->status != 200)
        throw ProtocolError("rpc: unexpected HTTP status " + std::to_string(res->status));
    json response = json::parse(res->body, nullptr, false);
    const Micros t1 = steady_micros();
    if (response.is_discarded()) throw ProtocolError("rpc: response is not JSON");

    RpcResult out;
    out.latency_micros = t1 - t0;
    if (response.contains("result")) {
        out.ok = true;
        out.result = response.at("result");
    } else if (response.contains("error")) {
        const json& err = response.at("error");
        out.error_code = err.value("code", 0);
        out.error_message = err.value("message", "");
    } else {
        throw ProtocolError("rpc: response carries neither result nor error");
    }
    return out;
}

void RpcClient::warm_up() {
    call("discovery.find_key", json{{"key", "warmup"}});
}

} // namespace griddisc
