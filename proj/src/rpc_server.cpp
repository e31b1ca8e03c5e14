#include "griddisc/rpc_server.hpp"

#include "griddisc/errors.hpp"
#include "griddisc/json_codec.hpp"
#include "griddisc/log.hpp"

#include <httplib.h>

#include <set>

namespace griddisc {

using nlohmann::json;

namespace {

// JSON-RPC 2.0 codes plus the application range -32000..-32099.
constexpr int kParseError = -32700;
constexpr int kInvalidRequest = -32600;
constexpr int kMethodNotFound = -32601;
constexpr int kInvalidParamsCode = -32602;
constexpr int kInternalError = -32603;
constexpr int kNotFoundCode = -32000;
constexpr int kInvalidRecordCode = -32001;
constexpr int kLeaseOutOfRangeCode = -32002;
constexpr int kCapacityExceededCode = -32003;

json error_response(const json& id, int code, const std::string& message) {
    return json{{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

json result_response(const json& id, json result) {
    return json{{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
}

int code_for(const Error& e) {
    switch (e.code()) {
    case Errc::not_found: return kNotFoundCode;
    case Errc::invalid_record: return kInvalidRecordCode;
    case Errc::lease_out_of_range: return kLeaseOutOfRangeCode;
    case Errc::capacity_exceeded: return kCapacityExceededCode;
    case Errc::invalid_key:
    case Errc::invalid_server_url:
    case Errc::invalid_params: return kInvalidParamsCode;
    default: return kInternalError;
    }
}

json records_to_json(const std::vector<ServiceRecord>& records) {
    json out = json::array();
    for (const auto& r : records) out.push_back(record_to_json(r));
    return out;
}

} // namespace

RpcServer::RpcServer(std::string host, int port, Registry& registry, Publisher* publisher,
                     Clock& clock, std::int64_t default_lease_secs)
    : host_(std::move(host)), port_(port), registry_(registry), publisher_(publisher),
      clock_(clock), default_lease_secs_(default_lease_secs),
      server_(std::make_unique<httplib::Server>()) {}

RpcServer::~RpcServer() { stop(); }

json RpcServer::dispatch(const std::string& method, const json& params) {
    if (!params.is_object() && !params.is_null())
        throw InvalidParams("params must be an object");
    const Micros now = clock_.now_micros();

    if (method == "discovery.register") {
        RecordInput input = record_input_from_params(params);
        std::int64_t lease_secs = default_lease_secs_;
        if (params.contains("lease_secs")) {
            if (!params.at("lease_secs").is_number_integer())
                throw InvalidParams("field 'lease_secs' must be an integer");
            lease_secs = params.at("lease_secs").get<std::int64_t>();
        }
        ServiceRecord rec = registry_.register_service(input, lease_secs, now);
        if (publisher_) publisher_->publish_record(rec);
        return record_to_json(rec);
    }
    if (method == "discovery.renew") {
        Id128 id = id_from_params(params, "service_id");
        std::int64_t lease_secs = default_lease_secs_;
        if (params.contains("lease_secs")) {
            if (!params.at("lease_secs").is_number_integer())
                throw InvalidParams("field 'lease_secs' must be an integer");
            lease_secs = params.at("lease_secs").get<std::int64_t>();
        }
        ServiceRecord updated;
        Lease lease = registry_.renew(id, lease_secs, now, &updated);
        if (publisher_) publisher_->publish_record(updated);
        return lease_to_json(lease);
    }
    if (method == "discovery.deregister") {
        Id128 id = id_from_params(params, "service_id");
        auto tomb = registry_.deregister(id, now);
        if (tomb && publisher_) publisher_->publish_delete(tomb->service_id, tomb->stamp);
        return json{{"ok", true}};
    }
    if (method == "discovery.find")
        return records_to_json(registry_.find(filter_from_params(params), now));
    if (method == "discovery.find_key") {
        std::string key;
        if (params.is_object() && params.contains("key")) {
            if (!params.at("key").is_string()) throw InvalidParams("field 'key' must be a string");
            key = params.at("key").get<std::string>();
        }
        std::optional<std::string> value;
        if (params.is_object() && params.contains("value")) {
            const json& v = params.at("value");
            if (v.is_string())
                value = v.get<std::string>();
            else if (!v.is_null())
                throw InvalidParams("field 'value' must be a string");
        }
        return records_to_json(registry_.find_key(key, value, now));
    }
    if (method == "discovery.find_server") {
        std::string url;
        if (params.is_object() && params.contains("server_url")) {
            if (!params.at("server_url").is_string())
                throw InvalidParams("field 'server_url' must be a string");
            url = params.at("server_url").get<std::string>();
        }
        return records_to_json(registry_.find_server(url, now));
    }
    // handle_body only dispatches known methods
    return records_to_json(registry_.live_records(now));
}

bool RpcServer::known_method(const std::string& method) {
    static const std::set<std::string> kMethods = {
        "discovery.register", "discovery.renew",       "discovery.deregister", "discovery.find",
        "discovery.find_key", "discovery.find_server", "discovery.list"};
    return kMethods.count(method) > 0;
}

std::string RpcServer::handle_body(const std::string& body) {
    json request = json::parse(body, nullptr, false);
    if (request.is_discarded())
        return error_response(nullptr, kParseError, "parse error").dump();
    if (!request.is_object())
        return error_response(nullptr, kInvalidRequest, "request must be an object").dump();

    json id = request.contains("id") ? request.at("id") : json(nullptr);
    if (request.contains("jsonrpc") && request.at("jsonrpc") != "2.0")
        return error_response(id, kInvalidRequest, "jsonrpc must be \"2.0\"").dump();
    if (!request.contains("method") || !request.at("method").is_string())
        return error_response(id, kInvalidRequest, "missing method").dump();

    const std::string method = request.at("method").get<std::string>();
    if (!known_method(method))
        return error_response(id, kMethodNotFound, "unknown method '" + method + "'").dump();

    json params = request.contains("params") ? request.at("params") : json(nullptr);
    try {
        return result_response(id, dispatch(method, params)).dump();
    } catch (const Error& e) {
        return error_response(id, code_for(e), e.what()).dump();
    } catch (const std::exception& e) {
        GD_LOG_ERROR("rpc: internal error in ", method, ": ", e.what());
        return error_response(id, kInternalError, "internal error").dump();
    }
}

void RpcServer::start() {
    server_->set_tcp_nodelay(true);
    server_->Post("/rpc", [this](const httplib::Request& req, httplib::Response& res) {
        res.set_content(handle_body(req.body), "application/json");
    });

    if (port_ == 0) {
        int bound = server_->bind_to_any_port(host_);
        if (bound < 0) throw BindFailure("rpc: cannot bind " + host_ + ":0");
        port_ = bound;
    } else if (!server_->bind_to_port(host_, port_)) {
        throw BindFailure("rpc: cannot bind " + host_ + ":" + std::to_string(port_));
    }

    serve_thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    GD_LOG_INFO("rpc: serving on ", host_, ":", port_);
}

void RpcServer::stop() {
    if (serve_thread_.joinable()) {
        server_->stop();
        serve_thread_.join();
    }
}

} // namespace griddisc
