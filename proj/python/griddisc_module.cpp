#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "griddisc/bench.hpp"
#include "griddisc/errors.hpp"
#include "griddisc/json_codec.hpp"
#include "griddisc/node.hpp"
#include "griddisc/registry.hpp"
#include "griddisc/rpc_client.hpp"
#include "griddisc/stats.hpp"
#include "griddisc/wire.hpp"

#include <json.hpp>

namespace py = pybind11;
using namespace griddisc;
using nlohmann::json;

namespace {

// Bridge nlohmann::json <-> Python objects through the stdlib json module.
py::object to_py(const json& j) {
    py::module_ pyjson = py::module_::import("json");
    return pyjson.attr("loads")(j.dump());
}

json from_py(const py::object& obj) {
    py::module_ pyjson = py::module_::import("json");
    std::string text = py::cast<std::string>(pyjson.attr("dumps")(obj));
    return json::parse(text);
}

Micros now_or_system(const std::optional<Micros>& now) {
    return now ? *now : SystemClock::instance().now_micros();
}

Id128 parse_id(const std::string& text) {
    auto id = Id128::parse(text);
    if (!id) throw InvalidParams("'" + text + "' is not a canonical id");
    return *id;
}

// A store + registry pair usable directly from Python, without the daemon.
class PyRegistry {
public:
    PyRegistry(const std::string& backend, const std::optional<std::string>& path,
               std::optional<std::size_t> capacity, std::int64_t tombstone_window_secs) {
        BackendDescriptor desc;
        if (backend == "persistent") {
            if (!path) throw ConfigError("persistent backend requires path");
            desc = BackendDescriptor::persistent(*path);
        } else if (backend == "memory") {
            desc = BackendDescriptor::memory(capacity);
        } else {
            throw ConfigError("backend must be 'memory' or 'persistent'");
        }
        store_ = open_store(desc);
        RegistryOptions opts;
        opts.tombstone_window_secs = tombstone_window_secs;
        registry_ = std::make_unique<Registry>(store_, Id128::random(), opts);
    }

    py::dict register_service(const std::string& name, const std::string& server_url,
                              const std::vector<std::string>& methods,
                              const std::vector<std::pair<std::string, std::string>>& attributes,
                              std::int64_t lease_secs, std::optional<Micros> now) {
        RecordInput in{name, server_url, methods, attributes};
        return to_py(record_to_json(registry_->register_service(in, lease_secs, now_or_system(now))));
    }

    py::dict renew(const std::string& service_id, std::int64_t lease_secs,
                   std::optional<Micros> now) {
        return to_py(
            lease_to_json(registry_->renew(parse_id(service_id), lease_secs, now_or_system(now))));
    }

    bool deregister(const std::string& service_id, std::optional<Micros> now) {
        return registry_->deregister(parse_id(service_id), now_or_system(now)).has_value();
    }

    py::list find(const std::optional<std::string>& name_pattern,
                  const std::optional<std::string>& server_url, const py::object& required_attrs,
                  std::optional<Micros> now) {
        QueryFilter f;
        f.name_pattern = name_pattern;
        f.server_url = server_url;
        if (!required_attrs.is_none()) {
            for (const auto& [k, v] : from_py(required_attrs).items()) {
                if (v.is_null())
                    f.required_attrs.emplace_back(k, std::nullopt);
                else
                    f.required_attrs.emplace_back(k, v.get<std::string>());
            }
        }
        return records_to_py(registry_->find(f, now_or_system(now)));
    }

    py::list find_key(const std::string& key, const std::optional<std::string>& value,
                      std::optional<Micros> now) {
        return records_to_py(registry_->find_key(key, value, now_or_system(now)));
    }

    py::list find_server(const std::string& server_url, std::optional<Micros> now) {
        return records_to_py(registry_->find_server(server_url, now_or_system(now)));
    }

    std::size_t sweep(std::optional<Micros> now) {
        return registry_->sweep_expired(now_or_system(now));
    }

    std::string node_id() const { return registry_->node_id().str(); }

private:
    static py::list records_to_py(const std::vector<ServiceRecord>& records) {
        py::list out;
        for (const auto& r : records) out.append(to_py(record_to_json(r)));
        return out;
    }

    std::shared_ptr<Store> store_;
    std::unique_ptr<Registry> registry_;
};

NodeConfig config_from_kwargs(const std::string& role, const std::string& http_bind,
                              const std::string& udp_bind, const std::vector<std::string>& peers,
                              const std::optional<std::string>& hub, const std::string& backend,
                              const std::optional<std::string>& data_dir,
                              std::optional<std::size_t> capacity, std::int64_t sweep_interval_ms,
                              std::int64_t tombstone_window_secs, std::int64_t repush_secs) {
    NodeConfig cfg;
    cfg.role = role == "hub" ? NodeConfig::Role::hub : NodeConfig::Role::node;
    cfg.http_bind = parse_endpoint(http_bind);
    cfg.udp_bind = parse_endpoint(udp_bind);
    if (hub && !peers.empty()) throw ConfigError("peers and hub are mutually exclusive");
    if (hub) {
        cfg.peers.mode = PeerSet::Mode::hub;
        cfg.peers.endpoints = {parse_endpoint(*hub)};
    } else {
        for (const auto& p : peers) cfg.peers.endpoints.push_back(parse_endpoint(p));
    }
    if (backend == "persistent") {
        if (!data_dir) throw ConfigError("persistent backend requires data_dir");
        cfg.backend = BackendDescriptor::persistent(*data_dir);
    } else {
        cfg.backend = BackendDescriptor::memory(capacity);
        if (data_dir) cfg.backend.location = *data_dir;
    }
    cfg.sweep_interval_ms = sweep_interval_ms;
    cfg.tombstone_window_secs = tombstone_window_secs;
    cfg.repush_secs = repush_secs;
    cfg.log_level = "warn";
    return cfg;
}

} // namespace

PYBIND11_MODULE(griddisc, m) {
    m.doc() = "Replicated grid service discovery: registry, replication codec, node, RPC client";

    py::register_exception<Error>(m, "Error");

    py::class_<PyRegistry>(m, "Registry")
        .def(py::init<const std::string&, const std::optional<std::string>&,
                      std::optional<std::size_t>, std::int64_t>(),
             py::arg("backend") = "memory", py::arg("path") = std::nullopt,
             py::arg("capacity") = std::nullopt, py::arg("tombstone_window_secs") = 3600)
        .def("register", &PyRegistry::register_service, py::arg("name"), py::arg("server_url"),
             py::arg("methods") = std::vector<std::string>{},
             py::arg("attributes") = std::vector<std::pair<std::string, std::string>>{},
             py::arg("lease_secs") = 3600, py::arg("now") = std::nullopt)
        .def("renew", &PyRegistry::renew, py::arg("service_id"), py::arg("lease_secs") = 3600,
             py::arg("now") = std::nullopt)
        .def("deregister", &PyRegistry::deregister, py::arg("service_id"),
             py::arg("now") = std::nullopt)
        .def("find", &PyRegistry::find, py::arg("name_pattern") = std::nullopt,
             py::arg("server_url") = std::nullopt, py::arg("required_attrs") = py::none(),
             py::arg("now") = std::nullopt)
        .def("find_key", &PyRegistry::find_key, py::arg("key"), py::arg("value") = std::nullopt,
             py::arg("now") = std::nullopt)
        .def("find_server", &PyRegistry::find_server, py::arg("server_url"),
             py::arg("now") = std::nullopt)
        .def("sweep", &PyRegistry::sweep, py::arg("now") = std::nullopt)
        .def_property_readonly("node_id", &PyRegistry::node_id);

    py::class_<Node>(m, "Node")
        .def(py::init([](const std::string& role, const std::string& http_bind,
                         const std::string& udp_bind, const std::vector<std::string>& peers,
                         const std::optional<std::string>& hub, const std::string& backend,
                         const std::optional<std::string>& data_dir,
                         std::optional<std::size_t> capacity, std::int64_t sweep_interval_ms,
                         std::int64_t tombstone_window_secs, std::int64_t repush_secs) {
                 return std::make_unique<Node>(config_from_kwargs(
                     role, http_bind, udp_bind, peers, hub, backend, data_dir, capacity,
                     sweep_interval_ms, tombstone_window_secs, repush_secs));
             }),
             py::arg("role") = "node", py::arg("http_bind") = "127.0.0.1:0",
             py::arg("udp_bind") = "127.0.0.1:0", py::arg("peers") = std::vector<std::string>{},
             py::arg("hub") = std::nullopt, py::arg("backend") = "memory",
             py::arg("data_dir") = std::nullopt, py::arg("capacity") = std::nullopt,
             py::arg("sweep_interval_ms") = 1000, py::arg("tombstone_window_secs") = 3600,
             py::arg("repush_secs") = 0)
        .def("start", &Node::start, py::call_guard<py::gil_scoped_release>())
        .def("stop", &Node::stop, py::call_guard<py::gil_scoped_release>())
        .def_property_readonly("http_port", &Node::http_port)
        .def_property_readonly("udp_port", &Node::udp_port)
        .def_property_readonly("node_id", [](const Node& n) { return n.node_id().str(); });

    py::class_<RpcClient>(m, "RpcClient")
        .def(py::init<const std::string&, int, int>(), py::arg("host"), py::arg("port"),
             py::arg("timeout_ms") = 5000)
        .def("call",
             [](RpcClient& c, const std::string& method, const py::object& params) {
                 json jparams = params.is_none() ? json::object() : from_py(params);
                 RpcResult r;
                 {
                     py::gil_scoped_release release;
                     r = c.call(method, jparams);
                 }
                 py::dict out;
                 out["ok"] = r.ok;
                 out["result"] = r.ok ? to_py(r.result) : py::object(py::none());
                 out["error_code"] = r.error_code;
                 out["error_message"] = r.error_message;
                 out["latency_micros"] = r.latency_micros;
                 return out;
             },
             py::arg("method"), py::arg("params") = py::none());

    m.def("encode_datagram", [](const py::dict& d) {
        ReplicationDatagram dg;
        json j = from_py(d);
        const std::string op = j.at("op").get<std::string>();
        dg.origin = parse_id(j.at("origin").get<std::string>());
        dg.sequence = j.at("sequence").get<std::uint64_t>();
        if (op == "upsert") {
            dg.op = WireOp::upsert;
            dg.record = record_from_json(j.at("record"));
        } else if (op == "delete") {
            dg.op = WireOp::del;
            DeletePayload del;
            del.service_id = parse_id(j.at("service_id").get<std::string>());
            del.stamp.wall_micros = j.at("stamp").at("wall_micros").get<Micros>();
            del.stamp.origin = parse_id(j.at("stamp").at("origin_node").get<std::string>());
            dg.deletion = del;
        } else if (op == "heartbeat") {
            dg.op = WireOp::heartbeat;
        } else {
            throw InvalidParams("op must be upsert/delete/heartbeat");
        }
        auto bytes = encode_datagram(dg);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    });

    m.def("decode_datagram", [](const py::bytes& data) {
        std::string buf = data;
        ReplicationDatagram dg =
            decode_datagram(reinterpret_cast<const std::uint8_t*>(buf.data()), buf.size());
        json j{{"origin", dg.origin.str()}, {"sequence", dg.sequence}};
        switch (dg.op) {
        case WireOp::upsert:
            j["op"] = "upsert";
            j["record"] = record_to_json(*dg.record);
            break;
        case WireOp::del:
            j["op"] = "delete";
            j["service_id"] = dg.deletion->service_id.str();
            j["stamp"] = {{"wall_micros", dg.deletion->stamp.wall_micros},
                          {"origin_node", dg.deletion->stamp.origin.str()}};
            break;
        case WireOp::heartbeat:
            j["op"] = "heartbeat";
            break;
        }
        return to_py(j);
    });

    m.def("summarize", [](const std::vector<Micros>& samples) {
        Summary s = summarize(samples);
        py::dict out;
        out["min"] = s.min;
        out["mean"] = s.mean;
        out["p50"] = s.p50;
        out["p95"] = s.p95;
        out["max"] = s.max;
        out["count"] = s.count;
        return out;
    });

    m.attr("MAX_DATAGRAM_BYTES") = kMaxDatagramBytes;
    m.attr("__version__") = "0.1.0";
}
