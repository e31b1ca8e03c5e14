#include "griddisc/config.hpp"

#include "griddisc/errors.hpp"

#include <CLI11.hpp>

namespace griddisc {

NodeConfig parse_node_config(const std::vector<std::string>& args, std::string* help_out) {
    CLI::App app{"griddisc-node: replicated service discovery node"};
    app.allow_config_extras(false);
    app.set_config("--config", "", "flat key=value config file; flags override file values");

    std::string role = "node";
    std::string http_bind, udp_bind;
    std::vector<std::string> peers;
    std::string hub;
    std::string backend = "memory";
    std::string data_dir;
    std::int64_t capacity = -1;
    NodeConfig cfg;

    app.add_option("--role", role, "node or hub")->check(CLI::IsMember({"node", "hub"}));
    app.add_option("--http-bind", http_bind, "RPC bind address host:port");
    app.add_option("--udp-bind", udp_bind, "replication bind address host:port");
    app.add_option("--peer", peers, "mesh peer host:port (repeatable)");
    app.add_option("--hub", hub, "hub (station server) host:port");
    app.add_option("--backend", backend, "memory or persistent")
        ->check(CLI::IsMember({"memory", "persistent"}));
    app.add_option("--data-dir", data_dir, "directory for the persistent backend and node id");
    app.add_option("--capacity", capacity, "record cap for the memory backend");
    app.add_option("--default-lease", cfg.default_lease_secs, "default lease seconds");
    app.add_option("--sweep-interval-ms", cfg.sweep_interval_ms, "lease sweep interval");
    app.add_option("--tombstone-window", cfg.tombstone_window_secs, "tombstone retention seconds");
    app.add_option("--heartbeat-secs", cfg.heartbeat_secs, "hub heartbeat interval");
    app.add_option("--repush-secs", cfg.repush_secs, "full-state re-push interval, 0 = off");
    app.add_option("--log-level", cfg.log_level, "error|warn|info|debug");

    std::vector<std::string> argv(args.rbegin(), args.rend()); // CLI11 wants reversed
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        if (help_out) *help_out = app.help();
        return cfg;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    cfg.role = role == "hub" ? NodeConfig::Role::hub : NodeConfig::Role::node;
    if (!http_bind.empty()) cfg.http_bind = parse_endpoint(http_bind);
    if (!udp_bind.empty()) cfg.udp_bind = parse_endpoint(udp_bind);

    if (!peers.empty() && !hub.empty())
        throw ConfigError("peer and hub are mutually exclusive; pick mesh or hub mode");
    if (!hub.empty()) {
        cfg.peers.mode = PeerSet::Mode::hub;
        cfg.peers.endpoints = {parse_endpoint(hub)};
    } else {
        cfg.peers.mode = PeerSet::Mode::mesh;
        for (const auto& p : peers) cfg.peers.endpoints.push_back(parse_endpoint(p));
    }

    if (backend == "persistent") {
        if (data_dir.empty())
            throw ConfigError("backend persistent requires data-dir");
        cfg.backend = BackendDescriptor::persistent(data_dir);
    } else {
        cfg.backend = BackendDescriptor::memory(
            capacity >= 0 ? std::optional<std::size_t>(static_cast<std::size_t>(capacity))
                          : std::nullopt);
        if (!data_dir.empty()) cfg.backend.location = data_dir; // node id persistence only
    }

    validate_config(cfg);
    return cfg;
}

void validate_config(const NodeConfig& cfg) {
    if (cfg.http_bind.port != 0 && cfg.http_bind.port == cfg.udp_bind.port)
        throw ConfigError("http-bind and udp-bind ports must be distinct");
    if (cfg.default_lease_secs < 1) throw ConfigError("default-lease must be positive");
    if (cfg.sweep_interval_ms < 1) throw ConfigError("sweep-interval-ms must be positive");
    if (cfg.tombstone_window_secs < 1) throw ConfigError("tombstone-window must be positive");
    if (cfg.heartbeat_secs < 1) throw ConfigError("heartbeat-secs must be positive");
    if (cfg.repush_secs < 0) throw ConfigError("repush-secs must be zero or positive");
    if (cfg.peers.mode == PeerSet::Mode::hub && cfg.peers.endpoints.size() > 1)
        throw ConfigError("hub mode takes exactly one hub endpoint");
    if (cfg.backend.kind == BackendDescriptor::Kind::persistent && cfg.backend.location.empty())
        throw ConfigError("backend persistent requires data-dir");
}

} // namespace griddisc
