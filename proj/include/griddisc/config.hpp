#pragma once

#include "griddisc/ids.hpp"
#include "griddisc/replication.hpp"
#include "griddisc/store.hpp"
#include "griddisc/udp.hpp"

#include <optional>
#include <string>
#include <vector>

namespace griddisc {

struct NodeConfig {
    enum class Role { node, hub };

    Role role = Role::node;
    Endpoint http_bind{"127.0.0.1", 8080};
    Endpoint udp_bind{"127.0.0.1", 9010};
    PeerSet peers;                         // empty => replication disabled
    BackendDescriptor backend = BackendDescriptor::memory();
    std::int64_t default_lease_secs = 3600;
    std::int64_t sweep_interval_ms = 1000;
    std::int64_t tombstone_window_secs = 3600;
    std::int64_t heartbeat_secs = 30;
    std::int64_t repush_secs = 300;        // 0 disables the periodic re-push
    std::string log_level = "info";
    std::optional<Id128> node_id;          // normally generated/persisted at runtime
};

// Parses flags plus an optional `--config FILE` of flat key=value lines
// (keys identical to the long flags); flags override file values. Throws
// ConfigError naming the offending key. When --help is requested the help
// text is placed in *help_out and a default config returned.
NodeConfig parse_node_config(const std::vector<std::string>& args, std::string* help_out = nullptr);

void validate_config(const NodeConfig& config);

} // namespace griddisc
