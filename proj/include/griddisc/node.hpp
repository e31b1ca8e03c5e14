#pragma once

#include "griddisc/clock.hpp"
#include "griddisc/config.hpp"
#include "griddisc/registry.hpp"
#include "griddisc/replication.hpp"
#include "griddisc/rpc_server.hpp"

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace griddisc {

// The runnable daemon: storage + registry + replication + RPC under one
// config, plus the periodic lease sweeper. Also usable in-process (the
// bench harness and tests start Nodes on ephemeral ports).
class Node {
public:
    explicit Node(NodeConfig config);
    ~Node();

    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    // Throws on failure, message prefixed with the failing subsystem.
    void start();
    void stop();
    bool running() const { return started_; }

    int http_port() const;
    std::uint16_t udp_port() const { return udp_.port(); }
    const Id128& node_id() const { return node_id_; }
    Registry& registry() { return *registry_; }
    Store& store() { return *store_; }

    // Test hook; must be called before start().
    void set_clock(Clock& clock) { clock_ = &clock; }

private:
    void receive_loop();
    void sweep_loop();
    void maintenance_loop();
    bool wait_stop(std::int64_t ms); // true when stopping

    NodeConfig cfg_;
    Clock* clock_ = &SystemClock::instance();
    Id128 node_id_;
    std::shared_ptr<Store> store_;
    std::unique_ptr<Registry> registry_;
    UdpSocket udp_;
    std::unique_ptr<Publisher> publisher_;
    std::unique_ptr<MutationApplier> applier_;
    std::unique_ptr<ReplicationService> replication_;
    std::unique_ptr<RpcServer> rpc_;
    std::vector<std::thread> threads_;
    std::atomic<bool> started_{false};
    std::atomic<bool> stopping_{false};
    std::mutex stop_mu_;
    std::condition_variable stop_cv_;
};

// Daemon entry point: runs until SIGINT/SIGTERM; returns the exit status.
int run_node(const NodeConfig& config);

} // namespace griddisc
