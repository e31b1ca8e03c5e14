#include "griddisc/node.hpp"

#include "griddisc/errors.hpp"
#include "griddisc/log.hpp"

#include <csignal>
#include <fstream>

namespace griddisc {

namespace {

// Stable node identity for persistent nodes lives beside the data.
Id128 load_or_create_node_id(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoFailure("create " + dir.string() + ": " + ec.message());
    const auto path = dir / "node_id";
    std::ifstream in(path);
    if (in) {
        std::string text;
        in >> text;
        auto id = Id128::parse(text);
        if (id) return *id;
        GD_LOG_WARN("node: ignoring malformed node_id file ", path.string());
    }
    Id128 id = Id128::random();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + path.string());
    out << id.str() << "\n";
    return id;
}

template <typename F>
auto subsystem(const char* name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(name) + ": " + e.what());
    }
}

} // namespace

Node::Node(NodeConfig config) : cfg_(std::move(config)) {}

Node::~Node() { stop(); }

void Node::start() {
    if (started_) return;
    validate_config(cfg_);
    stopping_ = false;

    if (cfg_.node_id)
        node_id_ = *cfg_.node_id;
    else if (!cfg_.backend.location.empty())
        node_id_ = subsystem("node-id", [&] { return load_or_create_node_id(cfg_.backend.location); });
    else
        node_id_ = Id128::random();

    subsystem("storage", [&] { store_ = open_store(cfg_.backend); });
    RegistryOptions opts;
    opts.tombstone_window_secs = cfg_.tombstone_window_secs;
    registry_ = std::make_unique<Registry>(store_, node_id_, opts);

    subsystem("replication", [&] { udp_.bind(cfg_.udp_bind); });
    publisher_ = std::make_unique<Publisher>(udp_, cfg_.peers, node_id_);
    applier_ = std::make_unique<MutationApplier>(*registry_);
    replication_ = std::make_unique<ReplicationService>(udp_, *applier_,
                                                        cfg_.role == NodeConfig::Role::hub, node_id_);

    // Announce everything we already hold before serving traffic.
    publisher_->startup_sync(registry_->live_records(clock_->now_micros()));

    rpc_ = std::make_unique<RpcServer>(cfg_.http_bind.host, cfg_.http_bind.port, *registry_,
                                       publisher_.get(), *clock_, cfg_.default_lease_secs);
    subsystem("rpc", [&] { rpc_->start(); });

    threads_.emplace_back([this] { receive_loop(); });
    threads_.emplace_back([this] { sweep_loop(); });
    threads_.emplace_back([this] { maintenance_loop(); });
    started_ = true;
    GD_LOG_INFO("node ", node_id_.str(), " up: rpc ", cfg_.http_bind.host, ":", http_port(),
                ", udp port ", udp_.port(), cfg_.role == NodeConfig::Role::hub ? ", hub role" : "");
}

void Node::stop() {
    if (!started_ && threads_.empty()) return;
    {
        std::lock_guard<std::mutex> lock(stop_mu_);
        stopping_ = true;
    }
    stop_cv_.notify_all();
    if (rpc_) rpc_->stop();
    for (auto& t : threads_)
        if (t.joinable()) t.join();
    threads_.clear();
    udp_.close();
    if (store_) store_->close();
    started_ = false;
    GD_LOG_INFO("node ", node_id_.str(), " stopped");
}

int Node::http_port() const { return rpc_ ? rpc_->port() : cfg_.http_bind.port; }

bool Node::wait_stop(std::int64_t ms) {
    std::unique_lock<std::mutex> lock(stop_mu_);
    return stop_cv_.wait_for(lock, std::chrono::milliseconds(ms), [this] { return stopping_.load(); });
}

void Node::receive_loop() {
    while (!stopping_) {
        auto pkt = udp_.recv(200);
        if (!pkt || stopping_) continue;
        try {
            replication_->handle_packet(pkt->data.data(), pkt->data.size(), pkt->from,
                                        clock_->now_micros());
        } catch (const std::exception& e) {
            GD_LOG_ERROR("replication: apply failed: ", e.what());
        }
    }
}

void Node::sweep_loop() {
    while (!wait_stop(cfg_.sweep_interval_ms)) {
        std::vector<ServiceRecord> tombstones;
        try {
            registry_->sweep_expired(clock_->now_micros(), &tombstones);
        } catch (const std::exception& e) {
            GD_LOG_ERROR("sweep: ", e.what());
            continue;
        }
        // Expiry replicates: push each tombstone after the local commit.
        for (const auto& tomb : tombstones)
            publisher_->publish_delete(tomb.service_id, tomb.stamp);
        if (!tombstones.empty())
            GD_LOG_DEBUG("sweep: expired ", tombstones.size(), " leases");
    }
}

void Node::maintenance_loop() {
    Micros last_heartbeat = steady_micros();
    Micros last_repush = steady_micros();
    const bool heartbeats = publisher_->enabled() && cfg_.peers.mode == PeerSet::Mode::hub;
    while (!wait_stop(250)) {
        const Micros now = steady_micros();
        if (heartbeats && now - last_heartbeat >= cfg_.heartbeat_secs * kMicrosPerSec) {
            publisher_->publish_heartbeat();
            last_heartbeat = now;
        }
        if (publisher_->enabled() && cfg_.repush_secs > 0 &&
            now - last_repush >= cfg_.repush_secs * kMicrosPerSec) {
            publisher_->startup_sync(registry_->live_records(clock_->now_micros()));
            last_repush = now;
        }
        if (cfg_.role == NodeConfig::Role::hub)
            replication_->membership().prune(clock_->now_micros(),
                                             3 * cfg_.heartbeat_secs * kMicrosPerSec);
    }
}

namespace {
std::atomic<bool> g_signal_stop{false};
void handle_signal(int) { g_signal_stop = true; }
} // namespace

int run_node(const NodeConfig& config) {
    set_log_level(config.log_level);
    Node node(config);
    try {
        node.start();
    } catch (const std::exception& e) {
        GD_LOG_ERROR("startup failed: ", e.what());
        return 1;
    }
    g_signal_stop = false;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_signal_stop)
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    node.stop();
    return 0;
}

} // namespace griddisc
