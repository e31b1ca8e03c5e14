#pragma once

#include "griddisc/registry.hpp"
#include "griddisc/udp.hpp"
#include "griddisc/wire.hpp"

#include <atomic>
#include <deque>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace griddisc {

// Where local mutations are pushed. Hub mode sends to a single station
// server which fans out; mesh mode pushes to every peer directly.
struct PeerSet {
    enum class Mode { hub, mesh };

    Mode mode = Mode::mesh;
    std::vector<Endpoint> endpoints; // exactly one when mode == hub

    bool enabled() const { return !endpoints.empty(); }
};

// Remembers the last N (origin, sequence) pairs per origin so duplicated
// UDP datagrams are not applied twice.
class DedupIndex {
public:
    explicit DedupIndex(std::size_t window = 4096) : window_(window) {}

    // True when the pair was already seen; remembers it otherwise.
    bool seen_or_remember(const Id128& origin, std::uint64_t sequence);

private:
    struct OriginWindow {
        std::deque<std::uint64_t> order;
        std::unordered_set<std::uint64_t> seen;
    };

    std::size_t window_;
    std::unordered_map<Id128, OriginWindow, Id128Hash> origins_;
};

enum class ApplyResult { applied, stale, duplicate };

const char* to_string(ApplyResult r);

// Applies remote datagrams to the local registry: dedup first, then
// last-writer-wins on the version stamp. Heartbeats touch nothing here.
class MutationApplier {
public:
    explicit MutationApplier(Registry& registry, std::size_t dedup_window = 4096)
        : registry_(registry), dedup_(dedup_window) {}

    ApplyResult apply(const ReplicationDatagram& d);

private:
    Registry& registry_;
    std::mutex mu_;
    DedupIndex dedup_;
};

// Pushes local mutations as fire-and-forget datagrams. A failed send is
// logged and never fails the local mutation. One sequence number is
// consumed per published event, shared across all endpoints.
class Publisher {
public:
    Publisher(UdpSocket& socket, PeerSet peers, const Id128& origin);

    bool enabled() const { return peers_.enabled(); }
    const PeerSet& peers() const { return peers_; }

    std::size_t publish_record(const ServiceRecord& record);
    std::size_t publish_delete(const Id128& service_id, const VersionStamp& stamp);
    std::size_t publish_heartbeat();

    // Full-state push of every live record; in hub mode a heartbeat goes
    // out first so the hub learns this node. Returns UPSERTs sent.
    std::size_t startup_sync(const std::vector<ServiceRecord>& live);

    std::uint64_t last_sequence() const { return seq_.load(); }

private:
    std::size_t send_datagram(const ReplicationDatagram& d);

    UdpSocket& socket_;
    PeerSet peers_;
    std::vector<sockaddr_in> targets_;
    Id128 origin_;
    std::atomic<std::uint64_t> seq_{0};
};

// Hub-role view of the cluster, learned from datagram source addresses.
class Membership {
public:
    void observe(const Id128& origin, const sockaddr_in& from, Micros now);
    std::vector<sockaddr_in> targets_except(const Id128& origin) const;
    void prune(Micros now, Micros silence_micros);
    std::size_t size() const;

private:
    struct Entry {
        sockaddr_in addr{};
        Micros last_seen = 0;
    };

    mutable std::mutex mu_;
    std::unordered_map<Id128, Entry, Id128Hash> nodes_;
};

// Receive-path glue: decode, track membership, apply, and in hub role
// fan the raw datagram out to every known node except its origin.
class ReplicationService {
public:
    ReplicationService(UdpSocket& socket, MutationApplier& applier, bool hub_role,
                       const Id128& self)
        : socket_(socket), applier_(applier), hub_role_(hub_role), self_(self) {}

    Membership& membership() { return membership_; }

    // Returns the apply outcome, or nullopt for undecodable/own packets.
    std::optional<ApplyResult> handle_packet(const std::uint8_t* data, std::size_t len,
                                             const sockaddr_in& from, Micros now);

private:
    UdpSocket& socket_;
    MutationApplier& applier_;
    Membership membership_;
    bool hub_role_;
    Id128 self_;
};

} // namespace griddisc
