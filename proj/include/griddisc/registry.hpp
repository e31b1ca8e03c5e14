#pragma once

#include "griddisc/clock.hpp"
#include "griddisc/record.hpp"
#include "griddisc/store.hpp"

#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace griddisc {

struct RegistryOptions {
    std::int64_t tombstone_window_secs = 3600;
    IdGen id_gen; // defaults to Id128::random
};

// Outcome of applying a replicated mutation under last-writer-wins.
enum class ApplyOutcome { applied, stale };

// Single-node registry semantics over any Store backend. Mutations are
// serialized; reads run concurrently. Every operation takes `now`
// explicitly so lease behaviour is deterministic under test clocks.
class Registry {
public:
    Registry(std::shared_ptr<Store> store, const Id128& node_id, RegistryOptions opts = {});

    // Stores and returns a fresh record; read-your-writes within this node.
    ServiceRecord register_service(const RecordInput& input, std::int64_t lease_secs, Micros now);

    // Replaces the lease and advances the stamp. Throws NotFound for
    // unknown, tombstoned, or already-expired ids. When `updated` is given
    // it receives the full new record version (for replication).
    Lease renew(const Id128& service_id, std::int64_t lease_secs, Micros now,
                ServiceRecord* updated = nullptr);

    // Idempotent. Returns the tombstone when a live record was removed so
    // the caller can replicate the deletion; nullopt when nothing changed.
    std::optional<ServiceRecord> deregister(const Id128& service_id, Micros now);

    std::vector<ServiceRecord> find(const QueryFilter& filter, Micros now) const;
    std::vector<ServiceRecord> find_key(const std::string& key,
                                        const std::optional<std::string>& value, Micros now) const;
    std::vector<ServiceRecord> find_server(const std::string& server_url, Micros now) const;

    // Tombstones every record with expires_at <= now (so expiry replicates)
    // and physically drops tombstones older than the tombstone window.
    // Returns the number of records expired.
    std::size_t sweep_expired(Micros now, std::vector<ServiceRecord>* tombstones = nullptr);

    // Last-writer-wins application of remote mutations: applied iff the
    // incoming stamp strictly exceeds the stamp currently held.
    ApplyOutcome apply_upsert(const ServiceRecord& record);
    ApplyOutcome apply_delete(const Id128& service_id, const VersionStamp& stamp);

    // All non-tombstoned, non-expired records in (name, id) order.
    std::vector<ServiceRecord> live_records(Micros now) const;

    const Id128& node_id() const { return node_id_; }
    Store& store() { return *store_; }

private:
    std::vector<ServiceRecord> query(const QueryFilter& filter, Micros now) const;

    std::shared_ptr<Store> store_;
    Id128 node_id_;
    RegistryOptions opts_;
    mutable std::shared_mutex mu_;
};

} // namespace griddisc
