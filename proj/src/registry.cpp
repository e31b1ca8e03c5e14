#include "griddisc/registry.hpp"

#include "griddisc/errors.hpp"
#include "griddisc/wire.hpp"

#include <algorithm>
#include <mutex>
#include <set>

namespace griddisc {

namespace {

// Tombstones are canonical (id, stamp) markers: every other field is
// normalized so replicas converge byte-identically no matter which order
// the upsert and delete arrived in. The placeholder lease keeps the Lease
// invariants; tombstones never consult it.
ServiceRecord make_tombstone(const Id128& id, const VersionStamp& stamp) {
    ServiceRecord tomb;
    tomb.service_id = id;
    tomb.lease.granted_at = stamp.wall_micros;
    tomb.lease.duration_secs = 1;
    tomb.lease.expires_at = stamp.wall_micros + kMicrosPerSec;
    tomb.stamp = stamp;
    tomb.tombstone = true;
    return tomb;
}

} // namespace

Registry::Registry(std::shared_ptr<Store> store, const Id128& node_id, RegistryOptions opts)
    : store_(std::move(store)), node_id_(node_id), opts_(std::move(opts)) {
    if (!opts_.id_gen) opts_.id_gen = [] { return Id128::random(); };
}

ServiceRecord Registry::register_service(const RecordInput& input, std::int64_t lease_secs,
                                         Micros now) {
    if (input.name.empty()) throw InvalidRecord("service name must be non-empty");
    std::set<std::string> keys;
    for (const auto& [k, _] : input.attributes)
        if (!keys.insert(k).second) throw InvalidRecord("duplicate attribute key '" + k + "'");

    ServiceRecord rec;
    rec.name = input.name;
    rec.server_url = input.server_url;
    rec.methods = input.methods;
    rec.attributes.insert(input.attributes.begin(), input.attributes.end());
    rec.lease = make_lease(now, lease_secs);

    std::unique_lock lock(mu_);
    rec.service_id = opts_.id_gen();
    rec.stamp = next_stamp(now, node_id_, std::nullopt);
    // Records are replicated whole in one datagram, never fragmented.
    if (kWireHeaderBytes + encode_record_bytes(rec).size() > kMaxDatagramBytes)
        throw InvalidRecord("record exceeds the maximum replication datagram (8192 bytes)");
    store_->put(rec);
    return rec;
}

Lease Registry::renew(const Id128& service_id, std::int64_t lease_secs, Micros now,
                      ServiceRecord* updated) {
    std::unique_lock lock(mu_);
    auto rec = store_->get(service_id);
    if (!rec || rec->tombstone || rec->lease.expires_at <= now)
        throw NotFound("service " + service_id.str() + " is not live");
    rec->lease = make_lease(now, lease_secs);
    rec->stamp = next_stamp(now, node_id_, rec->stamp);
    store_->put(*rec);
    if (updated) *updated = *rec;
    return rec->lease;
}

std::optional<ServiceRecord> Registry::deregister(const Id128& service_id, Micros now) {
    std::unique_lock lock(mu_);
    auto rec = store_->get(service_id);
    if (!rec || rec->tombstone) return std::nullopt;
    ServiceRecord tomb = make_tombstone(service_id, next_stamp(now, node_id_, rec->stamp));
    store_->put(tomb);
    return tomb;
}

std::vector<ServiceRecord> Registry::query(const QueryFilter& filter, Micros now) const {
    std::shared_lock lock(mu_);
    std::vector<ServiceRecord> out;
    for (auto& rec : store_->scan())
        if (record_live(rec, now) && filter.matches(rec)) out.push_back(std::move(rec));
    sort_results(out);
    return out;
}

std::vector<ServiceRecord> Registry::find(const QueryFilter& filter, Micros now) const {
    return query(filter, now);
}

std::vector<ServiceRecord> Registry::find_key(const std::string& key,
                                              const std::optional<std::string>& value,
                                              Micros now) const {
    if (key.empty()) throw InvalidKey("attribute key must be non-empty");
    QueryFilter filter;
    filter.required_attrs.emplace_back(key, value);
    return query(filter, now);
}

std::vector<ServiceRecord> Registry::find_server(const std::string& server_url, Micros now) const {
    if (server_url.empty()) throw InvalidServerUrl("server_url must be non-empty");
    QueryFilter filter;
    filter.server_url = server_url;
    return query(filter, now);
}

std::size_t Registry::sweep_expired(Micros now, std::vector<ServiceRecord>* tombstones) {
    std::unique_lock lock(mu_);
    const Micros window = opts_.tombstone_window_secs * kMicrosPerSec;
    std::size_t expired = 0;
    for (auto& rec : store_->scan()) {
        if (rec.tombstone) {
            if (rec.stamp.wall_micros + window <= now) store_->erase(rec.service_id);
            continue;
        }
        if (rec.lease.expires_at > now) continue;
        ServiceRecord tomb = make_tombstone(rec.service_id, next_stamp(now, node_id_, rec.stamp));
        store_->put(tomb);
        ++expired;
        if (tombstones) tombstones->push_back(std::move(tomb));
    }
    return expired;
}

ApplyOutcome Registry::apply_upsert(const ServiceRecord& record) {
    std::unique_lock lock(mu_);
    auto current = store_->get(record.service_id);
    if (current && !(current->stamp < record.stamp)) return ApplyOutcome::stale;
    store_->put(record);
    return ApplyOutcome::applied;
}

ApplyOutcome Registry::apply_delete(const Id128& service_id, const VersionStamp& stamp) {
    std::unique_lock lock(mu_);
    auto current = store_->get(service_id);
    // For an unknown id the marker is still stored, so a late, stale
    // upsert cannot resurrect the record.
    if (current && !(current->stamp < stamp)) return ApplyOutcome::stale;
    store_->put(make_tombstone(service_id, stamp));
    return ApplyOutcome::applied;
}

std::vector<ServiceRecord> Registry::live_records(Micros now) const {
    return query(QueryFilter{}, now);
}

} // namespace griddisc
