#include "griddisc/replication.hpp"

#include "griddisc/errors.hpp"
#include "griddisc/log.hpp"

namespace griddisc {

const char* to_string(ApplyResult r) {
    switch (r) {
    case ApplyResult::applied: return "applied";
    case ApplyResult::stale: return "stale";
    case ApplyResult::duplicate: return "duplicate";
    }
    return "?";
}

bool DedupIndex::seen_or_remember(const Id128& origin, std::uint64_t sequence) {
    OriginWindow& w = origins_[origin];
    if (w.seen.count(sequence)) return true;
    w.seen.insert(sequence);
    w.order.push_back(sequence);
    while (w.order.size() > window_) {
        w.seen.erase(w.order.front());
        w.order.pop_front();
    }
    return false;
}

ApplyResult MutationApplier::apply(const ReplicationDatagram& d) {
    if (d.op == WireOp::heartbeat) return ApplyResult::applied;
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (dedup_.seen_or_remember(d.origin, d.sequence)) return ApplyResult::duplicate;
    }
    ApplyOutcome outcome = d.op == WireOp::upsert
                               ? registry_.apply_upsert(*d.record)
                               : registry_.apply_delete(d.deletion->service_id, d.deletion->stamp);
    return outcome == ApplyOutcome::applied ? ApplyResult::applied : ApplyResult::stale;
}

Publisher::Publisher(UdpSocket& socket, PeerSet peers, const Id128& origin)
    : socket_(socket), peers_(std::move(peers)), origin_(origin) {
    targets_.reserve(peers_.endpoints.size());
    for (const auto& ep : peers_.endpoints) targets_.push_back(resolve_ipv4(ep));
}

std::size_t Publisher::send_datagram(const ReplicationDatagram& d) {
    if (!enabled()) return 0;
    auto bytes = encode_datagram(d);
    std::size_t sent = 0;
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        if (socket_.send_to(targets_[i], bytes.data(), bytes.size()))
            ++sent;
        else
            GD_LOG_WARN("replication: send to ", peers_.endpoints[i].str(), " failed");
    }
    return sent;
}

std::size_t Publisher::publish_record(const ServiceRecord& record) {
    if (!enabled()) return 0;
    return send_datagram(ReplicationDatagram::upsert(origin_, ++seq_, record));
}

std::size_t Publisher::publish_delete(const Id128& service_id, const VersionStamp& stamp) {
    if (!enabled()) return 0;
    return send_datagram(ReplicationDatagram::del(origin_, ++seq_, service_id, stamp));
}

std::size_t Publisher::publish_heartbeat() {
    if (!enabled()) return 0;
    return send_datagram(ReplicationDatagram::heartbeat(origin_, ++seq_));
}

std::size_t Publisher::startup_sync(const std::vector<ServiceRecord>& live) {
    if (!enabled()) return 0;
    if (peers_.mode == PeerSet::Mode::hub) publish_heartbeat();
    std::size_t sent = 0;
    for (const auto& rec : live) sent += publish_record(rec);
    return sent;
}

void Membership::observe(const Id128& origin, const sockaddr_in& from, Micros now) {
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = nodes_.try_emplace(origin);
    it->second.addr = from;
    it->second.last_seen = now;
    if (inserted)
        GD_LOG_INFO("hub: learned node ", origin.str(), " at ", sockaddr_str(from));
}

std::vector<sockaddr_in> Membership::targets_except(const Id128& origin) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<sockaddr_in> out;
    out.reserve(nodes_.size());
    for (const auto& [id, entry] : nodes_)
        if (id != origin) out.push_back(entry.addr);
    return out;
}

void Membership::prune(Micros now, Micros silence_micros) {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto it = nodes_.begin(); it != nodes_.end();) {
        if (now - it->second.last_seen > silence_micros) {
            GD_LOG_INFO("hub: dropping silent node ", it->first.str());
            it = nodes_.erase(it);
        } else {
            ++it;
        }
    }
}

std::size_t Membership::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return nodes_.size();
}

std::optional<ApplyResult> ReplicationService::handle_packet(const std::uint8_t* data,
                                                             std::size_t len,
                                                             const sockaddr_in& from, Micros now) {
    ReplicationDatagram d;
    try {
        d = decode_datagram(data, len);
    } catch (const DecodeError& e) {
        GD_LOG_WARN("replication: dropping packet from ", sockaddr_str(from), ": ", e.what());
        return std::nullopt;
    }
    if (d.origin == self_) return std::nullopt;

    if (hub_role_) membership_.observe(d.origin, from, now);
    ApplyResult result = applier_.apply(d);
    if (d.op != WireOp::heartbeat) {
        GD_LOG_DEBUG("replication: ", to_string(result), " seq ", d.sequence, " from ",
                     d.origin.str());
        if (hub_role_ && result != ApplyResult::duplicate) {
            for (const auto& target : membership_.targets_except(d.origin))
                socket_.send_to(target, data, len);
        }
    }
    return result;
}

} // namespace griddisc
