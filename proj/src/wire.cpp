#include "griddisc/wire.hpp"

#include "griddisc/errors.hpp"

#include <limits>

namespace griddisc {

namespace {

constexpr std::uint64_t kInt64Max = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());

std::int64_t checked_time(std::uint64_t v, const char* what) {
    if (v > kInt64Max) throw MalformedPayload(std::string(what) + " out of range");
    return static_cast<std::int64_t>(v);
}

Id128 decode_id_string(XdrDecoder& dec, const char* what) {
    auto parsed = Id128::parse(dec.get_string());
    if (!parsed) throw MalformedPayload(std::string(what) + " is not a canonical id");
    return *parsed;
}

VersionStamp decode_stamp(XdrDecoder& dec) {
    VersionStamp s;
    s.wall_micros = checked_time(dec.get_u64(), "stamp wall_micros");
    dec.get_raw(s.origin.bytes.data(), 16);
    return s;
}

void encode_stamp(XdrEncoder& enc, const VersionStamp& s) {
    enc.put_u64(static_cast<std::uint64_t>(s.wall_micros));
    enc.put_raw(s.origin.bytes.data(), 16);
}

} // namespace

ReplicationDatagram ReplicationDatagram::upsert(const Id128& origin, std::uint64_t seq,
                                                ServiceRecord rec) {
    ReplicationDatagram d;
    d.op = WireOp::upsert;
    d.origin = origin;
    d.sequence = seq;
    d.record = std::move(rec);
    return d;
}

ReplicationDatagram ReplicationDatagram::del(const Id128& origin, std::uint64_t seq, const Id128& id,
                                             const VersionStamp& stamp) {
    ReplicationDatagram d;
    d.op = WireOp::del;
    d.origin = origin;
    d.sequence = seq;
    d.deletion = DeletePayload{id, stamp};
    return d;
}

ReplicationDatagram ReplicationDatagram::heartbeat(const Id128& origin, std::uint64_t seq) {
    ReplicationDatagram d;
    d.op = WireOp::heartbeat;
    d.origin = origin;
    d.sequence = seq;
    return d;
}

void encode_record(XdrEncoder& enc, const ServiceRecord& r) {
    enc.put_string(r.service_id.str());
    enc.put_string(r.name);
    enc.put_string(r.server_url);
    enc.put_u32(static_cast<std::uint32_t>(r.methods.size()));
    for (const auto& m : r.methods) enc.put_string(m);
    enc.put_u32(static_cast<std::uint32_t>(r.attributes.size()));
    for (const auto& [k, v] : r.attributes) {
        enc.put_string(k);
        enc.put_string(v);
    }
    enc.put_u64(static_cast<std::uint64_t>(r.lease.granted_at));
    enc.put_u32(static_cast<std::uint32_t>(r.lease.duration_secs));
    enc.put_u64(static_cast<std::uint64_t>(r.lease.expires_at));
    encode_stamp(enc, r.stamp);
    enc.put_u32(r.tombstone ? 1 : 0);
}

ServiceRecord decode_record(XdrDecoder& dec) {
    ServiceRecord r;
    r.service_id = decode_id_string(dec, "service_id");
    r.name = dec.get_string();
    r.server_url = dec.get_string();

    std::uint32_t n_methods = dec.get_u32();
    // Every encoded string needs at least 4 bytes; reject counts the
    // remaining bytes cannot possibly hold before allocating.
    if (n_methods > dec.remaining() / 4) throw TruncatedPacket("method count exceeds payload");
    r.methods.reserve(n_methods);
    for (std::uint32_t i = 0; i < n_methods; ++i) r.methods.push_back(dec.get_string());

    std::uint32_t n_attrs = dec.get_u32();
    if (n_attrs > dec.remaining() / 8) throw TruncatedPacket("attribute count exceeds payload");
    std::string prev_key;
    for (std::uint32_t i = 0; i < n_attrs; ++i) {
        std::string key = dec.get_string();
        std::string value = dec.get_string();
        if (i > 0 && !(prev_key < key))
            throw MalformedPayload("attribute keys not strictly ascending");
        prev_key = key;
        r.attributes.emplace(std::move(key), std::move(value));
    }

    r.lease.granted_at = checked_time(dec.get_u64(), "lease granted_at");
    r.lease.duration_secs = dec.get_u32();
    r.lease.expires_at = checked_time(dec.get_u64(), "lease expires_at");
    if (r.lease.duration_secs < 1 || r.lease.duration_secs > kMaxLeaseSecs)
        throw MalformedPayload("lease duration out of range");
    if (r.lease.expires_at != r.lease.granted_at + r.lease.duration_secs * kMicrosPerSec)
        throw MalformedPayload("lease expiry inconsistent with grant");

    r.stamp = decode_stamp(dec);

    std::uint32_t tomb = dec.get_u32();
    if (tomb > 1) throw MalformedPayload("tombstone flag not 0/1");
    r.tombstone = tomb == 1;
    if (r.tombstone && (!r.methods.empty() || !r.attributes.empty()))
        throw MalformedPayload("tombstone carries methods or attributes");
    if (!r.tombstone && r.name.empty()) throw MalformedPayload("live record with empty name");
    return r;
}

std::vector<std::uint8_t> encode_record_bytes(const ServiceRecord& r) {
    XdrEncoder enc;
    encode_record(enc, r);
    return enc.take();
}

std::vector<std::uint8_t> encode_datagram(const ReplicationDatagram& d) {
    XdrEncoder enc;
    enc.put_u32(kWireMagic);
    enc.put_u32(kWireVersion);
    enc.put_u32(static_cast<std::uint32_t>(d.op));
    enc.put_raw(d.origin.bytes.data(), 16);
    enc.put_u64(d.sequence);
    switch (d.op) {
    case WireOp::upsert:
        encode_record(enc, *d.record);
        break;
    case WireOp::del:
        enc.put_string(d.deletion->service_id.str());
        encode_stamp(enc, d.deletion->stamp);
        break;
    case WireOp::heartbeat:
        break;
    }
    if (enc.size() > kMaxDatagramBytes)
        throw PayloadTooLarge("datagram encodes to " + std::to_string(enc.size()) + " bytes (max " +
                              std::to_string(kMaxDatagramBytes) + ")");
    return enc.take();
}

ReplicationDatagram decode_datagram(const std::uint8_t* data, std::size_t len) {
    if (len > kMaxDatagramBytes) throw MalformedPayload("datagram exceeds 8192 bytes");
    XdrDecoder dec(data, len);
    if (dec.get_u32() != kWireMagic) throw BadMagic("bad magic");
    std::uint32_t version = dec.get_u32();
    if (version != kWireVersion)
        throw UnsupportedVersion("protocol version " + std::to_string(version));
    std::uint32_t op = dec.get_u32();
    if (op > 2) throw MalformedPayload("unknown op " + std::to_string(op));

    ReplicationDatagram d;
    d.op = static_cast<WireOp>(op);
    dec.get_raw(d.origin.bytes.data(), 16);
    d.sequence = dec.get_u64();
    switch (d.op) {
    case WireOp::upsert:
        d.record = decode_record(dec);
        break;
    case WireOp::del: {
        DeletePayload del;
        del.service_id = decode_id_string(dec, "service_id");
        del.stamp = decode_stamp(dec);
        d.deletion = del;
        break;
    }
    case WireOp::heartbeat:
        break;
    }
    dec.expect_end();
    return d;
}

} // namespace griddisc
