#pragma once

#include "griddisc/record.hpp"
#include "griddisc/xdr.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace griddisc {

// UDP replication wire format, version 1. Fixed 36-byte header, then an
// XDR payload selected by op. Big-endian, 4-byte aligned throughout.
//
//   0   magic        u32 = 0x47444953 ("GDIS")
//   4   version      u32 = 1
//   8   op           u32 (0=UPSERT, 1=DELETE, 2=HEARTBEAT)
//   12  origin_node  16 raw bytes
//   28  sequence     u64
//   36  payload

constexpr std::uint32_t kWireMagic = 0x47444953;
constexpr std::uint32_t kWireVersion = 1;
constexpr std::size_t kWireHeaderBytes = 36;
constexpr std::size_t kMaxDatagramBytes = 8192;

enum class WireOp : std::uint32_t { upsert = 0, del = 1, heartbeat = 2 };

struct DeletePayload {
    Id128 service_id{};
    VersionStamp stamp;

    bool operator==(const DeletePayload&) const = default;
};

struct ReplicationDatagram {
    WireOp op = WireOp::heartbeat;
    Id128 origin{};
    std::uint64_t sequence = 0;
    std::optional<ServiceRecord> record;    // present iff op == upsert
    std::optional<DeletePayload> deletion;  // present iff op == del

    bool operator==(const ReplicationDatagram&) const = default;

    static ReplicationDatagram upsert(const Id128& origin, std::uint64_t seq, ServiceRecord rec);
    static ReplicationDatagram del(const Id128& origin, std::uint64_t seq, const Id128& id,
                                   const VersionStamp& stamp);
    static ReplicationDatagram heartbeat(const Id128& origin, std::uint64_t seq);
};

// Record payload codec, shared by UPSERT datagrams and storage-log entries.
void encode_record(XdrEncoder& enc, const ServiceRecord& r);
ServiceRecord decode_record(XdrDecoder& dec);
std::vector<std::uint8_t> encode_record_bytes(const ServiceRecord& r);

// Throws PayloadTooLarge when the encoding would exceed kMaxDatagramBytes.
std::vector<std::uint8_t> encode_datagram(const ReplicationDatagram& d);

// Hostile input allowed; throws typed DecodeError subclasses, never aborts.
ReplicationDatagram decode_datagram(const std::uint8_t* data, std::size_t len);
inline ReplicationDatagram decode_datagram(const std::vector<std::uint8_t>& bytes) {
    return decode_datagram(bytes.data(), bytes.size());
}

} // namespace griddisc
