#include "griddisc/wire.hpp"

#include "griddisc/errors.hpp"
#include "support/generators.hpp"

#include <doctest.h>

using namespace griddisc;
using testsup::test_id;

namespace {

// Test-local mini encoder, independent of XdrEncoder, used to hand-build
// expected layouts and hostile payloads.
struct Raw {
    std::vector<std::uint8_t> bytes;

    void u32(std::uint32_t v) {
        bytes.insert(bytes.end(), {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                                   static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)});
    }
    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v));
    }
    void raw(const void* p, std::size_t n) {
        auto c = static_cast<const std::uint8_t*>(p);
        bytes.insert(bytes.end(), c, c + n);
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
        while (bytes.size() % 4 != 0) bytes.push_back(0);
    }
    void header(std::uint32_t op, const Id128& origin, std::uint64_t seq) {
        u32(0x47444953);
        u32(1);
        u32(op);
        raw(origin.bytes.data(), 16);
        u64(seq);
    }
};

ServiceRecord sample_record() {
    ServiceRecord r;
    r.service_id = test_id(1);
    r.name = "calc";
    r.server_url = "http://a:1";
    r.methods = {"add"};
    r.attributes = {{"k", "v"}};
    r.lease = make_lease(1'000'000, 300);
    r.stamp = VersionStamp{42, test_id(2)};
    return r;
}

void encode_sample_payload(Raw& raw, const ServiceRecord& r) {
    raw.str(r.service_id.str());
    raw.str(r.name);
    raw.str(r.server_url);
    raw.u32(static_cast<std::uint32_t>(r.methods.size()));
    for (const auto& m : r.methods) raw.str(m);
    raw.u32(static_cast<std::uint32_t>(r.attributes.size()));
    for (const auto& [k, v] : r.attributes) {
        raw.str(k);
        raw.str(v);
    }
    raw.u64(static_cast<std::uint64_t>(r.lease.granted_at));
    raw.u32(static_cast<std::uint32_t>(r.lease.duration_secs));
    raw.u64(static_cast<std::uint64_t>(r.lease.expires_at));
    raw.u64(static_cast<std::uint64_t>(r.stamp.wall_micros));
    raw.raw(r.stamp.origin.bytes.data(), 16);
    raw.u32(r.tombstone ? 1 : 0);
}

} // namespace

TEST_CASE("heartbeat encodes to exactly 36 bytes with the documented layout") {
    Id128 origin = test_id(0x1234);
    auto bytes = encode_datagram(ReplicationDatagram::heartbeat(origin, 7));
    REQUIRE(bytes.size() == 36);

    Raw expect;
    expect.header(2, origin, 7);
    CHECK(bytes == expect.bytes);
    // magic spells "GDIS"
    CHECK(bytes[0] == 'G');
    CHECK(bytes[1] == 'D');
    CHECK(bytes[2] == 'I');
    CHECK(bytes[3] == 'S');
}

TEST_CASE("upsert layout matches a hand-built field-by-field encoding") {
    ServiceRecord r = sample_record();
    auto bytes = encode_datagram(ReplicationDatagram::upsert(test_id(9), 3, r));

    Raw expect;
    expect.header(0, test_id(9), 3);
    encode_sample_payload(expect, r);
    CHECK(bytes == expect.bytes);
    CHECK(bytes.size() == 180); // 36 header + 144 payload for this record
}

TEST_CASE("delete layout matches a hand-built encoding") {
    VersionStamp stamp{77, test_id(5)};
    auto bytes = encode_datagram(ReplicationDatagram::del(test_id(9), 4, test_id(1), stamp));

    Raw expect;
    expect.header(1, test_id(9), 4);
    expect.str(test_id(1).str());
    expect.u64(77);
    expect.raw(test_id(5).bytes.data(), 16);
    CHECK(bytes == expect.bytes);
}

TEST_CASE("10k random datagrams round-trip bit-exactly") {
    testsup::Rng rng(0xD16);
    for (int i = 0; i < 10'000; ++i) {
        ReplicationDatagram d = testsup::random_datagram(rng);
        auto bytes = encode_datagram(d);
        ReplicationDatagram back = decode_datagram(bytes);
        CHECK(back == d);
        CHECK(encode_datagram(back) == bytes);
    }
}

TEST_CASE("oversized records are rejected at encode time, never fragmented") {
    ServiceRecord r = sample_record();
    r.methods.assign(400, std::string(30, 'x'));
    CHECK_THROWS_AS(encode_datagram(ReplicationDatagram::upsert(test_id(9), 1, r)),
                    PayloadTooLarge);
    // and a record near but under the bound is fine
    r.methods.assign(200, std::string(30, 'x'));
    CHECK_NOTHROW(encode_datagram(ReplicationDatagram::upsert(test_id(9), 1, r)));
}

TEST_CASE("decode rejects bad magic, bad version, unknown op, trailing bytes") {
    auto valid = encode_datagram(ReplicationDatagram::heartbeat(test_id(1), 1));

    auto bad_magic = valid;
    bad_magic[0] ^= 0xff;
    CHECK_THROWS_AS(decode_datagram(bad_magic), BadMagic);

    auto bad_version = valid;
    bad_version[7] = 9;
    CHECK_THROWS_AS(decode_datagram(bad_version), UnsupportedVersion);

    auto bad_op = valid;
    bad_op[11] = 3;
    CHECK_THROWS_AS(decode_datagram(bad_op), MalformedPayload);

    auto trailing = valid;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_datagram(trailing), MalformedPayload);

    std::vector<std::uint8_t> oversize(kMaxDatagramBytes + 1, 0);
    CHECK_THROWS_AS(decode_datagram(oversize), MalformedPayload);
}

TEST_CASE("every strict prefix of a valid packet is a typed decode error") {
    auto bytes = encode_datagram(ReplicationDatagram::upsert(test_id(9), 3, sample_record()));
    CHECK_THROWS_AS(decode_datagram(bytes.data(), bytes.size() - 1), TruncatedPacket);
    for (std::size_t len = 0; len < bytes.size(); ++len) {
        CHECK_THROWS_AS(decode_datagram(bytes.data(), len), DecodeError);
    }
}

TEST_CASE("semantic payload validation") {
    Id128 origin = test_id(9);

    SUBCASE("nonzero string padding") {
        ServiceRecord r = sample_record(); // name "calc" has no padding; "http://a:1" pads 2
        auto bytes = encode_datagram(ReplicationDatagram::upsert(origin, 1, r));
        // server_url payload: header(36) + id str(40) + name(8) + len(4) + 10 chars
        std::size_t pad_off = 36 + 40 + 8 + 4 + 10;
        REQUIRE(bytes[pad_off] == 0);
        bytes[pad_off] = 0xAB;
        CHECK_THROWS_AS(decode_datagram(bytes), MalformedPayload);
    }

    SUBCASE("attribute keys must be strictly ascending") {
        Raw raw;
        raw.header(0, origin, 1);
        raw.str(test_id(1).str());
        raw.str("calc");
        raw.str("http://a:1");
        raw.u32(0);          // methods
        raw.u32(2);          // attrs out of order
        raw.str("b");
        raw.str("1");
        raw.str("a");
        raw.str("2");
        raw.u64(1'000'000);
        raw.u32(300);
        raw.u64(301'000'000);
        raw.u64(42);
        raw.raw(test_id(2).bytes.data(), 16);
        raw.u32(0);
        CHECK_THROWS_AS(decode_datagram(raw.bytes), MalformedPayload);
    }

    SUBCASE("lease must be internally consistent") {
        Raw raw;
        raw.header(0, origin, 1);
        raw.str(test_id(1).str());
        raw.str("calc");
        raw.str("http://a:1");
        raw.u32(0);
        raw.u32(0);
        raw.u64(1'000'000);
        raw.u32(300);
        raw.u64(999); // expires != granted + 300s
        raw.u64(42);
        raw.raw(test_id(2).bytes.data(), 16);
        raw.u32(0);
        CHECK_THROWS_AS(decode_datagram(raw.bytes), MalformedPayload);
    }

    SUBCASE("tombstones carry no methods or attributes; live records need a name") {
        ServiceRecord tomb = sample_record();
        tomb.tombstone = true; // but methods/attrs still set
        Raw raw;
        raw.header(0, origin, 1);
        encode_sample_payload(raw, tomb);
        CHECK_THROWS_AS(decode_datagram(raw.bytes), MalformedPayload);

        ServiceRecord nameless = sample_record();
        nameless.name.clear();
        Raw raw2;
        raw2.header(0, origin, 1);
        encode_sample_payload(raw2, nameless);
        CHECK_THROWS_AS(decode_datagram(raw2.bytes), MalformedPayload);
    }

    SUBCASE("absurd counts are truncation, not allocation") {
        Raw raw;
        raw.header(0, origin, 1);
        raw.str(test_id(1).str());
        raw.str("calc");
        raw.str("http://a:1");
        raw.u32(0xFFFFFFFF); // methods count
        CHECK_THROWS_AS(decode_datagram(raw.bytes), TruncatedPacket);
    }

    SUBCASE("service_id must be canonical") {
        Raw raw;
        raw.header(1, origin, 1);
        raw.str("not-an-id");
        raw.u64(42);
        raw.raw(test_id(2).bytes.data(), 16);
        CHECK_THROWS_AS(decode_datagram(raw.bytes), MalformedPayload);
    }
}

TEST_CASE("fuzz: 10k hostile byte strings never crash and stay canonical") {
    testsup::Rng rng(0xF022);
    int decoded = 0, rejected = 0;
    for (int i = 0; i < 10'000; ++i) {
        std::vector<std::uint8_t> bytes;
        if (rng.chance(0.5)) {
            // pure noise
            std::size_t n = static_cast<std::size_t>(rng.range(0, 128));
            for (std::size_t k = 0; k < n; ++k)
                bytes.push_back(static_cast<std::uint8_t>(rng.range(0, 255)));
        } else {
            // mutilated valid packet
            bytes = encode_datagram(testsup::random_datagram(rng));
            std::size_t flips = static_cast<std::size_t>(rng.range(1, 4));
            for (std::size_t k = 0; k < flips && !bytes.empty(); ++k)
                bytes[static_cast<std::size_t>(rng.range(0, bytes.size() - 1))] ^=
                    static_cast<std::uint8_t>(rng.range(1, 255));
            if (rng.chance(0.3)) bytes.resize(static_cast<std::size_t>(rng.range(0, bytes.size())));
        }
        try {
            ReplicationDatagram d = decode_datagram(bytes);
            // acceptance implies canonicality: re-encoding reproduces input
            CHECK(encode_datagram(d) == bytes);
            ++decoded;
        } catch (const DecodeError&) {
            ++rejected;
        }
    }
    CHECK(decoded + rejected == 10'000);
    CHECK(rejected > 0);
}
