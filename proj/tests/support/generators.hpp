#pragma once

// Shared test support: deterministic id/clock sources, random domain-value
// generators, and the independent brute-force oracles the suites check
// implementations against. Nothing here may call into the code path under
// test (the oracles filter plain vectors).

#include "griddisc/record.hpp"
#include "griddisc/wire.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace testsup {

using namespace griddisc;

// Id with a recognizable big-endian counter tail; ordering matches n.
inline Id128 test_id(std::uint64_t n) {
    Id128 id;
    for (int i = 0; i < 8; ++i) id.bytes[15 - i] = static_cast<std::uint8_t>(n >> (8 * i));
    return id;
}

// Deterministic sequential id source for reproducible registries.
inline IdGen counter_ids(std::uint64_t start = 1) {
    auto next = std::make_shared<std::uint64_t>(start);
    return [next] { return test_id((*next)++); };
}

struct Rng {
    std::mt19937_64 eng;

    explicit Rng(std::uint64_t seed) : eng(seed) {}

    std::int64_t range(std::int64_t lo, std::int64_t hi) { // inclusive
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng);
    }
    bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(eng) < p; }
    std::string word(std::size_t min_len = 1, std::size_t max_len = 12) {
        static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789-._/:";
        std::string s;
        std::size_t n = static_cast<std::size_t>(range(static_cast<std::int64_t>(min_len),
                                                       static_cast<std::int64_t>(max_len)));
        for (std::size_t i = 0; i < n; ++i)
            s.push_back(alphabet[range(0, sizeof(alphabet) - 2)]);
        return s;
    }
    Id128 id() {
        Id128 out;
        for (auto& b : out.bytes) b = static_cast<std::uint8_t>(range(0, 255));
        return out;
    }
};

inline Lease random_lease(Rng& rng) {
    Lease l;
    l.granted_at = rng.range(0, 4'000'000'000'000'000);
    l.duration_secs = rng.range(1, kMaxLeaseSecs);
    l.expires_at = l.granted_at + l.duration_secs * kMicrosPerSec;
    return l;
}

inline VersionStamp random_stamp(Rng& rng) {
    return VersionStamp{rng.range(0, 4'000'000'000'000'000), rng.id()};
}

inline ServiceRecord random_record(Rng& rng, bool allow_tombstone = true) {
    ServiceRecord r;
    r.service_id = rng.id();
    r.tombstone = allow_tombstone && rng.chance(0.15);
    r.name = r.tombstone && rng.chance(0.3) ? std::string() : rng.word();
    r.server_url = rng.chance(0.9) ? "http://" + rng.word() + ":" + std::to_string(rng.range(1, 65535))
                                   : std::string();
    if (!r.tombstone) {
        std::size_t n_methods = static_cast<std::size_t>(rng.range(0, 4));
        for (std::size_t i = 0; i < n_methods; ++i) r.methods.push_back(rng.word());
        std::size_t n_attrs = static_cast<std::size_t>(rng.range(0, 4));
        for (std::size_t i = 0; i < n_attrs; ++i) r.attributes[rng.word()] = rng.word(0, 10);
    }
    r.lease = random_lease(rng);
    r.stamp = random_stamp(rng);
    return r;
}

inline ReplicationDatagram random_datagram(Rng& rng) {
    switch (rng.range(0, 2)) {
    case 0:
        return ReplicationDatagram::upsert(rng.id(), static_cast<std::uint64_t>(rng.range(0, 1 << 30)),
                                           random_record(rng));
    case 1:
        return ReplicationDatagram::del(rng.id(), static_cast<std::uint64_t>(rng.range(0, 1 << 30)),
                                        rng.id(), random_stamp(rng));
    default:
        return ReplicationDatagram::heartbeat(rng.id(),
                                              static_cast<std::uint64_t>(rng.range(0, 1 << 30)));
    }
}

// ---- independent oracles ----

// Brute-force query evaluation over a plain record list.
inline std::vector<ServiceRecord> oracle_query(const std::vector<ServiceRecord>& all,
                                               const QueryFilter& filter, Micros now) {
    std::vector<ServiceRecord> out;
    for (const auto& r : all) {
        if (r.tombstone || r.lease.expires_at <= now) continue;
        if (filter.name_pattern) {
            const std::string& p = *filter.name_pattern;
            bool prefix = !p.empty() && p.back() == '*';
            if (prefix) {
                if (r.name.compare(0, p.size() - 1, p, 0, p.size() - 1) != 0) continue;
            } else if (r.name != p) {
                continue;
            }
        }
        if (filter.server_url && r.server_url != *filter.server_url) continue;
        bool attrs_ok = true;
        for (const auto& [k, v] : filter.required_attrs) {
            auto it = r.attributes.find(k);
            if (it == r.attributes.end() || (v && it->second != *v)) {
                attrs_ok = false;
                break;
            }
        }
        if (!attrs_ok) continue;
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](const ServiceRecord& a, const ServiceRecord& b) {
        if (a.name != b.name) return a.name < b.name;
        return a.service_id < b.service_id;
    });
    return out;
}

// Canonical byte serialization of a record list, for byte-identical
// cross-node and cross-backend comparisons.
inline std::vector<std::uint8_t> canonical_bytes(const std::vector<ServiceRecord>& records) {
    std::vector<std::uint8_t> out;
    for (const auto& r : records) {
        auto one = encode_record_bytes(r);
        out.insert(out.end(), one.begin(), one.end());
    }
    return out;
}

} // namespace testsup
