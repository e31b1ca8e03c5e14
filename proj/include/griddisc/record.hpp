#pragma once

#include "griddisc/clock.hpp"
#include "griddisc/ids.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace griddisc {

constexpr std::int64_t kMaxLeaseSecs = 2147483647; // 2^31 - 1

// Lifetime contract. expires_at is always granted_at + duration * 1e6.
struct Lease {
    Micros granted_at = 0;
    std::int64_t duration_secs = 1;
    Micros expires_at = 0;

    bool operator==(const Lease&) const = default;
};

// Throws LeaseOutOfRange unless secs is in [1, 2^31-1].
Lease make_lease(Micros now, std::int64_t secs);

// Orders every replicated mutation: (wall_micros, origin bytes) lexicographic.
struct VersionStamp {
    Micros wall_micros = 0;
    Id128 origin{};

    auto operator<=>(const VersionStamp&) const = default;
};

// Stamp for a fresh local mutation of a record currently holding `current`.
// Guarantees the result strictly exceeds `current` even under clock ties
// or a clock that stepped backwards.
VersionStamp next_stamp(Micros now, const Id128& origin, const std::optional<VersionStamp>& current);

// One discoverable service. Tombstones are retained deletion markers:
// they carry no methods or attributes and never match queries. A tombstone
// synthesized from a remote delete of an unknown id has an empty name.
struct ServiceRecord {
    Id128 service_id{};
    std::string name;
    std::string server_url;
    std::vector<std::string> methods;
    std::map<std::string, std::string> attributes;
    Lease lease;
    VersionStamp stamp;
    bool tombstone = false;

    bool operator==(const ServiceRecord&) const = default;
};

// True when the record may appear in query results at time `now`.
inline bool record_live(const ServiceRecord& r, Micros now) {
    return !r.tombstone && r.lease.expires_at > now;
}

// Registration input; attributes arrive as pairs so duplicate keys are
// detectable before they collapse into the stored map.
struct RecordInput {
    std::string name;
    std::string server_url;
    std::vector<std::string> methods;
    std::vector<std::pair<std::string, std::string>> attributes;
};

// Declarative match used by all find* calls. Empty filter matches every
// live record. name_pattern is exact, or a prefix match when it ends
// with '*'; attributes and server_url match exactly.
struct QueryFilter {
    std::optional<std::string> name_pattern;
    std::optional<std::string> server_url;
    std::vector<std::pair<std::string, std::optional<std::string>>> required_attrs;

    bool matches(const ServiceRecord& r) const;
};

bool name_matches(const std::string& pattern, const std::string& name);

// Deterministic result order: (name, service_id) ascending.
void sort_results(std::vector<ServiceRecord>& records);

} // namespace griddisc
