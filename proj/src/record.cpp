#include "griddisc/record.hpp"

#include "griddisc/errors.hpp"

#include <algorithm>

namespace griddisc {

Lease make_lease(Micros now, std::int64_t secs) {
    if (secs < 1 || secs > kMaxLeaseSecs)
        throw LeaseOutOfRange("lease duration " + std::to_string(secs) + "s outside [1, 2^31-1]");
    Lease l;
    l.granted_at = now;
    l.duration_secs = secs;
    l.expires_at = now + secs * kMicrosPerSec;
    return l;
}

VersionStamp next_stamp(Micros now, const Id128& origin, const std::optional<VersionStamp>& current) {
    VersionStamp s{now, origin};
    if (current && !(*current < s)) s.wall_micros = current->wall_micros + 1;
    return s;
}

bool name_matches(const std::string& pattern, const std::string& name) {
    if (!pattern.empty() && pattern.back() == '*') {
        std::string_view prefix(pattern.data(), pattern.size() - 1);
        return std::string_view(name).substr(0, prefix.size()) == prefix;
    }
    return name == pattern;
}

bool QueryFilter::matches(const ServiceRecord& r) const {
    if (name_pattern && !name_matches(*name_pattern, r.name)) return false;
    if (server_url && r.server_url != *server_url) return false;
    for (const auto& [key, value] : required_attrs) {
        auto it = r.attributes.find(key);
        if (it == r.attributes.end()) return false;
        if (value && it->second != *value) return false;
    }
    return true;
}

void sort_results(std::vector<ServiceRecord>& records) {
    std::sort(records.begin(), records.end(), [](const ServiceRecord& a, const ServiceRecord& b) {
        return std::tie(a.name, a.service_id) < std::tie(b.name, b.service_id);
    });
}

} // namespace griddisc
