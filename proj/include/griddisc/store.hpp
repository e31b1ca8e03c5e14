#pragma once

#include "griddisc/record.hpp"

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace griddisc {

struct BackendDescriptor {
    enum class Kind { memory, persistent };

    Kind kind = Kind::memory;
    std::filesystem::path location;            // required iff kind == persistent
    std::optional<std::size_t> capacity_limit; // memory backend only

    static BackendDescriptor memory(std::optional<std::size_t> capacity = std::nullopt) {
        return BackendDescriptor{Kind::memory, {}, capacity};
    }
    static BackendDescriptor persistent(std::filesystem::path dir) {
        return BackendDescriptor{Kind::persistent, std::move(dir), std::nullopt};
    }
};

// Filled at open time by the persistent backend; memory backend reports zeros.
struct RecoveryReport {
    std::size_t records_recovered = 0;
    bool truncated = false; // a torn or corrupt tail was cut off
};

// Uniform repository seam. Handles are shared across threads:
// single-writer, multi-reader; scan returns a point-in-time snapshot
// ordered by service_id.
class Store {
public:
    virtual ~Store() = default;

    virtual void put(const ServiceRecord& record) = 0;
    virtual std::optional<ServiceRecord> get(const Id128& service_id) const = 0;
    virtual bool erase(const Id128& service_id) = 0;
    virtual std::vector<ServiceRecord> scan() const = 0;
    virtual std::size_t size() const = 0;
    virtual void close() = 0;

    virtual BackendDescriptor::Kind kind() const = 0;
    virtual RecoveryReport recovery() const { return {}; }
};

// Throws IoFailure when the descriptor cannot be opened.
std::shared_ptr<Store> open_store(const BackendDescriptor& descriptor);

} // namespace griddisc
