#include "griddisc/errors.hpp"
#include "griddisc/store.hpp"

#include <map>
#include <mutex>
#include <shared_mutex>

namespace griddisc {

namespace {

class MemoryStore final : public Store {
public:
    explicit MemoryStore(std::optional<std::size_t> capacity) : capacity_(capacity) {}

    void put(const ServiceRecord& record) override {
        std::unique_lock lock(mu_);
        auto it = records_.find(record.service_id);
        if (it == records_.end()) {
            if (capacity_ && records_.size() >= *capacity_)
                throw CapacityExceeded("memory backend at capacity " + std::to_string(*capacity_));
            records_.emplace(record.service_id, record);
        } else {
            it->second = record;
        }
    }

    std::optional<ServiceRecord> get(const Id128& id) const override {
        std::shared_lock lock(mu_);
        auto it = records_.find(id);
        if (it == records_.end()) return std::nullopt;
        return it->second;
    }

    bool erase(const Id128& id) override {
        std::unique_lock lock(mu_);
        return records_.erase(id) > 0;
    }

    std::vector<ServiceRecord> scan() const override {
        std::shared_lock lock(mu_);
        std::vector<ServiceRecord> out;
        out.reserve(records_.size());
        for (const auto& [_, rec] : records_) out.push_back(rec);
        return out; // std::map keeps service_id order
    }

    std::size_t size() const override {
        std::shared_lock lock(mu_);
        return records_.size();
    }

    void close() override {}

    BackendDescriptor::Kind kind() const override { return BackendDescriptor::Kind::memory; }

private:
    mutable std::shared_mutex mu_;
    std::map<Id128, ServiceRecord> records_;
    std::optional<std::size_t> capacity_;
};

} // namespace

std::shared_ptr<Store> make_memory_store(std::optional<std::size_t> capacity) {
    return std::make_shared<MemoryStore>(capacity);
}

} // namespace griddisc
