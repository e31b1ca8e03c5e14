#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace griddisc {

// Wall-clock microseconds since the Unix epoch.
using Micros = std::int64_t;

constexpr Micros kMicrosPerSec = 1'000'000;

// All registry operations take an explicit `now`; the daemon passes real
// time through a Clock, tests pass a ManualClock.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Micros now_micros() = 0;
};

class SystemClock final : public Clock {
public:
    Micros now_micros() override {
        using namespace std::chrono;
        return duration_cast<microseconds>(system_clock::now().time_since_epoch()).count();
    }

    static SystemClock& instance() {
        static SystemClock clock;
        return clock;
    }
};

class ManualClock final : public Clock {
public:
    explicit ManualClock(Micros start = 0) : now_(start) {}

    Micros now_micros() override { return now_.load(); }

    void set(Micros t) { now_.store(t); }
    void advance(Micros delta) { now_.fetch_add(delta); }
    void advance_secs(std::int64_t secs) { advance(secs * kMicrosPerSec); }

private:
    std::atomic<Micros> now_;
};

// Monotonic clock for latency measurement; unrelated to lease time.
inline Micros steady_micros() {
    using namespace std::chrono;
    return duration_cast<microseconds>(steady_clock::now().time_since_epoch()).count();
}

} // namespace griddisc
