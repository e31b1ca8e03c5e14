#pragma once

#include "griddisc/udp.hpp"

#include <atomic>
#include <cstdint>
#include <thread>

namespace griddisc {

// Loopback UDP forwarder with seeded impairment: drops packets with
// probability `loss` and delays the rest by a fixed `delay_ms`. Stands in
// for WAN conditions in the replication benchmark.
class UdpProxy {
public:
    UdpProxy(Endpoint target, double loss, int delay_ms, std::uint64_t seed = 1);
    ~UdpProxy();

    UdpProxy(const UdpProxy&) = delete;
    UdpProxy& operator=(const UdpProxy&) = delete;

    void start(); // binds an ephemeral loopback port
    void stop();

    std::uint16_t port() const { return socket_.port(); }
    std::uint64_t forwarded() const { return forwarded_.load(); }
    std::uint64_t dropped() const { return dropped_.load(); }

private:
    void run();

    Endpoint target_;
    double loss_;
    int delay_ms_;
    std::uint64_t seed_;
    UdpSocket socket_;
    std::thread thread_;
    std::atomic<bool> stop_{false};
    std::atomic<std::uint64_t> forwarded_{0};
    std::atomic<std::uint64_t> dropped_{0};
};

} // namespace griddisc
