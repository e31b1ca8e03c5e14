#include "griddisc/udp_proxy.hpp"

#include "griddisc/clock.hpp"

#include <deque>
#include <random>
#include <utility>

namespace griddisc {

UdpProxy::UdpProxy(Endpoint target, double loss, int delay_ms, std::uint64_t seed)
    : target_(std::move(target)), loss_(loss), delay_ms_(delay_ms), seed_(seed) {}

UdpProxy::~UdpProxy() { stop(); }

void UdpProxy::start() {
    socket_.bind(Endpoint{"127.0.0.1", 0});
    stop_ = false;
    thread_ = std::thread([this] { run(); });
}

void UdpProxy::stop() {
    stop_ = true;
    if (thread_.joinable()) thread_.join();
    socket_.close();
}

void UdpProxy::run() {
    std::mt19937_64 rng(seed_);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    sockaddr_in target = resolve_ipv4(target_);

    struct Pending {
        Micros due;
        std::vector<std::uint8_t> data;
    };
    std::deque<Pending> queue; // FIFO: fixed delay keeps it ordered

    while (!stop_) {
        int timeout = 20;
        const Micros now = steady_micros();
        if (!queue.empty()) {
            Micros wait_us = queue.front().due - now;
            timeout = wait_us <= 0 ? 0 : static_cast<int>(std::min<Micros>(wait_us / 1000 + 1, 20));
        }
        if (auto pkt = socket_.recv(timeout)) {
            if (coin(rng) < loss_) {
                ++dropped_;
            } else {
                queue.push_back(Pending{steady_micros() + Micros(delay_ms_) * 1000,
                                        std::move(pkt->data)});
            }
        }
        while (!queue.empty() && queue.front().due <= steady_micros()) {
            socket_.send_to(target, queue.front().data.data(), queue.front().data.size());
            ++forwarded_;
            queue.pop_front();
        }
    }
    // Flush the tail on shutdown so teardown never looks like packet loss.
    for (const auto& p : queue) {
        socket_.send_to(target, p.data.data(), p.data.size());
        ++forwarded_;
    }
}

} // namespace griddisc
