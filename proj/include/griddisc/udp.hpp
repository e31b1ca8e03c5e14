#pragma once

#include <cstdint>
#include <netinet/in.h>
#include <optional>
#include <string>
#include <vector>

namespace griddisc {

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;

    std::string str() const { return host + ":" + std::to_string(port); }
    bool operator==(const Endpoint&) const = default;
};

// Parses "host:port"; throws ConfigError on anything else.
Endpoint parse_endpoint(const std::string& text);

// Resolves to an IPv4 socket address; throws ConfigError when unresolvable.
sockaddr_in resolve_ipv4(const Endpoint& ep);

std::string sockaddr_str(const sockaddr_in& addr);

struct RecvPacket {
    std::vector<std::uint8_t> data;
    sockaddr_in from{};
};

// Blocking datagram socket used for both sending and receiving, so peers
// and the hub learn our bound address from packet sources.
class UdpSocket {
public:
    UdpSocket() = default;
    ~UdpSocket();
    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;

    // Throws BindFailure.
    void bind(const Endpoint& local);
    void close();

    std::uint16_t port() const { return port_; }
    bool is_open() const { return fd_ >= 0; }

    // Fire-and-forget; false on send error.
    bool send_to(const sockaddr_in& to, const std::uint8_t* data, std::size_t len);
    bool send_to(const Endpoint& to, const std::vector<std::uint8_t>& data);

    // Waits up to timeout_ms; nullopt on timeout or when closed.
    std::optional<RecvPacket> recv(int timeout_ms);

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

} // namespace griddisc
