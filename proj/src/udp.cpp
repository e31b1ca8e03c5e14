#include "griddisc/udp.hpp"

#include "griddisc/errors.hpp"
#include "griddisc/wire.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace griddisc {

Endpoint parse_endpoint(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
        throw ConfigError("endpoint '" + text + "' is not host:port");
    const std::string port_text = text.substr(colon + 1);
    char* end = nullptr;
    long port = std::strtol(port_text.c_str(), &end, 10);
    if (*end != '\0' || port < 0 || port > 65535)
        throw ConfigError("endpoint '" + text + "' has an invalid port");
    return Endpoint{text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

sockaddr_in resolve_ipv4(const Endpoint& ep) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(ep.host.c_str(), nullptr, &hints, &res);
    if (rc != 0 || !res)
        throw ConfigError("cannot resolve host '" + ep.host + "': " + gai_strerror(rc));
    sockaddr_in addr{};
    std::memcpy(&addr, res->ai_addr, sizeof(addr));
    addr.sin_port = htons(ep.port);
    ::freeaddrinfo(res);
    return addr;
}

std::string sockaddr_str(const sockaddr_in& addr) {
    char buf[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof(buf));
    return std::string(buf) + ":" + std::to_string(ntohs(addr.sin_port));
}

UdpSocket::~UdpSocket() { close(); }

void UdpSocket::bind(const Endpoint& local) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
    if (fd_ < 0) throw BindFailure("udp socket: " + std::string(std::strerror(errno)));
    sockaddr_in addr = resolve_ipv4(local);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        std::string err = std::strerror(errno);
        close();
        throw BindFailure("udp bind " + local.str() + ": " + err);
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

void UdpSocket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

bool UdpSocket::send_to(const sockaddr_in& to, const std::uint8_t* data, std::size_t len) {
    if (fd_ < 0) return false;
    ssize_t n = ::sendto(fd_, data, len, 0, reinterpret_cast<const sockaddr*>(&to), sizeof(to));
    return n == static_cast<ssize_t>(len);
}

bool UdpSocket::send_to(const Endpoint& to, const std::vector<std::uint8_t>& data) {
    try {
        return send_to(resolve_ipv4(to), data.data(), data.size());
    } catch (const ConfigError&) {
        return false;
    }
}

std::optional<RecvPacket> UdpSocket::recv(int timeout_ms) {
    if (fd_ < 0) return std::nullopt;
    pollfd pfd{fd_, POLLIN, 0};
    int rc = ::poll(&pfd, 1, timeout_ms);
    if (rc <= 0 || !(pfd.revents & POLLIN)) return std::nullopt;

    RecvPacket pkt;
    pkt.data.resize(kMaxDatagramBytes + 1);
    socklen_t from_len = sizeof(pkt.from);
    ssize_t n = ::recvfrom(fd_, pkt.data.data(), pkt.data.size(), 0,
                           reinterpret_cast<sockaddr*>(&pkt.from), &from_len);
    if (n < 0) return std::nullopt;
    pkt.data.resize(static_cast<std::size_t>(n));
    return pkt;
}

} // namespace griddisc
