#include "mmlink/udp.hpp"

#include "mmlink/errors.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>
#include <utility>

namespace mmlink {

namespace {

std::string errnoString() { return std::strerror(errno); }

sockaddr_in makeAddress(const std::string& address, uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, address.c_str(), &addr.sin_addr) != 1) {
        throw SocketError("invalid IPv4 address '" + address + "'");
    }
    return addr;
}

} // namespace

UdpSocket::UdpSocket() {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw SocketError("socket(): " + errnoString());
}

UdpSocket::~UdpSocket() {
    if (fd_ >= 0) ::close(fd_);
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

void UdpSocket::bind(uint16_t port, const std::string& address) {
    const sockaddr_in addr = makeAddress(address, port);
    int reuse = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &reuse, sizeof(reuse));
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        throw SocketError("bind(" + address + ":" + std::to_string(port) +
                          "): " + errnoString());
    }
}

uint16_t UdpSocket::localPort() const {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
        throw SocketError("getsockname(): " + errnoString());
    }
    return ntohs(addr.sin_port);
}

void UdpSocket::setReceiveBufferBytes(int bytes) {
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVBUF, &bytes, sizeof(bytes));
}

bool UdpSocket::sendTo(const std::string& address, uint16_t port, std::span<const uint8_t> bytes,
                       std::string* error) {
    sockaddr_in addr;
    try {
        addr = makeAddress(address, port);
    } catch (const SocketError& e) {
        if (error) *error = e.what();
        return false;
    }
    const ssize_t sent = ::sendto(fd_, bytes.data(), bytes.size(), 0,
                                  reinterpret_cast<const sockaddr*>(&addr), sizeof(addr));
    if (sent != static_cast<ssize_t>(bytes.size())) {
        if (error) {
            *error = "sendto(" + address + ":" + std::to_string(port) + "): " + errnoString();
        }
        return false;
    }
    return true;
}

std::optional<UdpSocket::Datagram> UdpSocket::receive(int timeoutMs) {
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, timeoutMs);
    if (ready < 0) {
        if (errno == EINTR) return std::nullopt;
        throw SocketError("poll(): " + errnoString());
    }
    if (ready == 0) return std::nullopt;

    std::vector<uint8_t> buffer(65536);
    sockaddr_in from{};
    socklen_t fromLen = sizeof(from);
    const ssize_t n = ::recvfrom(fd_, buffer.data(), buffer.size(), 0,
                                 reinterpret_cast<sockaddr*>(&from), &fromLen);
    if (n < 0) {
        // ICMP unreachable from a previous send surfaces here on Linux
        if (errno == ECONNREFUSED || errno == EINTR || errno == EAGAIN) return std::nullopt;
        throw SocketError("recvfrom(): " + errnoString());
    }
    buffer.resize(static_cast<size_t>(n));

    Datagram dg;
    dg.bytes = std::move(buffer);
    char name[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &from.sin_addr, name, sizeof(name));
    dg.fromAddress = name;
    dg.fromPort = ntohs(from.sin_port);
    return dg;
}

} // namespace mmlink
