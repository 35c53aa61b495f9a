#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmlink {

// Thin RAII wrapper over a POSIX UDP socket.
class UdpSocket {
public:
    UdpSocket(); // throws SocketError
    ~UdpSocket();

    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;
    UdpSocket(UdpSocket&& other) noexcept;
    UdpSocket& operator=(UdpSocket&& other) noexcept;

    void bind(uint16_t port, const std::string& address = "0.0.0.0"); // throws SocketError
    uint16_t localPort() const;                                       // throws SocketError
    void setReceiveBufferBytes(int bytes);

    // Returns false and fills `error` on send failure; the caller decides
    // whether to continue with the next packet.
    bool sendTo(const std::string& address, uint16_t port, std::span<const uint8_t> bytes,
                std::string* error = nullptr);

    struct Datagram {
        std::vector<uint8_t> bytes;
        std::string fromAddress;
        uint16_t fromPort = 0;
    };

    // nullopt on timeout. Throws SocketError on unrecoverable errors.
    std::optional<Datagram> receive(int timeoutMs);

    int fd() const { return fd_; }

private:
    int fd_ = -1;
};

} // namespace mmlink
