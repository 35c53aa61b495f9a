#pragma once

#include <stdexcept>
#include <string>

namespace mmlink {

// Malformed wire payloads, media containers and config files.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Socket-layer failures, carrying the endpoint that failed.
class SocketError : public std::runtime_error {
public:
    explicit SocketError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mmlink
