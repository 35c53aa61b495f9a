#pragma once

#include "mmlink/packet.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mmlink {

// Peer address plus the three per-stream UDP ports.
struct Endpoint {
    std::string address = "127.0.0.1";
    uint16_t videoPort = 0;
    uint16_t audioPort = 0;
    uint16_t chatPort = 0;

    uint16_t portFor(StreamId id) const {
        switch (id) {
            case StreamId::audio: return audioPort;
            case StreamId::video: return videoPort;
            case StreamId::chat: return chatPort;
        }
        return 0;
    }

    void validate() const {
        if (videoPort == audioPort || videoPort == chatPort || audioPort == chatPort) {
            throw std::invalid_argument("endpoint ports must be pairwise distinct (" +
                                        std::to_string(videoPort) + ", " +
                                        std::to_string(audioPort) + ", " +
                                        std::to_string(chatPort) + ")");
        }
    }
};

} // namespace mmlink
