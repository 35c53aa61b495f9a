#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

namespace mmlink {

// Per-stream delivery counters. Incremented from both the send and receive
// paths concurrently; latency samples are mutex-guarded.
class StreamStats {
public:
    StreamStats() = default;
    StreamStats(const StreamStats& other) { copyFrom(other); }
    StreamStats& operator=(const StreamStats& other) {
        if (this != &other) copyFrom(other);
        return *this;
    }

    std::atomic<uint64_t> sent{0};
    std::atomic<uint64_t> received{0};
    std::atomic<uint64_t> lost{0};
    std::atomic<uint64_t> reordered{0};
    std::atomic<uint64_t> crcFailures{0};
    std::atomic<uint64_t> malformed{0};
    std::atomic<uint64_t> sendErrors{0};
    std::atomic<uint64_t> framesSent{0};
    std::atomic<uint64_t> framesComplete{0};
    std::atomic<uint64_t> framesDropped{0};

    void addLatencySample(uint64_t rttUs) {
        std::lock_guard<std::mutex> lock(latencyMutex_);
        latencyUs_.push_back(rttUs);
    }

    std::vector<uint64_t> latencySamples() const {
        std::lock_guard<std::mutex> lock(latencyMutex_);
        return latencyUs_;
    }

private:
    void copyFrom(const StreamStats& other) {
        sent = other.sent.load();
        received = other.received.load();
        lost = other.lost.load();
        reordered = other.reordered.load();
        crcFailures = other.crcFailures.load();
        malformed = other.malformed.load();
        sendErrors = other.sendErrors.load();
        framesSent = other.framesSent.load();
        framesComplete = other.framesComplete.load();
        framesDropped = other.framesDropped.load();
        latencyUs_ = other.latencySamples();
    }

    mutable std::mutex latencyMutex_;
    std::vector<uint64_t> latencyUs_;
};

struct LatencySummary {
    uint64_t count = 0;
    double meanUs = 0.0;
    uint64_t p50Us = 0;
    uint64_t p95Us = 0;
    uint64_t maxUs = 0;
};

LatencySummary summarizeLatency(std::vector<uint64_t> samples);

} // namespace mmlink
