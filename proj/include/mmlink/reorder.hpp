#pragma once

#include "mmlink/packet.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace mmlink {

// Strict weak ordering on wrapping sequence numbers. Valid while all compared
// seqs lie within half the 32-bit space of each other, which the reorder
// window guarantees.
struct SeqLess {
    bool operator()(uint32_t a, uint32_t b) const { return seqDiff(a, b) < 0; }
};

// Per-stream reordering over a sliding window of sequence numbers.
//
// Packets are emitted in strict seq order. A gap is declared lost (and
// skipped) once a packet `window` or more seqs ahead of it has arrived;
// packets older than the emit point are dropped as late/duplicate. All seq
// comparisons use wraparound-aware 32-bit serial arithmetic.
class ReorderBuffer {
public:
    struct Event {
        enum class Kind { packet, lost };
        Kind kind;
        uint32_t seq;
        MediaPacket packet; // valid when kind == packet
    };

    struct Counters {
        uint64_t emitted = 0;
        uint64_t lost = 0;
        uint64_t duplicates = 0;
        uint64_t late = 0;
        uint64_t reordered = 0; // arrived ahead of the emit point
    };

    explicit ReorderBuffer(uint32_t window = 64) : window_(window) {}

    void push(MediaPacket packet);

    // In-order packets and loss notices accumulated since the last drain.
    std::vector<Event> drain() { return std::exchange(pending_, {}); }

    // End of stream: emits everything still held, in order, with loss notices
    // for the gaps between.
    void flush();

    const Counters& counters() const { return counters_; }

private:
    void emitPacket(MediaPacket packet);
    void declareLost(uint32_t seq);
    void drainConsecutive();

    uint32_t window_;
    bool started_ = false;
    uint32_t nextExpected_ = 0;
    std::map<uint32_t, MediaPacket, SeqLess> held_;
    std::vector<Event> pending_;
    Counters counters_;
};

} // namespace mmlink
