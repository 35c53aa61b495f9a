#pragma once

#include "mmlink/packet.hpp"
#include "mmlink/reorder.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

namespace mmlink {

// Rebuilds frame payloads from fragments of one stream.
//
// Feed it the ordered event output of a ReorderBuffer (or raw packets when no
// reordering layer is in play). Fragments may arrive in any order within a
// frame; duplicates are ignored. A frame is dropped whole as soon as any of
// its fragments is declared lost, and a frame whose fragments disagree on
// frag_count is dropped as corrupt.
class Reassembler {
public:
    struct CompletedFrame {
        uint32_t frameId = 0;
        uint64_t timestampUs = 0; // from the frame's first fragment
        std::vector<uint8_t> bytes;
    };

    struct Counters {
        uint64_t framesComplete = 0;
        uint64_t framesDropped = 0;
        uint64_t framesCorrupt = 0;
        uint64_t duplicateFragments = 0;
        uint64_t staleFragments = 0; // fragments of frames already resolved
    };

    explicit Reassembler(size_t maxInFlight = 64) : maxInFlight_(maxInFlight) {}

    // Returns the completed frame when this fragment finishes one.
    std::optional<CompletedFrame> push(const MediaPacket& packet);

    // A loss notice for `seq`: dooms the in-flight frame whose fragment span
    // covers it, and is remembered so a frame first seen later (its earlier
    // fragments all lost) is doomed on creation.
    void noteLoss(uint32_t seq);

    // Consume one reorder event.
    std::optional<CompletedFrame> consume(const ReorderBuffer::Event& event);

    const Counters& counters() const { return counters_; }
    size_t inFlight() const { return frames_.size(); }

private:
    struct Assembly {
        uint32_t firstSeq = 0; // seq of frag_index 0
        uint16_t fragCount = 0;
        uint64_t timestampUs = 0;
        size_t bytesSoFar = 0;
        uint16_t present = 0;
        std::vector<std::vector<uint8_t>> parts;
    };

    void dropFrame(uint32_t frameId, bool corrupt);
    void evictOldest();
    void rememberResolved(uint32_t frameId);
    bool recentlyResolved(uint32_t frameId) const;

    size_t maxInFlight_;
    std::map<uint32_t, Assembly> frames_; // keyed by frame_id
    std::deque<uint32_t> arrivalOrder_;
    std::deque<uint32_t> recentLosses_;   // lost seqs, bounded
    std::deque<uint32_t> resolvedFrames_; // completed/dropped frame ids, bounded
    Counters counters_;
};

} // namespace mmlink
