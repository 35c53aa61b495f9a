#pragma once

#include "mmlink/packet.hpp"
#include "mmlink/reassembly.hpp"
#include "mmlink/reorder.hpp"
#include "mmlink/stats.hpp"

#include <span>
#include <string>
#include <vector>

namespace mmlink {

// Sender-side per-stream state: the wrapping sequence counter.
class Packetizer {
public:
    explicit Packetizer(StreamId streamId, uint32_t firstSeq = 0)
        : streamId_(streamId), nextSeq_(firstSeq) {}

    StreamId streamId() const { return streamId_; }
    uint32_t nextSeq() const { return nextSeq_; }

    std::vector<MediaPacket> packetize(std::span<const uint8_t> frameBytes, uint32_t frameId,
                                       uint64_t timestampUs, size_t mtuPayload = kMaxPayload) {
        auto packets = fragmentFrame(frameBytes, streamId_, frameId, timestampUs, nextSeq_,
                                     mtuPayload);
        nextSeq_ += static_cast<uint32_t>(packets.size());
        return packets;
    }

private:
    StreamId streamId_;
    uint32_t nextSeq_;
};

// Receive path for one stream: decode -> reorder -> reassemble, with the
// stream's delivery counters. Feed raw datagrams; collect completed frames.
//
// reorderWindow 0 selects the immediate path (no reordering stage): packets
// feed the reassembler as they arrive. The echo role uses this so completed
// frames bounce back at their own arrival time instead of in window bursts.
class StreamReceiver {
public:
    explicit StreamReceiver(StreamId streamId, uint32_t reorderWindow = 64)
        : streamId_(streamId), immediate_(reorderWindow == 0),
          reorder_(reorderWindow == 0 ? 1 : reorderWindow) {}

    StreamId streamId() const { return streamId_; }

    // One datagram in, zero or more completed frames out. Rejected datagrams
    // (bad decode, wrong stream) are counted, never fatal.
    std::vector<Reassembler::CompletedFrame> onDatagram(std::span<const uint8_t> bytes);

    // Already-decoded packet (the in-process path).
    std::vector<Reassembler::CompletedFrame> onPacket(MediaPacket packet);

    // End of stream: resolves everything still held in the reorder window.
    std::vector<Reassembler::CompletedFrame> finish();

    StreamStats& stats() { return stats_; }
    const StreamStats& stats() const { return stats_; }
    const Reassembler& reassembler() const { return reassembler_; }

private:
    std::vector<Reassembler::CompletedFrame> drainThrough();
    void syncCounters();

    StreamId streamId_;
    bool immediate_;
    ReorderBuffer reorder_;
    Reassembler reassembler_;
    StreamStats stats_;
};

// Splits one UTF-8 line into chat payload chunks of at most maxBytes,
// never cutting inside a multi-byte sequence. The terminating '\n' is
// carried by the final chunk so the receiver can rebuild line structure.
std::vector<std::string> splitChatLine(const std::string& line, size_t maxBytes = kMaxPayload);

} // namespace mmlink
