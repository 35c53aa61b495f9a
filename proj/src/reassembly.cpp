#include "mmlink/reassembly.hpp"

#include <algorithm>

namespace mmlink {

namespace {
constexpr size_t kLossMemory = 256;
constexpr size_t kResolvedMemory = 256;
} // namespace

void Reassembler::rememberResolved(uint32_t frameId) {
    resolvedFrames_.push_back(frameId);
    if (resolvedFrames_.size() > kResolvedMemory) resolvedFrames_.pop_front();
}

bool Reassembler::recentlyResolved(uint32_t frameId) const {
    return std::find(resolvedFrames_.begin(), resolvedFrames_.end(), frameId) !=
           resolvedFrames_.end();
}

void Reassembler::dropFrame(uint32_t frameId, bool corrupt) {
    ++counters_.framesDropped;
    if (corrupt) ++counters_.framesCorrupt;
    rememberResolved(frameId);
    frames_.erase(frameId);
    std::erase(arrivalOrder_, frameId);
}

void Reassembler::evictOldest() {
    while (frames_.size() >= maxInFlight_ && !arrivalOrder_.empty()) {
        const uint32_t oldest = arrivalOrder_.front();
        auto it = frames_.find(oldest);
        if (it != frames_.end()) {
            dropFrame(oldest, false);
        } else {
            arrivalOrder_.pop_front();
        }
    }
}

std::optional<Reassembler::CompletedFrame> Reassembler::push(const MediaPacket& packet) {
    if (recentlyResolved(packet.frameId)) {
        ++counters_.staleFragments;
        return std::nullopt;
    }

    auto it = frames_.find(packet.frameId);
    if (it == frames_.end()) {
        const uint32_t firstSeq = packet.seq - packet.fragIndex; // wraps consistently

        // A fragment already declared lost means this frame can never
        // complete; drop it whole right away.
        for (uint32_t lostSeq : recentLosses_) {
            const int32_t offset = seqDiff(lostSeq, firstSeq);
            if (offset >= 0 && offset < packet.fragCount) {
                ++counters_.framesDropped;
                rememberResolved(packet.frameId);
                return std::nullopt;
            }
        }

        evictOldest();
        Assembly assembly;
        assembly.fragCount = packet.fragCount;
        assembly.firstSeq = firstSeq;
        assembly.timestampUs = packet.timestampUs;
        assembly.parts.resize(packet.fragCount);
        it = frames_.emplace(packet.frameId, std::move(assembly)).first;
        arrivalOrder_.push_back(packet.frameId);
    }

    Assembly& assembly = it->second;
    if (packet.fragCount != assembly.fragCount ||
        seqDiff(packet.seq - packet.fragIndex, assembly.firstSeq) != 0) {
        dropFrame(packet.frameId, true);
        return std::nullopt;
    }
    // Fragments are never empty (fragmentFrame forbids empty frames), so an
    // empty part means "not yet received".
    if (!assembly.parts[packet.fragIndex].empty()) {
        ++counters_.duplicateFragments;
        return std::nullopt;
    }

    assembly.parts[packet.fragIndex] = packet.payload;
    assembly.bytesSoFar += packet.payload.size();
    ++assembly.present;

    if (assembly.present < assembly.fragCount) return std::nullopt;


    CompletedFrame frame;
    frame.frameId = packet.frameId;
    frame.timestampUs = assembly.timestampUs;
    frame.bytes.reserve(assembly.bytesSoFar);
    for (const auto& part : assembly.parts) {
        frame.bytes.insert(frame.bytes.end(), part.begin(), part.end());
    }
    ++counters_.framesComplete;
    rememberResolved(packet.frameId);
    frames_.erase(packet.frameId);
    std::erase(arrivalOrder_, packet.frameId);
    return frame;
}

void Reassembler::noteLoss(uint32_t seq) {
    recentLosses_.push_back(seq);
    if (recentLosses_.size() > kLossMemory) recentLosses_.pop_front();

    for (auto it = frames_.begin(); it != frames_.end(); ++it) {
        const int32_t offset = seqDiff(seq, it->second.firstSeq);
        if (offset >= 0 && offset < it->second.fragCount) {
            dropFrame(it->first, false);
            return;
        }
    }
}

std::optional<Reassembler::CompletedFrame> Reassembler::consume(const ReorderBuffer::Event& event) {
    if (event.kind == ReorderBuffer::Event::Kind::lost) {
        noteLoss(event.seq);
        return std::nullopt;
    }
    return push(event.packet);
}

} // namespace mmlink
