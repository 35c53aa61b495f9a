#include "mmlink/session.hpp"

namespace mmlink {

std::vector<Reassembler::CompletedFrame> StreamReceiver::onDatagram(
    std::span<const uint8_t> bytes) {
    DecodeResult decoded = decodePacket(bytes);
    if (!decoded) {
        if (decoded.status == DecodeStatus::badCrc) {
            ++stats_.crcFailures;
        } else {
            ++stats_.malformed;
        }
        return {};
    }
    return onPacket(std::move(decoded.packet));
}

std::vector<Reassembler::CompletedFrame> StreamReceiver::onPacket(MediaPacket packet) {
    if (packet.streamId != streamId_) {
        ++stats_.malformed;
        return {};
    }
    ++stats_.received;
    if (immediate_) {
        std::vector<Reassembler::CompletedFrame> completed;
        if (auto frame = reassembler_.push(packet)) completed.push_back(std::move(*frame));
        syncCounters();
        return completed;
    }
    reorder_.push(std::move(packet));
    return drainThrough();
}

std::vector<Reassembler::CompletedFrame> StreamReceiver::finish() {
    if (immediate_) return {};
    reorder_.flush();
    return drainThrough();
}

std::vector<Reassembler::CompletedFrame> StreamReceiver::drainThrough() {
    std::vector<Reassembler::CompletedFrame> completed;
    for (const auto& event : reorder_.drain()) {
        if (auto frame = reassembler_.consume(event)) {
            completed.push_back(std::move(*frame));
        }
    }
    syncCounters();
    return completed;
}

void StreamReceiver::syncCounters() {
    stats_.lost = reorder_.counters().lost;
    stats_.reordered = reorder_.counters().reordered;
    stats_.framesComplete = reassembler_.counters().framesComplete;
    stats_.framesDropped = reassembler_.counters().framesDropped;
}

std::vector<std::string> splitChatLine(const std::string& line, size_t maxBytes) {
    std::vector<std::string> chunks;
    size_t pos = 0;
    const std::string body = line; // newline, if any, travels with the tail
    while (pos < body.size()) {
        size_t take = std::min(maxBytes, body.size() - pos);
        // back off to a UTF-8 boundary: continuation bytes are 10xxxxxx
        while (take > 0 && pos + take < body.size() &&
               (static_cast<uint8_t>(body[pos + take]) & 0xC0) == 0x80) {
            --take;
        }
        if (take == 0) take = std::min(maxBytes, body.size() - pos); // degenerate input
        chunks.push_back(body.substr(pos, take));
        pos += take;
    }
    if (chunks.empty()) chunks.push_back("");
    return chunks;
}

} // namespace mmlink
