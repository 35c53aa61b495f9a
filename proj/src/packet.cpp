#include "mmlink/packet.hpp"

#include "mmlink/crc32.hpp"

#include <stdexcept>
#include <string>

namespace mmlink {

namespace {

void putU16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v & 0xFF));
}

void putU32(std::vector<uint8_t>& out, uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<uint8_t>(v >> shift));
}

void putU64(std::vector<uint8_t>& out, uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<uint8_t>(v >> shift));
}

uint16_t getU16(const uint8_t* p) { return static_cast<uint16_t>((p[0] << 8) | p[1]); }

uint32_t getU32(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

uint64_t getU64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
    return v;
}

} // namespace

const char* streamName(StreamId id) {
    switch (id) {
        case StreamId::audio: return "audio";
        case StreamId::video: return "video";
        case StreamId::chat: return "chat";
    }
    return "unknown";
}

const char* decodeStatusName(DecodeStatus status) {
    switch (status) {
        case DecodeStatus::ok: return "ok";
        case DecodeStatus::tooShort: return "too_short";
        case DecodeStatus::badMagic: return "bad_magic";
        case DecodeStatus::badVersion: return "bad_version";
        case DecodeStatus::badStreamId: return "bad_stream_id";
        case DecodeStatus::badLength: return "bad_length";
        case DecodeStatus::badFragments: return "bad_fragments";
        case DecodeStatus::badCrc: return "bad_crc";
    }
    return "unknown";
}

std::vector<uint8_t> encodePacket(const MediaPacket& packet) {
    if (packet.payload.size() > kMaxPayload) {
        throw std::invalid_argument("payload of " + std::to_string(packet.payload.size()) +
                                    " bytes exceeds " + std::to_string(kMaxPayload));
    }
    if (packet.fragCount == 0 || packet.fragIndex >= packet.fragCount) {
        throw std::invalid_argument("fragment index " + std::to_string(packet.fragIndex) +
                                    " not below count " + std::to_string(packet.fragCount));
    }
    std::vector<uint8_t> out;
    out.reserve(kHeaderSize + packet.payload.size() + kTrailerSize);
    putU16(out, kPacketMagic);
    out.push_back(kProtocolVersion);
    out.push_back(static_cast<uint8_t>(packet.streamId));
    putU32(out, packet.seq);
    putU32(out, packet.frameId);
    putU16(out, packet.fragIndex);
    putU16(out, packet.fragCount);
    putU64(out, packet.timestampUs);
    putU16(out, static_cast<uint16_t>(packet.payload.size()));
    out.insert(out.end(), packet.payload.begin(), packet.payload.end());
    putU32(out, crc32({out.data(), out.size()}));
    return out;
}

DecodeResult decodePacket(std::span<const uint8_t> bytes) {
    DecodeResult result;
    if (bytes.size() < kHeaderSize + kTrailerSize) {
        result.status = DecodeStatus::tooShort;
        return result;
    }
    if (getU16(bytes.data()) != kPacketMagic) {
        result.status = DecodeStatus::badMagic;
        return result;
    }
    if (bytes[2] != kProtocolVersion) {
        result.status = DecodeStatus::badVersion;
        return result;
    }
    const uint8_t sid = bytes[3];
    if (sid < 1 || sid > 3) {
        result.status = DecodeStatus::badStreamId;
        return result;
    }
    const uint16_t payloadLen = getU16(bytes.data() + 24);
    if (payloadLen > kMaxPayload || bytes.size() != kHeaderSize + payloadLen + kTrailerSize) {
        result.status = DecodeStatus::badLength;
        return result;
    }
    const uint16_t fragIndex = getU16(bytes.data() + 12);
    const uint16_t fragCount = getU16(bytes.data() + 14);
    if (fragCount == 0 || fragIndex >= fragCount) {
        result.status = DecodeStatus::badFragments;
        return result;
    }
    const uint32_t stored = getU32(bytes.data() + kHeaderSize + payloadLen);
    const uint32_t computed = crc32(bytes.first(kHeaderSize + payloadLen));
    if (stored != computed) {
        result.status = DecodeStatus::badCrc;
        return result;
    }

    result.status = DecodeStatus::ok;
    result.packet.streamId = static_cast<StreamId>(sid);
    result.packet.seq = getU32(bytes.data() + 4);
    result.packet.frameId = getU32(bytes.data() + 8);
    result.packet.fragIndex = fragIndex;
    result.packet.fragCount = fragCount;
    result.packet.timestampUs = getU64(bytes.data() + 16);
    result.packet.payload.assign(bytes.begin() + kHeaderSize,
                                 bytes.begin() + kHeaderSize + payloadLen);
    return result;
}

std::vector<MediaPacket> fragmentFrame(std::span<const uint8_t> frameBytes, StreamId streamId,
                                       uint32_t frameId, uint64_t timestampUs, uint32_t firstSeq,
                                       size_t mtuPayload) {
    if (frameBytes.empty()) throw std::invalid_argument("cannot fragment an empty frame");
    if (mtuPayload == 0 || mtuPayload > kMaxPayload) {
        throw std::invalid_argument("mtu payload out of (0, " + std::to_string(kMaxPayload) + "]");
    }
    const size_t count = (frameBytes.size() + mtuPayload - 1) / mtuPayload;
    if (count > 65535) {
        throw std::invalid_argument("frame of " + std::to_string(frameBytes.size()) +
                                    " bytes needs " + std::to_string(count) + " fragments");
    }
    std::vector<MediaPacket> packets;
    packets.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        MediaPacket p;
        p.streamId = streamId;
        p.seq = firstSeq + static_cast<uint32_t>(i); // wraps intentionally
        p.frameId = frameId;
        p.fragIndex = static_cast<uint16_t>(i);
        p.fragCount = static_cast<uint16_t>(count);
        p.timestampUs = timestampUs;
        const size_t begin = i * mtuPayload;
        const size_t end = std::min(begin + mtuPayload, frameBytes.size());
        p.payload.assign(frameBytes.begin() + begin, frameBytes.begin() + end);
        packets.push_back(std::move(p));
    }
    return packets;
}

} // namespace mmlink
