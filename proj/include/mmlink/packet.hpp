#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mmlink {

inline constexpr uint16_t kPacketMagic = 0x4D4D;
inline constexpr uint8_t kProtocolVersion = 0x01;
inline constexpr size_t kHeaderSize = 26;
inline constexpr size_t kTrailerSize = 4; // CRC-32
inline constexpr size_t kMaxPayload = 1400;

enum class StreamId : uint8_t {
    audio = 1,
    video = 2,
    chat = 3,
};

const char* streamName(StreamId id);

// One datagram's worth of a media stream. seq is a per-stream counter and
// wraps; frag_index/frag_count tie fragments of one frame_id together.
struct MediaPacket {
    StreamId streamId = StreamId::video;
    uint32_t seq = 0;
    uint32_t frameId = 0;
    uint16_t fragIndex = 0;
    uint16_t fragCount = 1;
    uint64_t timestampUs = 0;
    std::vector<uint8_t> payload;

    bool operator==(const MediaPacket& other) const = default;
};

// Big-endian serialization in field order, CRC-32 trailer over header|payload.
// Throws std::invalid_argument when invariants are violated (payload > 1400,
// fragIndex >= fragCount, fragCount == 0).
std::vector<uint8_t> encodePacket(const MediaPacket& packet);

enum class DecodeStatus : uint8_t {
    ok,
    tooShort,
    badMagic,
    badVersion,
    badStreamId,
    badLength,
    badFragments,
    badCrc,
};

const char* decodeStatusName(DecodeStatus status);

struct DecodeResult {
    DecodeStatus status = DecodeStatus::tooShort;
    MediaPacket packet; // valid only when status == ok

    explicit operator bool() const { return status == DecodeStatus::ok; }
};

// Validated parse: magic, version, stream id, declared lengths, then CRC.
DecodeResult decodePacket(std::span<const uint8_t> bytes);

// Splits one frame's bytes into ceil(len/mtuPayload) packets: all but the last
// carry mtuPayload bytes, frag_count is uniform, seq runs consecutively from
// firstSeq (wrapping). Throws std::invalid_argument on empty input, an
// mtuPayload outside (0, kMaxPayload], or a frame needing > 65535 fragments.
std::vector<MediaPacket> fragmentFrame(std::span<const uint8_t> frameBytes, StreamId streamId,
                                       uint32_t frameId, uint64_t timestampUs, uint32_t firstSeq,
                                       size_t mtuPayload = kMaxPayload);

// Wraparound-aware 32-bit sequence comparison: <0 when a precedes b.
inline int32_t seqDiff(uint32_t a, uint32_t b) { return static_cast<int32_t>(a - b); }

} // namespace mmlink
