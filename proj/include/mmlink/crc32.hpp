#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace mmlink {

namespace detail {

constexpr std::array<uint32_t, 256> makeCrc32Table() {
    std::array<uint32_t, 256> table{};
    for (uint32_t i = 0; i < 256; ++i) {
        uint32_t c = i;
        for (int k = 0; k < 8; ++k) {
            c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        }
        table[i] = c;
    }
    return table;
}

inline constexpr std::array<uint32_t, 256> kCrc32Table = makeCrc32Table();

} // namespace detail

// CRC-32, IEEE 802.3 polynomial (reflected 0xEDB88320). crc32("123456789") == 0xCBF43926.
inline uint32_t crc32Update(uint32_t crc, std::span<const uint8_t> data) {
    crc = ~crc;
    for (uint8_t b : data) {
        crc = detail::kCrc32Table[(crc ^ b) & 0xFF] ^ (crc >> 8);
    }
    return ~crc;
}

inline uint32_t crc32(std::span<const uint8_t> data) { return crc32Update(0, data); }

} // namespace mmlink
