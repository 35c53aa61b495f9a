#include "mmlink/frame_bytes.hpp"

#include "mmlink/errors.hpp"

#include <string>

namespace mmlink {

namespace {

uint8_t clampTo(uint8_t s, uint8_t lo, uint8_t hi, int& clamped) {
    if (s < lo) {
        ++clamped;
        return lo;
    }
    if (s > hi) {
        ++clamped;
        return hi;
    }
    return s;
}

} // namespace

std::vector<uint8_t> bytePack(const YcbcrFrame422& frame) {
    const size_t n = static_cast<size_t>(frame.width()) * frame.height();
    std::vector<uint8_t> out;
    out.reserve(4 + 2 * n);
    out.push_back(static_cast<uint8_t>(frame.width() >> 8));
    out.push_back(static_cast<uint8_t>(frame.width() & 0xFF));
    out.push_back(static_cast<uint8_t>(frame.height() >> 8));
    out.push_back(static_cast<uint8_t>(frame.height() & 0xFF));
    out.insert(out.end(), frame.y().begin(), frame.y().end());
    out.insert(out.end(), frame.cb().begin(), frame.cb().end());
    out.insert(out.end(), frame.cr().begin(), frame.cr().end());
    return out;
}

UnpackedFrame byteUnpack(std::span<const uint8_t> bytes) {
    if (bytes.size() < 4) {
        throw FormatError("packed frame shorter than 4-byte header (" +
                          std::to_string(bytes.size()) + " bytes)");
    }
    const int width = (bytes[0] << 8) | bytes[1];
    const int height = (bytes[2] << 8) | bytes[3];
    if (width < 1 || height < 1 || width % 2 != 0) {
        throw FormatError("packed frame declares invalid dimensions " +
                          std::to_string(width) + "x" + std::to_string(height));
    }
    const size_t n = static_cast<size_t>(width) * height;
    if (bytes.size() != 4 + 2 * n) {
        throw FormatError("packed frame length " + std::to_string(bytes.size()) +
                          " does not match declared " + std::to_string(width) + "x" +
                          std::to_string(height));
    }

    int clamped = 0;
    std::vector<uint8_t> y(n), cb(n / 2), cr(n / 2);
    size_t pos = 4;
    for (size_t i = 0; i < n; ++i) y[i] = clampTo(bytes[pos++], kLumaMin, kLumaMax, clamped);
    for (size_t i = 0; i < n / 2; ++i) cb[i] = clampTo(bytes[pos++], kChromaMin, kChromaMax, clamped);
    for (size_t i = 0; i < n / 2; ++i) cr[i] = clampTo(bytes[pos++], kChromaMin, kChromaMax, clamped);

    return UnpackedFrame{YcbcrFrame422(width, height, std::move(y), std::move(cb), std::move(cr)),
                         clamped};
}

} // namespace mmlink
