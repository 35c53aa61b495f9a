#pragma once

#include "mmlink/frame.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mmlink {

// Packed 4:2:2 frame layout (the video stream payload):
//   width (2B big-endian) | height (2B big-endian) | Y plane | Cb plane | Cr plane
// planes row-major; total length = 4 + 2*width*height.
std::vector<uint8_t> bytePack(const YcbcrFrame422& frame);

struct UnpackedFrame {
    YcbcrFrame422 frame;
    // Samples outside the studio range were clamped on the way in.
    int clampedSamples = 0;
};

// Inverse of bytePack. Throws FormatError when the buffer is shorter than the
// header, the declared dimensions are invalid (zero or odd width), or the byte
// length disagrees with the declared dimensions.
UnpackedFrame byteUnpack(std::span<const uint8_t> bytes);

} // namespace mmlink
