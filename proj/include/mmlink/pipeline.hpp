#pragma once

#include "mmlink/frame.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mmlink {

// Full video encode chain: RGB -> Y'Cb'Cr' 4:4:4 -> 4:2:2 -> packed bytes.
std::vector<uint8_t> encodeVideoFrame(const RgbFrame& frame);

// Inverse chain. Throws FormatError on malformed bytes.
RgbFrame decodeVideoFrame(std::span<const uint8_t> bytes);

// What a lossless link would deliver: decode(encode(frame)). The chroma loss
// happens exactly once; a second pass is bit-identical.
RgbFrame pipelineReference(const RgbFrame& frame);

} // namespace mmlink
