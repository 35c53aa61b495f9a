#include "mmlink/pipeline.hpp"

#include "mmlink/color.hpp"
#include "mmlink/frame_bytes.hpp"

namespace mmlink {

std::vector<uint8_t> encodeVideoFrame(const RgbFrame& frame) {
    return bytePack(chromaDownsample(rgbToYcbcr(frame)));
}

RgbFrame decodeVideoFrame(std::span<const uint8_t> bytes) {
    return ycbcrToRgb(chromaUpsample(byteUnpack(bytes).frame));
}

RgbFrame pipelineReference(const RgbFrame& frame) {
    return decodeVideoFrame(encodeVideoFrame(frame));
}

} // namespace mmlink
