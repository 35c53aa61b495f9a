#pragma once

#include "mmlink/frame.hpp"

namespace mmlink {

// BT.601 studio-swing R'G'B' <-> Y'Cb'Cr'. All rounding is half-up so the
// conversions are bit-reproducible; samples are clamped to their studio range.
YcbcrFrame444 rgbToYcbcr(const RgbFrame& frame);
RgbFrame ycbcrToRgb(const YcbcrFrame444& frame);

// Single-pixel transforms, exposed for exhaustive sweeps.
void rgbToYcbcrPixel(uint8_t r, uint8_t g, uint8_t b, uint8_t& y, uint8_t& cb, uint8_t& cr);
void ycbcrToRgbPixel(uint8_t y, uint8_t cb, uint8_t cr, uint8_t& r, uint8_t& g, uint8_t& b);

// 4:2:2 resampling: pair-averaging down (round half-up), sample-and-hold up.
// downsample(upsample(x)) == x exactly.
YcbcrFrame422 chromaDownsample(const YcbcrFrame444& frame);
YcbcrFrame444 chromaUpsample(const YcbcrFrame422& frame);

// 10*log10(255^2 / MSE) over all channels of all pixels.
// Returns +infinity when the frames are identical.
// Throws std::invalid_argument on dimension mismatch.
double psnr(const RgbFrame& a, const RgbFrame& b);

} // namespace mmlink
