#include "mmlink/frame.hpp"

#include <stdexcept>
#include <string>

namespace mmlink {

namespace {

void checkDimensions(int width, int height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("frame dimensions must be >= 1, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
    if (width % 2 != 0) {
        throw std::invalid_argument("frame width must be even, got " + std::to_string(width));
    }
}

void checkPlane(const std::vector<uint8_t>& plane, size_t expected, const char* name,
                uint8_t lo, uint8_t hi) {
    if (plane.size() != expected) {
        throw std::invalid_argument(std::string(name) + " plane size mismatch");
    }
    for (uint8_t s : plane) {
        if (s < lo || s > hi) {
            throw std::invalid_argument(std::string(name) + " sample " + std::to_string(s) +
                                        " outside studio range");
        }
    }
}

} // namespace

RgbFrame::RgbFrame(int width, int height, std::vector<uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    checkDimensions(width, height);
    if (pixels_.size() != static_cast<size_t>(width) * height * 3) {
        throw std::invalid_argument("RGB pixel buffer size mismatch");
    }
}

RgbFrame RgbFrame::filled(int width, int height, uint8_t r, uint8_t g, uint8_t b) {
    std::vector<uint8_t> px(static_cast<size_t>(width) * height * 3);
    for (size_t i = 0; i < px.size(); i += 3) {
        px[i] = r;
        px[i + 1] = g;
        px[i + 2] = b;
    }
    return RgbFrame(width, height, std::move(px));
}

YcbcrFrame444::YcbcrFrame444(int width, int height, std::vector<uint8_t> y,
                             std::vector<uint8_t> cb, std::vector<uint8_t> cr)
    : width_(width), height_(height), y_(std::move(y)), cb_(std::move(cb)), cr_(std::move(cr)) {
    checkDimensions(width, height);
    const size_t n = static_cast<size_t>(width) * height;
    checkPlane(y_, n, "Y", kLumaMin, kLumaMax);
    checkPlane(cb_, n, "Cb", kChromaMin, kChromaMax);
    checkPlane(cr_, n, "Cr", kChromaMin, kChromaMax);
}

YcbcrFrame422::YcbcrFrame422(int width, int height, std::vector<uint8_t> y,
                             std::vector<uint8_t> cb, std::vector<uint8_t> cr)
    : width_(width), height_(height), y_(std::move(y)), cb_(std::move(cb)), cr_(std::move(cr)) {
    checkDimensions(width, height);
    const size_t n = static_cast<size_t>(width) * height;
    checkPlane(y_, n, "Y", kLumaMin, kLumaMax);
    checkPlane(cb_, n / 2, "Cb", kChromaMin, kChromaMax);
    checkPlane(cr_, n / 2, "Cr", kChromaMin, kChromaMax);
}

} // namespace mmlink
