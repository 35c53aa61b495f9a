#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mmlink {

// Studio-swing sample bounds (BT.601 8-bit).
inline constexpr uint8_t kLumaMin = 16;
inline constexpr uint8_t kLumaMax = 235;
inline constexpr uint8_t kChromaMin = 16;
inline constexpr uint8_t kChromaMax = 240;

// Gamma-corrected R'G'B' raster, 8 bits per channel, interleaved row-major.
// Width must be even so 4:2:2 chroma geometry stays trivial downstream.
class RgbFrame {
public:
    RgbFrame(int width, int height, std::vector<uint8_t> pixels);

    // Solid-color frame.
    static RgbFrame filled(int width, int height, uint8_t r, uint8_t g, uint8_t b);

    int width() const { return width_; }
    int height() const { return height_; }
    std::span<const uint8_t> pixels() const { return pixels_; }

    // Pointer to the (r,g,b) triplet at (x,y).
    const uint8_t* at(int x, int y) const {
        return pixels_.data() + 3 * (static_cast<size_t>(y) * width_ + x);
    }

    bool operator==(const RgbFrame& other) const = default;

private:
    int width_;
    int height_;
    std::vector<uint8_t> pixels_;
};

// Planar Y'Cb'Cr' at full chroma resolution. All samples studio-range.
class YcbcrFrame444 {
public:
    YcbcrFrame444(int width, int height, std::vector<uint8_t> y,
                  std::vector<uint8_t> cb, std::vector<uint8_t> cr);

    int width() const { return width_; }
    int height() const { return height_; }
    std::span<const uint8_t> y() const { return y_; }
    std::span<const uint8_t> cb() const { return cb_; }
    std::span<const uint8_t> cr() const { return cr_; }

    bool operator==(const YcbcrFrame444& other) const = default;

private:
    int width_;
    int height_;
    std::vector<uint8_t> y_, cb_, cr_;
};

// Planar Y'Cb'Cr' with horizontally half-width chroma planes (4:2:2).
class YcbcrFrame422 {
public:
    YcbcrFrame422(int width, int height, std::vector<uint8_t> y,
                  std::vector<uint8_t> cb, std::vector<uint8_t> cr);

    int width() const { return width_; }
    int height() const { return height_; }
    int chromaWidth() const { return width_ / 2; }
    std::span<const uint8_t> y() const { return y_; }
    std::span<const uint8_t> cb() const { return cb_; }
    std::span<const uint8_t> cr() const { return cr_; }

    bool operator==(const YcbcrFrame422& other) const = default;

private:
    int width_;
    int height_;
    std::vector<uint8_t> y_, cb_, cr_;
};

} // namespace mmlink
