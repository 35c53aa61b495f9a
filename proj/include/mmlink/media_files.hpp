#pragma once

#include "mmlink/frame.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mmlink {

// Raw test-video container:
//   "RVID" | width (2B BE) | height (2B BE) | fps (1B) | frame_count (4B BE)
//   followed by frame_count frames of width*height*3 interleaved RGB bytes.
// File length must equal 13 + frame_count*width*height*3.
struct RvidInfo {
    int width = 0;
    int height = 0;
    int fps = 0;
    uint32_t frameCount = 0;
};

class RvidReader {
public:
    // Validates the magic, dimensions and the length invariant up front;
    // throws FormatError before any frame is streamed.
    explicit RvidReader(const std::string& path);

    const RvidInfo& info() const { return info_; }
    std::optional<RgbFrame> next();

private:
    std::ifstream in_;
    RvidInfo info_;
    uint32_t framesRead_ = 0;
};

class RvidWriter {
public:
    RvidWriter(const std::string& path, int width, int height, int fps);
    ~RvidWriter();

    void add(const RgbFrame& frame); // dimensions must match
    void close();                    // patches frame_count into the header

private:
    std::ofstream out_;
    std::string path_;
    int width_, height_;
    uint32_t frameCount_ = 0;
    bool closed_ = false;
};

std::vector<RgbFrame> readAllFrames(const std::string& path, RvidInfo* info = nullptr);

// Headerless PCM, signed 16-bit big-endian. Sample rate and channel count are
// caller-side metadata.
std::vector<int16_t> readPcmS16Be(const std::string& path);
void writePcmS16Be(const std::string& path, std::span<const int16_t> samples);

// Deterministic moving-gradient pattern, channel values kept well inside the
// gamut so the 4:2:2 pipeline stays in its high-quality regime.
RgbFrame testPatternFrame(int width, int height, int frameIndex);

// A random member of the same smooth-gradient family (random wavelengths,
// phases and drift per channel).
RgbFrame randomSmoothFrame(std::mt19937& rng, int width, int height, int frameIndex = 0);

// Deterministic multi-tone test signal, interleaved by channel.
std::vector<int16_t> testToneSamples(int sampleRate, int channels, double seconds);

} // namespace mmlink
