#include "mmlink/media_files.hpp"

#include "mmlink/errors.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>

namespace mmlink {

namespace {

constexpr char kRvidMagic[4] = {'R', 'V', 'I', 'D'};
constexpr size_t kRvidHeaderSize = 13;

uint32_t readU32Be(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | p[3];
}

} // namespace

RvidReader::RvidReader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open video file '" + path + "'");

    uint8_t header[kRvidHeaderSize];
    in_.read(reinterpret_cast<char*>(header), sizeof(header));
    if (in_.gcount() != static_cast<std::streamsize>(sizeof(header))) {
        throw FormatError("'" + path + "' is shorter than an RVID header");
    }
    if (std::memcmp(header, kRvidMagic, 4) != 0) {
        throw FormatError("'" + path + "' is not an RVID file (bad magic)");
    }
    info_.width = (header[4] << 8) | header[5];
    info_.height = (header[6] << 8) | header[7];
    info_.fps = header[8];
    info_.frameCount = readU32Be(header + 9);
    if (info_.width < 1 || info_.height < 1 || info_.width % 2 != 0) {
        throw FormatError("'" + path + "' declares invalid dimensions " +
                          std::to_string(info_.width) + "x" + std::to_string(info_.height));
    }
    if (info_.fps < 1) throw FormatError("'" + path + "' declares fps 0");

    const uintmax_t expected =
        kRvidHeaderSize + static_cast<uintmax_t>(info_.frameCount) * info_.width * info_.height * 3;
    std::error_code ec;
    const uintmax_t actual = std::filesystem::file_size(path, ec);
    if (ec || actual != expected) {
        throw FormatError("'" + path + "' length " + std::to_string(actual) +
                          " does not match header (expected " + std::to_string(expected) + ")");
    }
}

std::optional<RgbFrame> RvidReader::next() {
    if (framesRead_ >= info_.frameCount) return std::nullopt;
    std::vector<uint8_t> pixels(static_cast<size_t>(info_.width) * info_.height * 3);
    in_.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (in_.gcount() != static_cast<std::streamsize>(pixels.size())) {
        throw FormatError("video file truncated mid-frame");
    }
    ++framesRead_;
    return RgbFrame(info_.width, info_.height, std::move(pixels));
}

std::vector<RgbFrame> readAllFrames(const std::string& path, RvidInfo* info) {
    RvidReader reader(path);
    if (info) *info = reader.info();
    std::vector<RgbFrame> frames;
    frames.reserve(reader.info().frameCount);
    while (auto f = reader.next()) frames.push_back(std::move(*f));
    return frames;
}

RvidWriter::RvidWriter(const std::string& path, int width, int height, int fps)
    : out_(path, std::ios::binary), path_(path), width_(width), height_(height) {
    if (!out_) throw FormatError("cannot create video file '" + path + "'");
    if (width < 1 || height < 1 || width % 2 != 0 || width > 65535 || height > 65535) {
        throw std::invalid_argument("invalid RVID dimensions");
    }
    if (fps < 1 || fps > 255) throw std::invalid_argument("fps out of [1, 255]");
    uint8_t header[kRvidHeaderSize] = {};
    std::memcpy(header, kRvidMagic, 4);
    header[4] = static_cast<uint8_t>(width >> 8);
    header[5] = static_cast<uint8_t>(width & 0xFF);
    header[6] = static_cast<uint8_t>(height >> 8);
    header[7] = static_cast<uint8_t>(height & 0xFF);
    header[8] = static_cast<uint8_t>(fps);
    // frame_count patched in close()
    out_.write(reinterpret_cast<char*>(header), sizeof(header));
}

RvidWriter::~RvidWriter() {
    try {
        close();
    } catch (...) {
        // destructor must not throw; an explicit close() reports errors
    }
}

void RvidWriter::add(const RgbFrame& frame) {
    if (frame.width() != width_ || frame.height() != height_) {
        throw std::invalid_argument("frame dimensions do not match the RVID header");
    }
    out_.write(reinterpret_cast<const char*>(frame.pixels().data()),
               static_cast<std::streamsize>(frame.pixels().size()));
    ++frameCount_;
}

void RvidWriter::close() {
    if (closed_) return;
    closed_ = true;
    out_.seekp(9);
    const uint8_t count[4] = {
        static_cast<uint8_t>(frameCount_ >> 24),
        static_cast<uint8_t>(frameCount_ >> 16),
        static_cast<uint8_t>(frameCount_ >> 8),
        static_cast<uint8_t>(frameCount_),
    };
    out_.write(reinterpret_cast<const char*>(count), sizeof(count));
    out_.flush();
    if (!out_) throw FormatError("failed writing video file '" + path_ + "'");
    out_.close();
}

std::vector<int16_t> readPcmS16Be(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open audio file '" + path + "'");
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (bytes.size() % 2 != 0) {
        throw FormatError("'" + path + "' has an odd byte count; expected s16 samples");
    }
    std::vector<int16_t> samples(bytes.size() / 2);
    for (size_t i = 0; i < samples.size(); ++i) {
        samples[i] = static_cast<int16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
    }
    return samples;
}

void writePcmS16Be(const std::string& path, std::span<const int16_t> samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot create audio file '" + path + "'");
    std::vector<uint8_t> bytes;
    bytes.reserve(samples.size() * 2);
    for (int16_t s : samples) {
        const uint16_t u = static_cast<uint16_t>(s);
        bytes.push_back(static_cast<uint8_t>(u >> 8));
        bytes.push_back(static_cast<uint8_t>(u & 0xFF));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("failed writing audio file '" + path + "'");
}

namespace {

// Gentle slopes (wavelengths >= 96 px) keep neighboring chroma close, which is
// what keeps the 4:2:2 round trip in the >= 40 dB regime.
uint8_t gradientSample(double x, double y, double t, double phase) {
    const double tau = 2.0 * std::numbers::pi;
    const double v = 128.0 + 40.0 * std::sin(tau * ((x + 2.0 * t) / 128.0 + phase)) +
                     24.0 * std::sin(tau * ((y + t) / 96.0 + 0.7 * phase));
    return static_cast<uint8_t>(std::lround(v));
}

} // namespace

RgbFrame testPatternFrame(int width, int height, int frameIndex) {
    std::vector<uint8_t> px(static_cast<size_t>(width) * height * 3);
    size_t i = 0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            px[i++] = gradientSample(x, y, frameIndex, 0.0);
            px[i++] = gradientSample(x, y, frameIndex, 0.33);
            px[i++] = gradientSample(x, y, frameIndex, 0.66);
        }
    }
    return RgbFrame(width, height, std::move(px));
}

RgbFrame randomSmoothFrame(std::mt19937& rng, int width, int height, int frameIndex) {
    std::uniform_real_distribution<double> amp(10.0, 40.0);
    std::uniform_real_distribution<double> wavelength(96.0, 256.0);
    std::uniform_real_distribution<double> phase(0.0, 1.0);
    std::uniform_real_distribution<double> drift(0.0, 4.0);

    const double tau = 2.0 * std::numbers::pi;
    struct ChannelField {
        double ax, wx, px, dx;
        double ay, wy, py;
    };
    ChannelField fields[3];
    for (auto& f : fields) {
        f.ax = amp(rng);
        f.wx = wavelength(rng);
        f.px = phase(rng);
        f.dx = drift(rng);
        f.ay = amp(rng);
        f.wy = wavelength(rng);
        f.py = phase(rng);
    }

    std::vector<uint8_t> px(static_cast<size_t>(width) * height * 3);
    size_t i = 0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (const auto& f : fields) {
                const double v = 128.0 +
                                 f.ax * std::sin(tau * ((x + f.dx * frameIndex) / f.wx + f.px)) +
                                 f.ay * std::sin(tau * (y / f.wy + f.py));
                px[i++] = static_cast<uint8_t>(std::lround(v));
            }
        }
    }
    return RgbFrame(width, height, std::move(px));
}

std::vector<int16_t> testToneSamples(int sampleRate, int channels, double seconds) {
    const auto frames = static_cast<size_t>(seconds * sampleRate);
    std::vector<int16_t> samples;
    samples.reserve(frames * channels);
    const double tau = 2.0 * std::numbers::pi;
    for (size_t n = 0; n < frames; ++n) {
        const double t = static_cast<double>(n) / sampleRate;
        for (int c = 0; c < channels; ++c) {
            const double f = 440.0 * (c + 1);
            const double v = 9000.0 * std::sin(tau * f * t) + 3000.0 * std::sin(tau * 3.1 * f * t);
            samples.push_back(static_cast<int16_t>(std::lround(v)));
        }
    }
    return samples;
}

} // namespace mmlink
