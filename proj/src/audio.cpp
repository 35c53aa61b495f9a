#include "mmlink/audio.hpp"

#include "mmlink/errors.hpp"

#include <stdexcept>
#include <string>

namespace mmlink {

AudioBlock::AudioBlock(int rows, int channels, std::vector<int16_t> samples)
    : rows_(rows), channels_(channels), samples_(std::move(samples)) {
    if (rows < 1 || rows > 65535) {
        throw std::invalid_argument("audio block rows out of [1, 65535]: " + std::to_string(rows));
    }
    if (channels < 1 || channels > 255) {
        throw std::invalid_argument("audio channels out of [1, 255]: " + std::to_string(channels));
    }
    if (samples_.size() != static_cast<size_t>(rows) * channels) {
        throw std::invalid_argument("audio sample count mismatch");
    }
}

std::vector<SampleRow> unbuffer(const AudioBlock& block, uint64_t baseIndex) {
    std::vector<SampleRow> rows;
    rows.reserve(block.rows());
    for (int r = 0; r < block.rows(); ++r) {
        SampleRow row;
        row.index = baseIndex + static_cast<uint64_t>(r);
        row.samples.assign(block.samples().begin() + static_cast<size_t>(r) * block.channels(),
                           block.samples().begin() + static_cast<size_t>(r + 1) * block.channels());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::optional<AudioBlock> buffer(std::span<const SampleRow> rows, int rowCount) {
    if (rowCount < 1) throw std::invalid_argument("buffer row count must be >= 1");
    if (rows.size() < static_cast<size_t>(rowCount)) return std::nullopt; // underrun
    const int channels = rows[0].channels();
    std::vector<int16_t> samples;
    samples.reserve(static_cast<size_t>(rowCount) * channels);
    for (int r = 0; r < rowCount; ++r) {
        if (rows[r].channels() != channels) {
            throw std::invalid_argument("mixed channel counts in audio row sequence");
        }
        samples.insert(samples.end(), rows[r].samples.begin(), rows[r].samples.end());
    }
    return AudioBlock(rowCount, channels, std::move(samples));
}

std::vector<uint8_t> packAudio(std::span<const SampleRow> rows) {
    if (rows.empty() || rows.size() > 65535) {
        throw std::invalid_argument("audio payload row count out of [1, 65535]: " +
                                    std::to_string(rows.size()));
    }
    const int channels = rows[0].channels();
    if (channels < 1 || channels > 255) {
        throw std::invalid_argument("audio payload channels out of [1, 255]");
    }
    std::vector<uint8_t> out;
    out.reserve(3 + rows.size() * channels * 2);
    out.push_back(static_cast<uint8_t>(channels));
    out.push_back(static_cast<uint8_t>(rows.size() >> 8));
    out.push_back(static_cast<uint8_t>(rows.size() & 0xFF));
    for (const SampleRow& row : rows) {
        if (row.channels() != channels) {
            throw std::invalid_argument("mixed channel counts in audio payload");
        }
        for (int16_t s : row.samples) {
            const uint16_t u = static_cast<uint16_t>(s);
            out.push_back(static_cast<uint8_t>(u >> 8));
            out.push_back(static_cast<uint8_t>(u & 0xFF));
        }
    }
    return out;
}

std::vector<SampleRow> unpackAudio(std::span<const uint8_t> bytes) {
    if (bytes.size() < 3) {
        throw FormatError("audio payload shorter than 3-byte header");
    }
    const int channels = bytes[0];
    const int rowCount = (bytes[1] << 8) | bytes[2];
    if (channels == 0) throw FormatError("audio payload declares 0 channels");
    if (rowCount == 0) throw FormatError("audio payload declares 0 rows");
    const size_t expected = 3 + static_cast<size_t>(rowCount) * channels * 2;
    if (bytes.size() != expected) {
        throw FormatError("audio payload length " + std::to_string(bytes.size()) +
                          " does not match declared " + std::to_string(rowCount) + "x" +
                          std::to_string(channels));
    }
    std::vector<SampleRow> rows;
    rows.reserve(rowCount);
    size_t pos = 3;
    for (int r = 0; r < rowCount; ++r) {
        SampleRow row;
        row.index = static_cast<uint64_t>(r);
        row.samples.resize(channels);
        for (int c = 0; c < channels; ++c) {
            row.samples[c] = static_cast<int16_t>((bytes[pos] << 8) | bytes[pos + 1]);
            pos += 2;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace mmlink
