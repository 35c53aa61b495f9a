#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mmlink {

// M-by-N frame of signed 16-bit samples, row-major: M time samples, N channels.
// Bounds come from the wire format (channels 1 byte, row count 2 bytes).
class AudioBlock {
public:
    AudioBlock(int rows, int channels, std::vector<int16_t> samples);

    int rows() const { return rows_; }
    int channels() const { return channels_; }
    std::span<const int16_t> samples() const { return samples_; }
    int16_t at(int row, int ch) const {
        return samples_[static_cast<size_t>(row) * channels_ + ch];
    }

    bool operator==(const AudioBlock& other) const = default;

private:
    int rows_;
    int channels_;
    std::vector<int16_t> samples_;
};

// One time sample across all channels, with its position in the stream.
struct SampleRow {
    std::vector<int16_t> samples;
    uint64_t index = 0;

    int channels() const { return static_cast<int>(samples.size()); }
};

// Row-wise unbuffering: emits the block's M rows top to bottom, row k carrying
// stream index baseIndex + k.
std::vector<SampleRow> unbuffer(const AudioBlock& block, uint64_t baseIndex = 0);

// Consumes exactly `rows` leading entries into one block, preserving order.
// Returns nullopt (underrun) when fewer rows are available; the caller retries
// once more rows have arrived. Throws std::invalid_argument on mixed channel
// counts.
std::optional<AudioBlock> buffer(std::span<const SampleRow> rows, int rowCount);

// Audio payload layout (the audio stream payload):
//   channels (1B) | row count (2B big-endian) | samples time-major, s16 big-endian
// The stream index is not serialized; transport sequencing carries ordering.
std::vector<uint8_t> packAudio(std::span<const SampleRow> rows);

// Inverse of packAudio; emitted rows are indexed 0..n-1.
// Throws FormatError on truncated or inconsistent payloads.
std::vector<SampleRow> unpackAudio(std::span<const uint8_t> bytes);

} // namespace mmlink
