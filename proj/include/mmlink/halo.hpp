#pragma once

#include "mmlink/endpoint.hpp"
#include "mmlink/frame.hpp"
#include "mmlink/link.hpp"
#include "mmlink/stats.hpp"

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mmlink {

struct Thresholds {
    double minPsnrDb = 30.0;
    double maxLossFraction = 0.05; // video: whole frames; audio/chat: packets
    double maxRttMs = 1000.0;      // checked against the p95 round trip
};

// One loopback experiment: stream the media through the full pipeline to an
// echo peer (real sockets) or through the link simulator (in-process, virtual
// time), then score what comes back.
struct ExperimentConfig {
    enum class Mode { sockets, inProcess };
    Mode mode = Mode::sockets;

    Endpoint peer;               // echo service to send to (sockets mode)
    std::string videoPath;       // RVID; empty = no video stream
    std::string audioPath;       // raw PCM s16 BE; empty = no audio stream
    int audioRate = 8000;
    int audioChannels = 1;
    int audioRowsPerPacket = 128;
    int chatLineCount = 0;       // generated chat lines

    std::optional<LinkModel> link; // required for in-process mode
    Thresholds thresholds;
    uint64_t seed = 1;
    double echoTimeoutS = 5.0;
    size_t mtuPayload = kMaxPayload;
    bool paceRealtime = true;    // sockets mode: pace sends on the media timeline
};

struct StreamReport {
    uint64_t packetsSent = 0;
    uint64_t packetsReceived = 0; // returned to the sender
    uint64_t packetsLostReturn = 0; // reorder-declared losses on the return path
    uint64_t reordered = 0;
    uint64_t crcFailures = 0;
    uint64_t malformed = 0;
    uint64_t sendErrors = 0;
    uint64_t framesSent = 0;
    uint64_t framesReturned = 0;

    double packetLossFraction() const {
        return packetsSent == 0
                   ? 0.0
                   : 1.0 - static_cast<double>(packetsReceived) / static_cast<double>(packetsSent);
    }
    double frameLossFraction() const {
        return framesSent == 0
                   ? 0.0
                   : 1.0 - static_cast<double>(framesReturned) / static_cast<double>(framesSent);
    }
};

struct FrameScore {
    uint32_t frameId = 0;
    double psnrDb = 0.0; // +inf marks an exact match
    bool exact = false;
};

struct ScoreStats {
    uint64_t scored = 0;
    uint64_t anomalies = 0; // unknown frame ids, excluded
    uint64_t exactFrames = 0;
    double meanDb = 0.0; // infinite per-frame values capped at 99 dB
    double minDb = 0.0;
    std::vector<FrameScore> perFrame;
};

// Per-frame PSNR of the returned frames against the pipeline-only reference
// (what a lossless link would have returned for the same originals).
ScoreStats scoreFrames(const std::vector<RgbFrame>& sentOriginals,
                       const std::vector<std::pair<uint32_t, RgbFrame>>& returned);

inline constexpr double kPsnrCapDb = 99.0;

struct VideoFrameTrace {
    uint32_t frameId = 0;
    uint64_t sentTsUs = 0;
    bool returned = false;
    uint64_t rttUs = 0;
    double psnrDb = 0.0;
    bool exact = false;
};

struct Verdict {
    bool pass = false;
    std::vector<std::string> failures;
    std::string mode;
    uint64_t seed = 0;

    StreamReport video, audio, chat;
    LatencySummary rtt;
    ScoreStats psnr;

    uint64_t audioRowsSent = 0;
    uint64_t audioRowsReturned = 0;
    bool audioExact = true; // every returned audio payload sample-identical
    uint64_t chatLinesSent = 0;
    uint64_t chatLinesReturned = 0;
    bool chatExact = true;

    Thresholds thresholds;
    std::vector<VideoFrameTrace> videoTrace;
};

std::string verdictToJson(const Verdict& verdict);
std::string videoTraceCsv(const Verdict& verdict);

// Runs the experiment and scores the round trip. Throws FormatError /
// SocketError on unusable configuration; delivery problems land in the
// verdict, not in exceptions.
Verdict runSender(const ExperimentConfig& config);

struct SendReport {
    StreamReport video, audio, chat;
};

// Stream the media to the peer without collecting echoes (the plain `send`
// workflow; pair with a `recv` peer).
SendReport runSendOnly(const ExperimentConfig& config);

std::string sendReportToJson(const SendReport& report);

struct EchoReport {
    uint64_t packetsReceived = 0;
    uint64_t framesEchoed = 0;
    uint64_t packetsEchoed = 0;
    uint64_t crcFailures = 0;
    uint64_t malformed = 0;
    uint64_t sendErrors = 0;
};

// Echo service: binds the endpoint's three ports, reassembles every incoming
// frame and immediately re-fragments it back to the datagram's source with a
// fresh sequence, preserving stream_id, frame_id and timestamp. Runs until
// `stop` becomes true. Malformed input is counted and skipped.
void runEcho(const Endpoint& local, const std::atomic<bool>& stop, EchoReport* report = nullptr);

std::string echoReportToJson(const EchoReport& report);

} // namespace mmlink
