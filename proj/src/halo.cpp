#include "mmlink/halo.hpp"

#include "mmlink/audio.hpp"
#include "mmlink/color.hpp"
#include "mmlink/errors.hpp"
#include "mmlink/media_files.hpp"
#include "mmlink/pipeline.hpp"
#include "mmlink/session.hpp"
#include "mmlink/udp.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace mmlink {

namespace {

using OrderedJson = nlohmann::ordered_json;

size_t streamIndex(StreamId id) { return static_cast<size_t>(id) - 1; }

uint64_t monotonicNowUs() {
    return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(
                                     std::chrono::steady_clock::now().time_since_epoch())
                                     .count());
}

size_t wireSize(const MediaPacket& packet) {
    return kHeaderSize + packet.payload.size() + kTrailerSize;
}

// One stream payload scheduled on the media timeline.
struct MediaEvent {
    StreamId stream;
    uint64_t tsUs = 0;
    uint32_t frameId = 0;
    std::vector<uint8_t> payload;
};

struct PreparedMedia {
    std::vector<RgbFrame> videoFrames;
    std::vector<MediaEvent> events; // sorted by timestamp
    std::vector<std::vector<uint8_t>> audioPayloads; // indexed by frame id
    std::vector<std::string> chatPayloads;           // indexed by frame id
    uint64_t audioRowsSent = 0;
    uint64_t chatLinesSent = 0;
    uint64_t timelineEndUs = 0;
};

PreparedMedia prepareMedia(const ExperimentConfig& cfg) {
    PreparedMedia media;

    if (!cfg.videoPath.empty()) {
        RvidInfo info;
        media.videoFrames = readAllFrames(cfg.videoPath, &info);
        const double frameIntervalUs = 1e6 / info.fps;
        for (size_t i = 0; i < media.videoFrames.size(); ++i) {
            MediaEvent ev;
            ev.stream = StreamId::video;
            ev.tsUs = static_cast<uint64_t>(i * frameIntervalUs);
            ev.frameId = static_cast<uint32_t>(i);
            ev.payload = encodeVideoFrame(media.videoFrames[i]);
            media.events.push_back(std::move(ev));
        }
    }

    if (!cfg.audioPath.empty()) {
        const std::vector<int16_t> samples = readPcmS16Be(cfg.audioPath);
        if (cfg.audioChannels < 1 || cfg.audioChannels > 255) {
            throw FormatError("audio channels out of [1, 255]");
        }
        if (samples.size() % cfg.audioChannels != 0) {
            throw FormatError("PCM sample count is not a multiple of the channel count");
        }
        const size_t totalRows = samples.size() / cfg.audioChannels;
        uint32_t packetId = 0;
        for (size_t row = 0; row < totalRows; row += cfg.audioRowsPerPacket) {
            const size_t rows = std::min<size_t>(cfg.audioRowsPerPacket, totalRows - row);
            std::vector<SampleRow> batch(rows);
            for (size_t r = 0; r < rows; ++r) {
                batch[r].index = row + r;
                batch[r].samples.assign(
                    samples.begin() + static_cast<ptrdiff_t>((row + r) * cfg.audioChannels),
                    samples.begin() + static_cast<ptrdiff_t>((row + r + 1) * cfg.audioChannels));
            }
            MediaEvent ev;
            ev.stream = StreamId::audio;
            ev.tsUs = static_cast<uint64_t>(1e6 * row / cfg.audioRate);
            ev.frameId = packetId++;
            ev.payload = packAudio(batch);
            media.audioPayloads.push_back(ev.payload);
            media.events.push_back(std::move(ev));
            media.audioRowsSent += rows;
        }
    }

    if (cfg.chatLineCount > 0) {
        uint32_t chatFrameId = 0;
        for (int k = 0; k < cfg.chatLineCount; ++k) {
            const std::string line = "chat line " + std::to_string(k) + "\n";
            for (const std::string& chunk : splitChatLine(line, cfg.mtuPayload)) {
                MediaEvent ev;
                ev.stream = StreamId::chat;
                ev.tsUs = static_cast<uint64_t>(k) * 100000; // 10 lines/s
                ev.frameId = chatFrameId++;
                ev.payload.assign(chunk.begin(), chunk.end());
                media.chatPayloads.push_back(chunk);
                media.events.push_back(std::move(ev));
            }
        }
        media.chatLinesSent = static_cast<uint64_t>(cfg.chatLineCount);
    }

    if (media.events.empty()) {
        throw FormatError("nothing to send: no video, no audio, no chat configured");
    }

    std::stable_sort(media.events.begin(), media.events.end(),
                     [](const MediaEvent& a, const MediaEvent& b) { return a.tsUs < b.tsUs; });
    media.timelineEndUs = media.events.back().tsUs;
    return media;
}

// Everything the sender collects about one stream's round trip.
struct ReturnBin {
    std::mutex mutex;
    std::vector<std::pair<uint32_t, std::vector<uint8_t>>> frames; // frame id, payload bytes
    std::vector<uint64_t> rtts;
    std::vector<std::pair<uint32_t, uint64_t>> completions; // frame id, rtt (video trace)

    void record(const Reassembler::CompletedFrame& frame, uint64_t arrivalUs) {
        const uint64_t rtt = arrivalUs >= frame.timestampUs ? arrivalUs - frame.timestampUs : 0;
        std::lock_guard<std::mutex> lock(mutex);
        frames.emplace_back(frame.frameId, frame.bytes);
        rtts.push_back(rtt);
        completions.emplace_back(frame.frameId, rtt);
    }
};

struct SentCounters {
    uint64_t packets = 0;
    uint64_t frames = 0;
    uint64_t sendErrors = 0;
};

StreamReport makeReport(const SentCounters& sent, const StreamStats& stats) {
    StreamReport r;
    r.packetsSent = sent.packets;
    r.framesSent = sent.frames;
    r.sendErrors = sent.sendErrors;
    r.packetsReceived = stats.received.load();
    r.packetsLostReturn = stats.lost.load();
    r.reordered = stats.reordered.load();
    r.crcFailures = stats.crcFailures.load();
    r.malformed = stats.malformed.load();
    r.framesReturned = stats.framesComplete.load();
    return r;
}

double cappedDb(double psnrDb) { return std::isinf(psnrDb) ? kPsnrCapDb : std::min(psnrDb, kPsnrCapDb); }

void scoreReturns(Verdict& verdict, const ExperimentConfig& cfg, const PreparedMedia& media,
                  std::array<ReturnBin, 3>& bins,
                  const std::vector<std::pair<uint32_t, uint64_t>>& videoSendTimes) {
    // video: PSNR against the pipeline-only reference
    std::vector<std::pair<uint32_t, RgbFrame>> returnedFrames;
    uint64_t undecodable = 0;
    {
        auto& bin = bins[streamIndex(StreamId::video)];
        for (const auto& [frameId, bytes] : bin.frames) {
            try {
                returnedFrames.emplace_back(frameId, decodeVideoFrame(bytes));
            } catch (const FormatError&) {
                ++undecodable;
            }
        }
    }
    verdict.psnr = scoreFrames(media.videoFrames, returnedFrames);
    verdict.psnr.anomalies += undecodable;

    // per-frame trace rows, returned or not
    {
        auto& bin = bins[streamIndex(StreamId::video)];
        std::map<uint32_t, uint64_t> rttById(bin.completions.begin(), bin.completions.end());
        std::map<uint32_t, const FrameScore*> scoreById;
        for (const auto& s : verdict.psnr.perFrame) scoreById[s.frameId] = &s;
        for (const auto& [frameId, sentTs] : videoSendTimes) {
            VideoFrameTrace row;
            row.frameId = frameId;
            row.sentTsUs = sentTs;
            auto rtt = rttById.find(frameId);
            auto score = scoreById.find(frameId);
            if (rtt != rttById.end() && score != scoreById.end()) {
                row.returned = true;
                row.rttUs = rtt->second;
                row.psnrDb = cappedDb(score->second->psnrDb);
                row.exact = score->second->exact;
            }
            verdict.videoTrace.push_back(row);
        }
    }

    // audio: sample-exact comparison against what was sent
    {
        auto& bin = bins[streamIndex(StreamId::audio)];
        for (const auto& [frameId, bytes] : bin.frames) {
            if (frameId >= media.audioPayloads.size()) {
                verdict.audioExact = false;
                continue;
            }
            if (bytes != media.audioPayloads[frameId]) {
                verdict.audioExact = false;
                continue;
            }
            verdict.audioRowsReturned += unpackAudio(bytes).size();
        }
    }
    verdict.audioRowsSent = media.audioRowsSent;

    // chat: verbatim echo required
    {
        auto& bin = bins[streamIndex(StreamId::chat)];
        for (const auto& [frameId, bytes] : bin.frames) {
            if (frameId >= media.chatPayloads.size()) {
                verdict.chatExact = false;
                continue;
            }
            const std::string& sent = media.chatPayloads[frameId];
            if (bytes.size() != sent.size() ||
                !std::equal(bytes.begin(), bytes.end(), sent.begin())) {
                verdict.chatExact = false;
                continue;
            }
            if (!bytes.empty() && bytes.back() == '\n') ++verdict.chatLinesReturned;
        }
    }
    verdict.chatLinesSent = media.chatLinesSent;

    // round-trip latency across all streams
    std::vector<uint64_t> rtts;
    for (auto& bin : bins) {
        rtts.insert(rtts.end(), bin.rtts.begin(), bin.rtts.end());
    }
    verdict.rtt = summarizeLatency(std::move(rtts));

    verdict.seed = cfg.seed;
    verdict.thresholds = cfg.thresholds;
}

void evaluateVerdict(Verdict& verdict) {
    const Thresholds& t = verdict.thresholds;
    const uint64_t totalSent =
        verdict.video.packetsSent + verdict.audio.packetsSent + verdict.chat.packetsSent;
    const uint64_t totalReceived =
        verdict.video.packetsReceived + verdict.audio.packetsReceived + verdict.chat.packetsReceived;

    if (totalSent > 0 && totalReceived == 0) {
        verdict.failures.push_back("no echoes received within the timeout");
    }
    if (verdict.video.framesSent > 0) {
        if (verdict.video.frameLossFraction() > t.maxLossFraction) {
            std::ostringstream os;
            os << "video frame loss " << verdict.video.frameLossFraction() << " exceeds "
               << t.maxLossFraction;
            verdict.failures.push_back(os.str());
        }
        if (verdict.psnr.scored > 0 && verdict.psnr.meanDb < t.minPsnrDb) {
            std::ostringstream os;
            os << "mean PSNR " << verdict.psnr.meanDb << " dB below " << t.minPsnrDb << " dB";
            verdict.failures.push_back(os.str());
        }
    }
    if (verdict.audio.packetsSent > 0) {
        if (verdict.audio.packetLossFraction() > t.maxLossFraction) {
            std::ostringstream os;
            os << "audio packet loss " << verdict.audio.packetLossFraction() << " exceeds "
               << t.maxLossFraction;
            verdict.failures.push_back(os.str());
        }
        if (!verdict.audioExact) verdict.failures.push_back("returned audio is not sample-exact");
    }
    if (verdict.chat.packetsSent > 0) {
        if (verdict.chat.packetLossFraction() > t.maxLossFraction) {
            verdict.failures.push_back("chat packet loss exceeds the threshold");
        }
        if (!verdict.chatExact) verdict.failures.push_back("chat lines were not echoed verbatim");
    }
    if (verdict.rtt.count > 0 && verdict.rtt.p95Us > t.maxRttMs * 1000.0) {
        std::ostringstream os;
        os << "p95 round trip " << verdict.rtt.p95Us / 1000.0 << " ms exceeds " << t.maxRttMs
           << " ms";
        verdict.failures.push_back(os.str());
    }
    verdict.pass = verdict.failures.empty();
}

Verdict runInProcess(const ExperimentConfig& cfg, const PreparedMedia& media) {
    LinkModel link = *cfg.link;
    link.seed = link.seed ^ cfg.seed; // experiment seed folds into the channel
    LinkSimulator legToEcho(link, 0xA5);
    LinkSimulator legToSender(link, 0x5A);
    const uint64_t hop = link.hopDelayUs;

    std::array<Packetizer, 3> senderTx{Packetizer(StreamId::audio), Packetizer(StreamId::video),
                                       Packetizer(StreamId::chat)};
    std::array<Packetizer, 3> echoTx{Packetizer(StreamId::audio), Packetizer(StreamId::video),
                                     Packetizer(StreamId::chat)};
    std::array<StreamReceiver, 3> echoRx{StreamReceiver(StreamId::audio, 0),
                                         StreamReceiver(StreamId::video, 0),
                                         StreamReceiver(StreamId::chat, 0)};
    std::array<StreamReceiver, 3> senderRx{StreamReceiver(StreamId::audio),
                                           StreamReceiver(StreamId::video),
                                           StreamReceiver(StreamId::chat)};
    std::array<ReturnBin, 3> bins;
    std::array<SentCounters, 3> sent;
    std::vector<std::pair<uint32_t, uint64_t>> videoSendTimes;

    auto deliverBack = [&](MediaPacket packet, uint64_t arrivalUs) {
        const size_t i = streamIndex(packet.streamId);
        for (const auto& frame : senderRx[i].onPacket(std::move(packet))) {
            bins[i].record(frame, arrivalUs);
        }
    };

    auto echoFrame = [&](const Reassembler::CompletedFrame& frame, StreamId stream,
                         uint64_t echoTsUs) {
        const size_t i = streamIndex(stream);
        auto packets = echoTx[i].packetize(frame.bytes, frame.frameId, frame.timestampUs,
                                           cfg.mtuPayload);
        for (auto& pkt : packets) {
            const LinkDecision d = legToSender.offer({stream, echoTsUs, static_cast<uint32_t>(
                                                                            wireSize(pkt))});
            if (d.delivered) deliverBack(std::move(pkt), echoTsUs + hop);
        }
    };

    for (const MediaEvent& ev : media.events) {
        const size_t i = streamIndex(ev.stream);
        auto packets = senderTx[i].packetize(ev.payload, ev.frameId, ev.tsUs, cfg.mtuPayload);
        sent[i].packets += packets.size();
        ++sent[i].frames;
        if (ev.stream == StreamId::video) videoSendTimes.emplace_back(ev.frameId, ev.tsUs);

        for (auto& pkt : packets) {
            const LinkDecision d =
                legToEcho.offer({ev.stream, ev.tsUs, static_cast<uint32_t>(wireSize(pkt))});
            if (!d.delivered) continue;
            for (const auto& frame : echoRx[i].onPacket(std::move(pkt))) {
                echoFrame(frame, ev.stream, ev.tsUs + hop);
            }
        }
    }

    // end of stream: resolve the reorder windows on both sides
    const uint64_t endUs = media.timelineEndUs;
    for (size_t i = 0; i < 3; ++i) {
        const StreamId stream = static_cast<StreamId>(i + 1);
        for (const auto& frame : echoRx[i].finish()) echoFrame(frame, stream, endUs + hop);
    }
    for (size_t i = 0; i < 3; ++i) {
        for (const auto& frame : senderRx[i].finish()) bins[i].record(frame, endUs + 2 * hop);
    }

    Verdict verdict;
    verdict.mode = "in-process";
    verdict.video = makeReport(sent[streamIndex(StreamId::video)],
                               senderRx[streamIndex(StreamId::video)].stats());
    verdict.audio = makeReport(sent[streamIndex(StreamId::audio)],
                               senderRx[streamIndex(StreamId::audio)].stats());
    verdict.chat = makeReport(sent[streamIndex(StreamId::chat)],
                              senderRx[streamIndex(StreamId::chat)].stats());
    scoreReturns(verdict, cfg, media, bins, videoSendTimes);
    evaluateVerdict(verdict);
    return verdict;
}

Verdict runSockets(const ExperimentConfig& cfg, const PreparedMedia& media) {
    cfg.peer.validate();

    std::array<UdpSocket, 3> sockets; // indexed by streamIndex
    for (auto& s : sockets) {
        s.bind(0);
        s.setReceiveBufferBytes(4 << 20);
    }

    std::array<StreamReceiver, 3> receivers{StreamReceiver(StreamId::audio),
                                            StreamReceiver(StreamId::video),
                                            StreamReceiver(StreamId::chat)};
    std::array<ReturnBin, 3> bins;
    std::array<SentCounters, 3> sent;
    std::vector<std::pair<uint32_t, uint64_t>> videoSendTimes;

    std::atomic<bool> stopRx{false};
    std::array<std::thread, 3> rxThreads;
    for (size_t i = 0; i < 3; ++i) {
        rxThreads[i] = std::thread([&, i] {
            while (!stopRx.load(std::memory_order_relaxed)) {
                auto dg = sockets[i].receive(20);
                if (!dg) continue;
                for (const auto& frame : receivers[i].onDatagram(dg->bytes)) {
                    bins[i].record(frame, monotonicNowUs());
                }
            }
        });
    }

    std::array<Packetizer, 3> senderTx{Packetizer(StreamId::audio), Packetizer(StreamId::video),
                                       Packetizer(StreamId::chat)};
    const auto start = std::chrono::steady_clock::now();
    for (const MediaEvent& ev : media.events) {
        if (cfg.paceRealtime) {
            std::this_thread::sleep_until(start + std::chrono::microseconds(ev.tsUs));
        }
        const size_t i = streamIndex(ev.stream);
        const uint64_t sendTs = monotonicNowUs();
        auto packets = senderTx[i].packetize(ev.payload, ev.frameId, sendTs, cfg.mtuPayload);
        sent[i].packets += packets.size();
        ++sent[i].frames;
        if (ev.stream == StreamId::video) videoSendTimes.emplace_back(ev.frameId, sendTs);

        for (const auto& pkt : packets) {
            const auto bytes = encodePacket(pkt);
            std::string error;
            if (!sockets[i].sendTo(cfg.peer.address, cfg.peer.portFor(ev.stream), bytes, &error)) {
                ++sent[i].sendErrors;
                std::fprintf(stderr, "send error (%s): %s\n", streamName(ev.stream),
                             error.c_str());
            }
        }
    }

    // wait for the echoes to drain, bounded by the timeout
    auto allReturned = [&] {
        for (size_t i = 0; i < 3; ++i) {
            std::lock_guard<std::mutex> lock(bins[i].mutex);
            if (bins[i].frames.size() < sent[i].frames) return false;
        }
        return true;
    };
    const auto deadline =
        std::chrono::steady_clock::now() +
        std::chrono::milliseconds(static_cast<int64_t>(cfg.echoTimeoutS * 1000));
    while (std::chrono::steady_clock::now() < deadline && !allReturned()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    stopRx = true;
    for (auto& t : rxThreads) t.join();
    for (size_t i = 0; i < 3; ++i) {
        for (const auto& frame : receivers[i].finish()) {
            bins[i].record(frame, monotonicNowUs());
        }
    }

    Verdict verdict;
    verdict.mode = "sockets";
    verdict.video = makeReport(sent[streamIndex(StreamId::video)],
                               receivers[streamIndex(StreamId::video)].stats());
    verdict.audio = makeReport(sent[streamIndex(StreamId::audio)],
                               receivers[streamIndex(StreamId::audio)].stats());
    verdict.chat = makeReport(sent[streamIndex(StreamId::chat)],
                              receivers[streamIndex(StreamId::chat)].stats());
    scoreReturns(verdict, cfg, media, bins, videoSendTimes);
    evaluateVerdict(verdict);
    return verdict;
}

OrderedJson reportJson(const StreamReport& r, bool withFrames) {
    OrderedJson j;
    j["packets_sent"] = r.packetsSent;
    j["packets_received"] = r.packetsReceived;
    j["packet_loss_fraction"] = r.packetLossFraction();
    j["return_path_lost"] = r.packetsLostReturn;
    j["reordered"] = r.reordered;
    j["crc_failures"] = r.crcFailures;
    j["malformed"] = r.malformed;
    j["send_errors"] = r.sendErrors;
    if (withFrames) {
        j["frames_sent"] = r.framesSent;
        j["frames_returned"] = r.framesReturned;
        j["frame_loss_fraction"] = r.frameLossFraction();
    }
    return j;
}

} // namespace

ScoreStats scoreFrames(const std::vector<RgbFrame>& sentOriginals,
                       const std::vector<std::pair<uint32_t, RgbFrame>>& returned) {
    ScoreStats stats;
    // pipeline-only references, computed once per original actually compared
    std::map<uint32_t, RgbFrame> references;

    double sum = 0.0;
    double minDb = std::numeric_limits<double>::infinity();
    for (const auto& [frameId, frame] : returned) {
        if (frameId >= sentOriginals.size()) {
            ++stats.anomalies;
            continue;
        }
        auto ref = references.find(frameId);
        if (ref == references.end()) {
            ref = references.emplace(frameId, pipelineReference(sentOriginals[frameId])).first;
        }
        FrameScore score;
        score.frameId = frameId;
        score.psnrDb = psnr(ref->second, frame);
        score.exact = std::isinf(score.psnrDb);
        if (score.exact) ++stats.exactFrames;
        const double capped = cappedDb(score.psnrDb);
        sum += capped;
        minDb = std::min(minDb, capped);
        stats.perFrame.push_back(score);
        ++stats.scored;
    }
    if (stats.scored > 0) {
        stats.meanDb = sum / static_cast<double>(stats.scored);
        stats.minDb = minDb;
    }
    return stats;
}

std::string verdictToJson(const Verdict& v) {
    OrderedJson j;
    j["pass"] = v.pass;
    j["failures"] = v.failures;
    j["mode"] = v.mode;
    j["seed"] = v.seed;
    j["streams"]["video"] = reportJson(v.video, true);
    j["streams"]["audio"] = reportJson(v.audio, false);
    j["streams"]["chat"] = reportJson(v.chat, false);
    j["rtt_us"] = {{"count", v.rtt.count},
                   {"mean", v.rtt.meanUs},
                   {"p50", v.rtt.p50Us},
                   {"p95", v.rtt.p95Us},
                   {"max", v.rtt.maxUs}};
    j["psnr_db"] = {{"frames_scored", v.psnr.scored},
                    {"exact_frames", v.psnr.exactFrames},
                    {"anomalies", v.psnr.anomalies},
                    {"mean", v.psnr.meanDb},
                    {"min", v.psnr.minDb}};
    j["audio"] = {{"rows_sent", v.audioRowsSent},
                  {"rows_returned", v.audioRowsReturned},
                  {"sample_exact", v.audioExact}};
    j["chat"] = {{"lines_sent", v.chatLinesSent},
                 {"lines_returned", v.chatLinesReturned},
                 {"verbatim", v.chatExact}};
    j["thresholds"] = {{"min_psnr_db", v.thresholds.minPsnrDb},
                       {"max_loss_fraction", v.thresholds.maxLossFraction},
                       {"max_rtt_ms", v.thresholds.maxRttMs}};
    return j.dump(2);
}

std::string videoTraceCsv(const Verdict& v) {
    std::ostringstream os;
    os << "frame_id,sent_ts_us,status,rtt_us,psnr_db,exact\n";
    for (const auto& row : v.videoTrace) {
        os << row.frameId << ',' << row.sentTsUs << ',';
        if (row.returned) {
            os << "returned," << row.rttUs << ',' << row.psnrDb << ',' << (row.exact ? 1 : 0);
        } else {
            os << "dropped,,,";
        }
        os << '\n';
    }
    return os.str();
}

SendReport runSendOnly(const ExperimentConfig& cfg) {
    const PreparedMedia media = prepareMedia(cfg);
    cfg.peer.validate();

    std::array<UdpSocket, 3> sockets;
    std::array<Packetizer, 3> tx{Packetizer(StreamId::audio), Packetizer(StreamId::video),
                                 Packetizer(StreamId::chat)};
    std::array<SentCounters, 3> sent;

    const auto start = std::chrono::steady_clock::now();
    for (const MediaEvent& ev : media.events) {
        if (cfg.paceRealtime) {
            std::this_thread::sleep_until(start + std::chrono::microseconds(ev.tsUs));
        }
        const size_t i = streamIndex(ev.stream);
        auto packets = tx[i].packetize(ev.payload, ev.frameId, monotonicNowUs(), cfg.mtuPayload);
        sent[i].packets += packets.size();
        ++sent[i].frames;
        for (const auto& pkt : packets) {
            std::string error;
            if (!sockets[i].sendTo(cfg.peer.address, cfg.peer.portFor(ev.stream),
                                   encodePacket(pkt), &error)) {
                ++sent[i].sendErrors;
                std::fprintf(stderr, "send error (%s): %s\n", streamName(ev.stream),
                             error.c_str());
            }
        }
    }

    SendReport report;
    StreamStats empty;
    report.video = makeReport(sent[streamIndex(StreamId::video)], empty);
    report.audio = makeReport(sent[streamIndex(StreamId::audio)], empty);
    report.chat = makeReport(sent[streamIndex(StreamId::chat)], empty);
    return report;
}

std::string sendReportToJson(const SendReport& r) {
    OrderedJson j;
    for (const auto& [name, stream] :
         {std::pair<const char*, const StreamReport*>{"video", &r.video},
          {"audio", &r.audio},
          {"chat", &r.chat}}) {
        OrderedJson s;
        s["packets_sent"] = stream->packetsSent;
        s["frames_sent"] = stream->framesSent;
        s["send_errors"] = stream->sendErrors;
        j["streams"][name] = s;
    }
    return j.dump(2);
}

Verdict runSender(const ExperimentConfig& cfg) {
    const PreparedMedia media = prepareMedia(cfg);
    if (cfg.mode == ExperimentConfig::Mode::inProcess) {
        if (!cfg.link.has_value()) {
            throw FormatError("in-process mode requires a link model (--link-config)");
        }
        return runInProcess(cfg, media);
    }
    return runSockets(cfg, media);
}

void runEcho(const Endpoint& local, const std::atomic<bool>& stop, EchoReport* report) {
    local.validate();
    std::array<UdpSocket, 3> sockets;
    sockets[streamIndex(StreamId::audio)].bind(local.audioPort);
    sockets[streamIndex(StreamId::video)].bind(local.videoPort);
    sockets[streamIndex(StreamId::chat)].bind(local.chatPort);
    for (auto& s : sockets) s.setReceiveBufferBytes(4 << 20);

    std::array<StreamReceiver, 3> receivers{StreamReceiver(StreamId::audio, 0),
                                            StreamReceiver(StreamId::video, 0),
                                            StreamReceiver(StreamId::chat, 0)};
    std::array<Packetizer, 3> echoTx{Packetizer(StreamId::audio), Packetizer(StreamId::video),
                                     Packetizer(StreamId::chat)};
    std::array<std::pair<std::string, uint16_t>, 3> replyTo;
    EchoReport localReport;

    while (!stop.load(std::memory_order_relaxed)) {
        bool sawTraffic = false;
        for (size_t i = 0; i < 3; ++i) {
            while (auto dg = sockets[i].receive(0)) {
                sawTraffic = true;
                replyTo[i] = {dg->fromAddress, dg->fromPort};
                for (const auto& frame : receivers[i].onDatagram(dg->bytes)) {
                    ++localReport.framesEchoed;
                    auto packets = echoTx[i].packetize(frame.bytes, frame.frameId,
                                                       frame.timestampUs);
                    for (const auto& pkt : packets) {
                        std::string error;
                        if (sockets[i].sendTo(replyTo[i].first, replyTo[i].second,
                                              encodePacket(pkt), &error)) {
                            ++localReport.packetsEchoed;
                        } else {
                            ++localReport.sendErrors;
                            std::fprintf(stderr, "echo send error: %s\n", error.c_str());
                        }
                    }
                }
            }
        }
        if (!sawTraffic) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }

    for (const auto& rx : receivers) {
        localReport.packetsReceived += rx.stats().received.load();
        localReport.crcFailures += rx.stats().crcFailures.load();
        localReport.malformed += rx.stats().malformed.load();
    }
    if (report) *report = localReport;
}

std::string echoReportToJson(const EchoReport& r) {
    OrderedJson j;
    j["packets_received"] = r.packetsReceived;
    j["frames_echoed"] = r.framesEchoed;
    j["packets_echoed"] = r.packetsEchoed;
    j["crc_failures"] = r.crcFailures;
    j["malformed"] = r.malformed;
    j["send_errors"] = r.sendErrors;
    return j.dump(2);
}

} // namespace mmlink
