// mmlink: multimedia-over-UDP transceiver, echo/loopback harness and
// physical-link simulator in one binary.
//
// Exit codes: 0 success (or pass verdict), 1 fail verdict, 2 usage/input error.

#include "mmlink/audio.hpp"
#include "mmlink/errors.hpp"
#include "mmlink/experiment_config.hpp"
#include "mmlink/halo.hpp"
#include "mmlink/link_config.hpp"
#include "mmlink/media_files.hpp"
#include "mmlink/pipeline.hpp"
#include "mmlink/session.hpp"
#include "mmlink/udp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

using namespace mmlink;
using OrderedJson = nlohmann::ordered_json;

namespace {

std::atomic<bool> gStop{false};

void onSignal(int) { gStop = true; }

void installSignalHandlers() {
    std::signal(SIGINT, onSignal);
    std::signal(SIGTERM, onSignal);
}

void writeTextFile(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << content;
}

void emitJson(const std::string& json, const std::string& jsonOutPath) {
    std::cout << json << std::endl;
    if (!jsonOutPath.empty()) writeTextFile(jsonOutPath, json + "\n");
}

struct EndpointFlags {
    std::string peer = "127.0.0.1";
    uint16_t videoPort = 5001;
    uint16_t audioPort = 5002;
    uint16_t chatPort = 5003;

    void attach(CLI::App* app, bool withPeer) {
        if (withPeer) app->add_option("--peer", peer, "peer IPv4 address");
        app->add_option("--video-port", videoPort, "video stream UDP port");
        app->add_option("--audio-port", audioPort, "audio stream UDP port");
        app->add_option("--chat-port", chatPort, "chat stream UDP port");
    }

    Endpoint endpoint() const {
        Endpoint e;
        e.address = peer;
        e.videoPort = videoPort;
        e.audioPort = audioPort;
        e.chatPort = chatPort;
        e.validate();
        return e;
    }
};

struct MediaFlags {
    std::string videoPath;
    std::string audioPath;
    int audioRate = 8000;
    int audioChannels = 1;
    int chatCount = 0;

    void attach(CLI::App* app) {
        app->add_option("--video", videoPath, "RVID video file to stream");
        app->add_option("--audio", audioPath, "raw PCM (s16 big-endian) audio file to stream");
        app->add_option("--audio-rate", audioRate, "audio sample rate, Hz")
            ->check(CLI::PositiveNumber);
        app->add_option("--audio-channels", audioChannels, "audio channel count")
            ->check(CLI::Range(1, 255));
        app->add_option("--chat-count", chatCount, "number of generated chat lines to send")
            ->check(CLI::NonNegativeNumber);
    }
};

uint64_t nowUs() {
    return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::microseconds>(
                                     std::chrono::steady_clock::now().time_since_epoch())
                                     .count());
}

// --- gen ---------------------------------------------------------------

bool parseVideoSpec(const std::string& spec, int& w, int& h, int& fps, int& count) {
    return std::sscanf(spec.c_str(), "%dx%d@%d,%d", &w, &h, &fps, &count) == 4 && w > 0 &&
           h > 0 && fps > 0 && count >= 0;
}

bool parseAudioSpec(const std::string& spec, double& seconds, int& rate, int& channels) {
    return std::sscanf(spec.c_str(), "%lf@%d,%d", &seconds, &rate, &channels) == 3 &&
           seconds >= 0 && rate > 0 && channels > 0;
}

int cmdGen(const std::string& videoSpec, const std::string& videoOut,
           const std::string& audioSpec, const std::string& audioOut) {
    if (videoSpec.empty() && audioSpec.empty()) {
        std::cerr << "gen: nothing to do; pass --gen-test-video and/or --gen-test-audio\n";
        return 2;
    }
    if (!videoSpec.empty()) {
        int w, h, fps, count;
        if (!parseVideoSpec(videoSpec, w, h, fps, count)) {
            std::cerr << "gen: bad video spec '" << videoSpec << "' (expected WxH@fps,N)\n";
            return 2;
        }
        if (w % 2 != 0) {
            std::cerr << "gen: width must be even, got " << w << "\n";
            return 2;
        }
        RvidWriter writer(videoOut, w, h, fps);
        for (int i = 0; i < count; ++i) writer.add(testPatternFrame(w, h, i));
        writer.close();
        std::cerr << "wrote " << count << " frames (" << w << "x" << h << "@" << fps << ") to "
                  << videoOut << "\n";
    }
    if (!audioSpec.empty()) {
        double seconds;
        int rate, channels;
        if (!parseAudioSpec(audioSpec, seconds, rate, channels)) {
            std::cerr << "gen: bad audio spec '" << audioSpec << "' (expected SECONDS@rate,ch)\n";
            return 2;
        }
        const auto samples = testToneSamples(rate, channels, seconds);
        writePcmS16Be(audioOut, samples);
        std::cerr << "wrote " << samples.size() << " samples (" << seconds << " s @" << rate
                  << " Hz, " << channels << " ch) to " << audioOut << "\n";
    }
    return 0;
}

// --- send / recv ---------------------------------------------------------

int cmdSend(const EndpointFlags& ep, const MediaFlags& media, bool noPace,
            const std::string& jsonOut) {
    ExperimentConfig cfg;
    cfg.mode = ExperimentConfig::Mode::sockets;
    cfg.peer = ep.endpoint();
    cfg.videoPath = media.videoPath;
    cfg.audioPath = media.audioPath;
    cfg.audioRate = media.audioRate;
    cfg.audioChannels = media.audioChannels;
    cfg.chatLineCount = media.chatCount;
    cfg.paceRealtime = !noPace;
    emitJson(sendReportToJson(runSendOnly(cfg)), jsonOut);
    return 0;
}

int cmdRecv(const EndpointFlags& ep, double durationS, const std::string& videoOut,
            const std::string& audioOut, int fps, const std::string& jsonOut) {
    std::array<UdpSocket, 3> sockets; // audio, video, chat
    sockets[0].bind(ep.audioPort);
    sockets[1].bind(ep.videoPort);
    sockets[2].bind(ep.chatPort);
    for (auto& s : sockets) s.setReceiveBufferBytes(4 << 20);

    std::array<StreamReceiver, 3> receivers{StreamReceiver(StreamId::audio),
                                            StreamReceiver(StreamId::video),
                                            StreamReceiver(StreamId::chat)};
    std::vector<std::pair<uint32_t, std::vector<uint8_t>>> videoFrames;
    std::vector<std::pair<uint32_t, std::vector<uint8_t>>> audioPayloads;

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(static_cast<int64_t>(durationS * 1000));
    while (!gStop && std::chrono::steady_clock::now() < deadline) {
        bool saw = false;
        for (size_t i = 0; i < 3; ++i) {
            while (auto dg = sockets[i].receive(0)) {
                saw = true;
                for (auto& frame : receivers[i].onDatagram(dg->bytes)) {
                    if (i == 1) {
                        videoFrames.emplace_back(frame.frameId, std::move(frame.bytes));
                    } else if (i == 0) {
                        audioPayloads.emplace_back(frame.frameId, std::move(frame.bytes));
                    } else {
                        std::cout << std::string(frame.bytes.begin(), frame.bytes.end());
                        std::cout.flush();
                    }
                }
            }
        }
        if (!saw) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    for (size_t i = 0; i < 3; ++i) {
        for (auto& frame : receivers[i].finish()) {
            if (i == 1) videoFrames.emplace_back(frame.frameId, std::move(frame.bytes));
            if (i == 0) audioPayloads.emplace_back(frame.frameId, std::move(frame.bytes));
        }
    }

    // write video frames in frame order
    uint64_t undecodable = 0;
    if (!videoOut.empty() && !videoFrames.empty()) {
        std::sort(videoFrames.begin(), videoFrames.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::optional<RvidWriter> writer;
        for (const auto& [id, bytes] : videoFrames) {
            try {
                RgbFrame frame = decodeVideoFrame(bytes);
                if (!writer) writer.emplace(videoOut, frame.width(), frame.height(), fps);
                writer->add(frame);
            } catch (const FormatError&) {
                ++undecodable;
            } catch (const std::invalid_argument&) {
                ++undecodable; // dimension change mid-stream
            }
        }
        if (writer) writer->close();
    }

    if (!audioOut.empty() && !audioPayloads.empty()) {
        std::sort(audioPayloads.begin(), audioPayloads.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<int16_t> samples;
        for (const auto& [id, bytes] : audioPayloads) {
            try {
                for (const SampleRow& row : unpackAudio(bytes)) {
                    samples.insert(samples.end(), row.samples.begin(), row.samples.end());
                }
            } catch (const FormatError&) {
                ++undecodable;
            }
        }
        writePcmS16Be(audioOut, samples);
    }

    OrderedJson j;
    const char* names[3] = {"audio", "video", "chat"};
    for (size_t i = 0; i < 3; ++i) {
        const StreamStats& s = receivers[i].stats();
        OrderedJson js;
        js["packets_received"] = s.received.load();
        js["lost"] = s.lost.load();
        js["reordered"] = s.reordered.load();
        js["crc_failures"] = s.crcFailures.load();
        js["malformed"] = s.malformed.load();
        js["frames_complete"] = s.framesComplete.load();
        js["frames_dropped"] = s.framesDropped.load();
        j["streams"][names[i]] = js;
    }
    j["video_frames_written"] = videoFrames.empty() || videoOut.empty() ? 0
                                                                        : videoFrames.size();
    j["undecodable"] = undecodable;
    emitJson(j.dump(2), jsonOut);
    return 0;
}

// --- echo ---------------------------------------------------------------

int cmdEcho(const Endpoint& local, const std::string& jsonOut) {
    EchoReport report;
    std::cerr << "echo service on ports " << local.videoPort << "/" << local.audioPort << "/"
              << local.chatPort << " (Ctrl-C to stop)\n";
    runEcho(local, gStop, &report);
    emitJson(echoReportToJson(report), jsonOut);
    return 0;
}

// --- loopback -------------------------------------------------------------

int cmdLoopback(const ExperimentConfig& cfg, const std::string& jsonOut,
                const std::string& traceCsv) {
    Verdict verdict = runSender(cfg);
    emitJson(verdictToJson(verdict), jsonOut);
    if (!traceCsv.empty()) writeTextFile(traceCsv, videoTraceCsv(verdict));
    return verdict.pass ? 0 : 1;
}

// --- simulate -------------------------------------------------------------

int cmdSimulate(const std::string& linkConfigPath, double bitrate, uint32_t packetSize,
                uint64_t count, uint64_t seed, bool seedSet, const std::string& streamName,
                const std::string& jsonOut, const std::string& traceCsv) {
    LinkModel model = loadLinkConfig(linkConfigPath);
    if (seedSet) model.seed = seed;

    static const std::map<std::string, StreamId> streamByName = {
        {"audio", StreamId::audio}, {"video", StreamId::video}, {"chat", StreamId::chat}};
    const auto streamIt = streamByName.find(streamName);
    if (streamIt == streamByName.end()) {
        std::cerr << "simulate: unknown stream '" << streamName << "'\n";
        return 2;
    }

    std::vector<OfferedPacket> offered;
    offered.reserve(count);
    const double intervalUs = count > 0 ? 8.0 * packetSize / bitrate * 1e6 : 0.0;
    for (uint64_t i = 0; i < count; ++i) {
        OfferedPacket p;
        p.streamId = streamIt->second;
        p.sizeBytes = packetSize;
        p.timestampUs = static_cast<uint64_t>(static_cast<double>(i) * intervalUs);
        offered.push_back(p);
    }

    auto [decisions, stats] = simulateLink(model, offered);

    OrderedJson j;
    j["link"] = {{"kind", model.kind == LinkKind::dsss ? "dsss" : "mimo"},
                 {"avg_snr_db", model.avgSnrDb},
                 {"sustainable_bps", model.sustainableBps()},
                 {"bandwidth_hz", model.effectiveBandwidth()},
                 {"seed", model.seed}};
    j["offered"] = {{"packets", count},
                    {"packet_size_bytes", packetSize},
                    {"bitrate_bps", bitrate},
                    {"stream", streamName}};
    j["delivered"] = stats.delivered;
    j["rate_dropped"] = stats.rateDropped;
    j["error_dropped"] = stats.errorDropped;
    j["delivery_fraction"] =
        count > 0 ? static_cast<double>(stats.delivered) / static_cast<double>(count) : 0.0;
    j["snr_eff"] = {{"mean_db", stats.meanSnrDb}, {"cv", stats.snrCv}};
    j["capacity_bps_mean"] = stats.meanCapacityBps;
    emitJson(j.dump(2), jsonOut);

    if (!traceCsv.empty()) {
        std::ostringstream os;
        os << "seq,snr_eff_db,gate,delivered\n";
        for (size_t i = 0; i < decisions.size(); ++i) {
            const LinkDecision& d = decisions[i];
            os << i << ',';
            if (d.gate == LinkGate::rate) {
                os << ",rate,0\n";
            } else {
                os << d.snrEffDb << ',' << (d.gate == LinkGate::error ? "error" : "none") << ','
                   << (d.delivered ? 1 : 0) << '\n';
            }
        }
        writeTextFile(traceCsv, os.str());
    }
    return 0;
}

// --- chat ---------------------------------------------------------------

int cmdChat(const std::string& peer, uint16_t peerPort, uint16_t listenPort) {
    UdpSocket socket;
    socket.bind(listenPort);
    std::cerr << "chat: listening on " << socket.localPort() << ", sending to " << peer << ":"
              << peerPort << " (EOF to quit)\n";

    std::atomic<bool> stopRx{false};
    std::thread rx([&] {
        StreamReceiver receiver(StreamId::chat);
        bool atLineStart = true; // split lines arrive as several packets
        while (!stopRx && !gStop) {
            auto dg = socket.receive(50);
            if (!dg) continue;
            for (const auto& frame : receiver.onDatagram(dg->bytes)) {
                if (atLineStart) std::cout << "[" << dg->fromAddress << "] ";
                std::cout << std::string(frame.bytes.begin(), frame.bytes.end());
                std::cout.flush();
                atLineStart = !frame.bytes.empty() && frame.bytes.back() == '\n';
            }
        }
    });

    Packetizer tx(StreamId::chat);
    uint32_t frameId = 0;
    std::string line;
    while (!gStop && std::getline(std::cin, line)) {
        for (const std::string& chunk : splitChatLine(line + "\n")) {
            const std::vector<uint8_t> payload(chunk.begin(), chunk.end());
            for (const auto& p : tx.packetize(payload, frameId++, nowUs())) {
                std::string error;
                if (!socket.sendTo(peer, peerPort, encodePacket(p), &error)) {
                    std::cerr << "chat send error: " << error << "\n";
                }
            }
        }
    }
    stopRx = true;
    rx.join();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    installSignalHandlers();

    CLI::App app{"multimedia-over-UDP transceiver, loopback harness and link simulator"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate deterministic test media");
    std::string videoSpec, audioSpec;
    std::string videoOut = "test.rvid", audioOut = "test.pcm";
    gen->add_option("--gen-test-video", videoSpec, "WxH@fps,N moving-gradient video spec");
    gen->add_option("--gen-test-audio", audioSpec, "SECONDS@rate,channels test-tone spec");
    gen->add_option("--video-out", videoOut, "output RVID path");
    gen->add_option("--audio-out", audioOut, "output PCM path");

    // send
    auto* send = app.add_subcommand("send", "stream media to a receiver");
    EndpointFlags sendEp;
    MediaFlags sendMedia;
    bool noPace = false;
    std::string sendJsonOut;
    sendEp.attach(send, true);
    sendMedia.attach(send);
    send->add_flag("--no-pace", noPace, "send as fast as possible instead of media-rate pacing");
    send->add_option("--json-out", sendJsonOut, "also write the stats JSON to this file");

    // recv
    auto* recv = app.add_subcommand("recv", "receive streams and write them to files");
    EndpointFlags recvEp;
    double duration = 10.0;
    std::string recvVideoOut = "received.rvid", recvAudioOut = "received.pcm", recvJsonOut;
    int recvFps = 30;
    recvEp.attach(recv, false);
    recv->add_option("--duration", duration, "seconds to listen")->check(CLI::NonNegativeNumber);
    recv->add_option("--video-out", recvVideoOut, "output RVID path");
    recv->add_option("--audio-out", recvAudioOut, "output PCM path");
    recv->add_option("--fps", recvFps, "fps field for the output RVID header")
        ->check(CLI::Range(1, 255));
    recv->add_option("--json-out", recvJsonOut, "also write the stats JSON to this file");

    // echo
    auto* echo = app.add_subcommand("echo", "run the echo service until interrupted");
    EndpointFlags echoEp;
    std::string echoJsonOut, echoConfigPath;
    echoEp.attach(echo, false);
    echo->add_option("--config", echoConfigPath, "experiment config file (role = echo)");
    echo->add_option("--json-out", echoJsonOut, "write final stats JSON to this file");

    // loopback
    auto* loopback = app.add_subcommand("loopback", "full send->echo->score experiment");
    EndpointFlags loopEp;
    MediaFlags loopMedia;
    bool inProcess = false;
    std::string linkConfigPath, loopJsonOut, loopTraceCsv, loopConfigPath;
    double minPsnr = 30.0, maxLoss = 0.05, maxRttMs = 1000.0, timeoutS = 5.0;
    uint64_t loopSeed = 1;
    loopEp.attach(loopback, true);
    loopMedia.attach(loopback);
    loopback->add_option("--config", loopConfigPath,
                         "experiment config file; explicit flags override its values");
    loopback->add_flag("--in-process", inProcess,
                       "route packets through the link simulator instead of sockets");
    loopback->add_option("--link-config", linkConfigPath, "link model file (in-process mode)");
    loopback->add_option("--seed", loopSeed, "experiment seed");
    loopback->add_option("--min-psnr", minPsnr, "pass threshold: mean PSNR, dB");
    loopback->add_option("--max-loss", maxLoss, "pass threshold: loss fraction");
    loopback->add_option("--max-rtt-ms", maxRttMs, "pass threshold: p95 round trip, ms");
    loopback->add_option("--timeout", timeoutS, "seconds to wait for echoes after sending");
    loopback->add_option("--json-out", loopJsonOut, "also write the verdict JSON to this file");
    loopback->add_option("--trace-csv", loopTraceCsv, "write the per-frame video trace CSV");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "offline link simulation on synthetic load");
    std::string simLinkConfig, simStream = "video", simJsonOut, simTraceCsv;
    double simBitrate = 6.1e6;
    uint32_t simPacketSize = 1430;
    uint64_t simCount = 10000, simSeed = 0;
    simulate->add_option("--link-config", simLinkConfig, "link model file")->required();
    simulate->add_option("--bitrate", simBitrate, "offered bitrate, bits/s")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--packet-size", simPacketSize, "offered datagram size, bytes")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--count", simCount, "number of offered packets");
    auto* simSeedOpt = simulate->add_option("--seed", simSeed, "override the config seed");
    simulate->add_option("--stream", simStream, "stream id for the offered load");
    simulate->add_option("--json-out", simJsonOut, "also write the stats JSON to this file");
    simulate->add_option("--trace-csv", simTraceCsv, "write the per-packet trace CSV");

    // chat
    auto* chat = app.add_subcommand("chat", "interactive stdin/stdout chat");
    std::string chatPeer = "127.0.0.1";
    uint16_t chatPeerPort = 5003, chatListenPort = 5003;
    chat->add_option("--peer", chatPeer, "peer IPv4 address");
    chat->add_option("--chat-port", chatPeerPort, "peer chat UDP port");
    chat->add_option("--listen-port", chatListenPort,
                     "local port to listen on (defaults to --chat-port)");
    auto* listenOpt = chat->get_option("--listen-port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // usage problems map to exit 2
    }

    try {
        if (gen->parsed()) return cmdGen(videoSpec, videoOut, audioSpec, audioOut);
        if (send->parsed()) return cmdSend(sendEp, sendMedia, noPace, sendJsonOut);
        if (recv->parsed()) {
            return cmdRecv(recvEp, duration, recvVideoOut, recvAudioOut, recvFps, recvJsonOut);
        }
        if (echo->parsed()) {
            Endpoint local;
            if (!echoConfigPath.empty()) {
                local = loadExperimentConfig(echoConfigPath).config.peer;
            }
            // explicit port flags win over the file
            if (echoConfigPath.empty() || echo->get_option("--video-port")->count() > 0) {
                local.videoPort = echoEp.videoPort;
            }
            if (echoConfigPath.empty() || echo->get_option("--audio-port")->count() > 0) {
                local.audioPort = echoEp.audioPort;
            }
            if (echoConfigPath.empty() || echo->get_option("--chat-port")->count() > 0) {
                local.chatPort = echoEp.chatPort;
            }
            local.validate();
            return cmdEcho(local, echoJsonOut);
        }
        if (loopback->parsed()) {
            ExperimentConfig cfg;
            if (!loopConfigPath.empty()) {
                Experiment exp = loadExperimentConfig(loopConfigPath);
                if (exp.role == "echo") {
                    std::cerr << "loopback: config file declares role = echo; run `mmlink echo "
                                 "--config ...` instead\n";
                    return 2;
                }
                cfg = exp.config;
            }
            auto given = [&](const std::string& flag) {
                return loopback->get_option(flag)->count() > 0;
            };
            const bool fresh = loopConfigPath.empty();
            if (inProcess) cfg.mode = ExperimentConfig::Mode::inProcess;
            if (fresh || given("--peer") || given("--video-port") || given("--audio-port") ||
                given("--chat-port")) {
                cfg.peer = loopEp.endpoint();
            }
            if (fresh || given("--video")) cfg.videoPath = loopMedia.videoPath;
            if (fresh || given("--audio")) cfg.audioPath = loopMedia.audioPath;
            if (fresh || given("--audio-rate")) cfg.audioRate = loopMedia.audioRate;
            if (fresh || given("--audio-channels")) cfg.audioChannels = loopMedia.audioChannels;
            if (fresh || given("--chat-count")) cfg.chatLineCount = loopMedia.chatCount;
            if (fresh || given("--seed")) cfg.seed = loopSeed;
            if (fresh || given("--timeout")) cfg.echoTimeoutS = timeoutS;
            if (fresh || given("--min-psnr")) cfg.thresholds.minPsnrDb = minPsnr;
            if (fresh || given("--max-loss")) cfg.thresholds.maxLossFraction = maxLoss;
            if (fresh || given("--max-rtt-ms")) cfg.thresholds.maxRttMs = maxRttMs;
            if (given("--link-config")) cfg.link = loadLinkConfig(linkConfigPath);
            if (cfg.mode == ExperimentConfig::Mode::inProcess && !cfg.link.has_value()) {
                std::cerr << "loopback: --in-process requires --link-config (or link_config in "
                             "the experiment file)\n";
                return 2;
            }
            return cmdLoopback(cfg, loopJsonOut, loopTraceCsv);
        }
        if (simulate->parsed()) {
            return cmdSimulate(simLinkConfig, simBitrate, simPacketSize, simCount, simSeed,
                               simSeedOpt->count() > 0, simStream, simJsonOut, simTraceCsv);
        }
        if (chat->parsed()) {
            const uint16_t listen = listenOpt->count() > 0 ? chatListenPort : chatPeerPort;
            return cmdChat(chatPeer, chatPeerPort, listen);
        }
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SocketError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
