#include "mmlink/halo.hpp"

#include "mmlink/media_files.hpp"
#include "mmlink/session.hpp"
#include "mmlink/udp.hpp"

#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <thread>

using namespace mmlink;

TEST_CASE("udp socket send/receive on loopback") {
    UdpSocket rx;
    rx.bind(0);
    const uint16_t port = rx.localPort();

    UdpSocket tx;
    const std::vector<uint8_t> payload = {1, 2, 3, 4, 5};
    REQUIRE(tx.sendTo("127.0.0.1", port, payload));

    auto dg = rx.receive(2000);
    REQUIRE(dg.has_value());
    CHECK(dg->bytes == payload);
    CHECK(dg->fromAddress == "127.0.0.1");

    CHECK_FALSE(rx.receive(10).has_value()); // timeout, not an error
}

TEST_CASE("send to an invalid address surfaces the error and does not throw") {
    UdpSocket tx;
    std::string error;
    CHECK_FALSE(tx.sendTo("not-an-address", 1234, std::vector<uint8_t>{1}, &error));
    CHECK(!error.empty());
}

TEST_CASE("socket loopback echo round trip is lossless") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string videoPath = (dir / "mmlink_udp_test.rvid").string();
    const std::string audioPath = (dir / "mmlink_udp_test.pcm").string();
    {
        RvidWriter writer(videoPath, 32, 32, 30);
        for (int i = 0; i < 10; ++i) writer.add(testPatternFrame(32, 32, i));
        writer.close();
    }
    writePcmS16Be(audioPath, testToneSamples(8000, 1, 0.2));

    Endpoint echoEndpoint;
    echoEndpoint.address = "127.0.0.1";
    echoEndpoint.videoPort = 47801;
    echoEndpoint.audioPort = 47802;
    echoEndpoint.chatPort = 47803;

    std::atomic<bool> stop{false};
    EchoReport echoReport;
    std::thread echoThread([&] { runEcho(echoEndpoint, stop, &echoReport); });

    ExperimentConfig cfg;
    cfg.mode = ExperimentConfig::Mode::sockets;
    cfg.peer = echoEndpoint;
    cfg.videoPath = videoPath;
    cfg.audioPath = audioPath;
    cfg.chatLineCount = 4;
    cfg.echoTimeoutS = 5.0;
    cfg.thresholds.minPsnrDb = 40.0;
    cfg.thresholds.maxLossFraction = 0.0;
    cfg.thresholds.maxRttMs = 2000.0;

    Verdict v = runSender(cfg);
    stop = true;
    echoThread.join();
    std::remove(videoPath.c_str());
    std::remove(audioPath.c_str());

    INFO(verdictToJson(v));
    CHECK(v.pass);
    CHECK(v.video.framesReturned == 10);
    CHECK(v.psnr.exactFrames == 10);
    CHECK(v.audioExact);
    CHECK(v.chatLinesReturned == 4);
    CHECK(v.rtt.count > 0);
    CHECK(echoReport.framesEchoed >= 10);
    CHECK(echoReport.crcFailures == 0);
}

TEST_CASE("echo survives a malformed datagram flood and keeps echoing") {
    Endpoint echoEndpoint;
    echoEndpoint.address = "127.0.0.1";
    echoEndpoint.videoPort = 47811;
    echoEndpoint.audioPort = 47812;
    echoEndpoint.chatPort = 47813;

    std::atomic<bool> stop{false};
    EchoReport report;
    std::thread echoThread([&] { runEcho(echoEndpoint, stop, &report); });
    std::this_thread::sleep_for(std::chrono::milliseconds(100));

    UdpSocket sender;
    sender.bind(0);
    // garbage datagrams of assorted shapes
    for (int i = 0; i < 50; ++i) {
        std::vector<uint8_t> junk(static_cast<size_t>(i * 7 % 90), static_cast<uint8_t>(i));
        sender.sendTo("127.0.0.1", echoEndpoint.chatPort, junk);
    }
    // a valid corrupted packet: right shape, broken crc
    Packetizer tx(StreamId::chat);
    auto good = tx.packetize(std::vector<uint8_t>{'h', 'i', '\n'}, 0, 0);
    auto corrupted = encodePacket(good[0]);
    corrupted[kHeaderSize] ^= 0xFF;
    sender.sendTo("127.0.0.1", echoEndpoint.chatPort, corrupted);
    // and finally a healthy one: the echo must still answer
    auto healthy = tx.packetize(std::vector<uint8_t>{'o', 'k', '\n'}, 1, 0);
    sender.sendTo("127.0.0.1", echoEndpoint.chatPort, encodePacket(healthy[0]));

    auto reply = sender.receive(3000);
    stop = true;
    echoThread.join();

    REQUIRE(reply.has_value());
    auto decoded = decodePacket(reply->bytes);
    REQUIRE(decoded.status == DecodeStatus::ok);
    CHECK(decoded.packet.payload == std::vector<uint8_t>{'o', 'k', '\n'});
    CHECK(report.malformed >= 40); // tiny junk under the header size is simply unparseable
    CHECK(report.crcFailures == 1);
    CHECK(report.framesEchoed == 1);
}

TEST_CASE("sender times out cleanly when no echo peer exists") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string videoPath = (dir / "mmlink_noecho.rvid").string();
    {
        RvidWriter writer(videoPath, 16, 16, 30);
        writer.add(testPatternFrame(16, 16, 0));
        writer.close();
    }

    ExperimentConfig cfg;
    cfg.mode = ExperimentConfig::Mode::sockets;
    cfg.peer.address = "127.0.0.1";
    cfg.peer.videoPort = 47901; // nobody listens here
    cfg.peer.audioPort = 47902;
    cfg.peer.chatPort = 47903;
    cfg.videoPath = videoPath;
    cfg.echoTimeoutS = 0.5;

    Verdict v = runSender(cfg);
    std::remove(videoPath.c_str());

    CHECK_FALSE(v.pass);
    CHECK(v.video.packetsReceived == 0);
    bool mentionsTimeout = false;
    for (const auto& f : v.failures) mentionsTimeout |= f.find("timeout") != std::string::npos;
    CHECK(mentionsTimeout);
}
