#include "mmlink/halo.hpp"

#include "mmlink/errors.hpp"
#include "mmlink/media_files.hpp"
#include "mmlink/pipeline.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace mmlink;

namespace {

struct TempMedia {
    std::string videoPath;
    std::string audioPath;

    TempMedia(int width, int height, int fps, int frames, double audioSeconds) {
        const auto dir = std::filesystem::temp_directory_path();
        videoPath = (dir / "mmlink_halo_test.rvid").string();
        audioPath = (dir / "mmlink_halo_test.pcm").string();
        RvidWriter writer(videoPath, width, height, fps);
        for (int i = 0; i < frames; ++i) writer.add(testPatternFrame(width, height, i));
        writer.close();
        writePcmS16Be(audioPath, testToneSamples(8000, 1, audioSeconds));
    }
    ~TempMedia() {
        std::remove(videoPath.c_str());
        std::remove(audioPath.c_str());
    }
};

LinkModel perfectLink() {
    LinkModel m = LinkModel::mimoDefault(3, 3);
    m.avgSnrDb = 100.0;
    m.symbolRate = 1e9;
    m.hopDelayUs = 1500;
    return m;
}

} // namespace

TEST_CASE("score frames: exact returns cap at 99 dB, corruption is finite") {
    std::vector<RgbFrame> sent;
    for (int i = 0; i < 3; ++i) sent.push_back(testPatternFrame(16, 8, i));

    std::vector<std::pair<uint32_t, RgbFrame>> returned;
    for (uint32_t i = 0; i < 3; ++i) returned.emplace_back(i, pipelineReference(sent[i]));

    ScoreStats stats = scoreFrames(sent, returned);
    CHECK(stats.scored == 3);
    CHECK(stats.exactFrames == 3);
    CHECK(stats.meanDb == doctest::Approx(99.0));
    CHECK(stats.minDb == doctest::Approx(99.0));
    for (const auto& s : stats.perFrame) CHECK(std::isinf(s.psnrDb));

    // one corrupt luma byte: finite PSNR, no longer exact
    RgbFrame damaged = [&] {
        RgbFrame ref = pipelineReference(sent[1]);
        std::vector<uint8_t> px(ref.pixels().begin(), ref.pixels().end());
        px[10] = static_cast<uint8_t>(px[10] + 40);
        return RgbFrame(ref.width(), ref.height(), std::move(px));
    }();
    returned[1] = {1, damaged};
    stats = scoreFrames(sent, returned);
    CHECK(stats.exactFrames == 2);
    CHECK(stats.minDb < 99.0);
    CHECK(stats.minDb > 0.0);

    // unknown frame id is an excluded anomaly
    returned.emplace_back(77, sent[0]);
    stats = scoreFrames(sent, returned);
    CHECK(stats.anomalies == 1);
    CHECK(stats.scored == 3);
}

TEST_CASE("in-process loopback over a perfect link passes with zero loss") {
    TempMedia media(16, 16, 30, 12, 0.25);
    ExperimentConfig cfg;
    cfg.mode = ExperimentConfig::Mode::inProcess;
    cfg.videoPath = media.videoPath;
    cfg.audioPath = media.audioPath;
    cfg.chatLineCount = 5;
    cfg.link = perfectLink();
    cfg.seed = 9;
    cfg.thresholds.minPsnrDb = 40.0;
    cfg.thresholds.maxLossFraction = 0.0;

    Verdict v = runSender(cfg);
    CHECK(v.pass);
    CHECK(v.failures.empty());
    CHECK(v.video.packetsSent == v.video.packetsReceived);
    CHECK(v.video.framesReturned == 12);
    CHECK(v.psnr.exactFrames == 12);
    CHECK(v.psnr.meanDb == doctest::Approx(99.0));
    CHECK(v.audioExact);
    CHECK(v.audioRowsReturned == v.audioRowsSent);
    CHECK(v.chatExact);
    CHECK(v.chatLinesReturned == 5);
    // virtual time: every round trip is exactly two hops
    CHECK(v.rtt.count > 0);
    CHECK(v.rtt.meanUs == doctest::Approx(2.0 * 1500));
    CHECK(v.rtt.maxUs == 2 * 1500);
}

TEST_CASE("in-process verdicts are bit-reproducible for a fixed seed") {
    TempMedia media(16, 16, 30, 6, 0.1);
    ExperimentConfig cfg;
    cfg.mode = ExperimentConfig::Mode::inProcess;
    cfg.videoPath = media.videoPath;
    cfg.audioPath = media.audioPath;
    cfg.link = LinkModel::dsssDefault();
    cfg.link->avgSnrDb = 8.0; // lossy on purpose
    cfg.seed = 123;

    const std::string a = verdictToJson(runSender(cfg));
    const std::string b = verdictToJson(runSender(cfg));
    CHECK(a == b);

    cfg.seed = 124;
    const std::string c = verdictToJson(runSender(cfg));
    CHECK(a != c);
}

TEST_CASE("in-process DSSS link fails at video bitrate, audio still clean") {
    // 64x64 @ 90 fps ~ 6.1 Mbps offered against the 1 Mbps DSSS ceiling.
    TempMedia media(64, 64, 90, 270, 3.0);
    ExperimentConfig cfg;
    cfg.mode = ExperimentConfig::Mode::inProcess;
    cfg.videoPath = media.videoPath;
    cfg.audioPath = media.audioPath;
    cfg.link = LinkModel::dsssDefault();
    cfg.seed = 11;
    cfg.thresholds.maxLossFraction = 0.05;

    Verdict v = runSender(cfg);
    CHECK_FALSE(v.pass);
    CHECK(v.video.frameLossFraction() >= 0.80);
    CHECK(v.audio.packetLossFraction() <= 0.01);
    CHECK(v.audioExact);

    // the verdict names the video failure
    bool mentionsVideo = false;
    for (const auto& f : v.failures) mentionsVideo |= f.find("video") != std::string::npos;
    CHECK(mentionsVideo);
}

TEST_CASE("worsening the link never flips a fail to a pass") {
    TempMedia media(32, 32, 30, 30, 0.5);
    ExperimentConfig cfg;
    cfg.mode = ExperimentConfig::Mode::inProcess;
    cfg.videoPath = media.videoPath;
    cfg.link = LinkModel::dsssDefault();
    cfg.seed = 5;
    cfg.thresholds.maxLossFraction = 0.02;

    uint64_t prevReturned = UINT64_MAX;
    bool prevPass = true;
    for (double snr : {25.0, 12.0, 6.0, 2.0}) {
        cfg.link->avgSnrDb = snr;
        Verdict v = runSender(cfg);
        CHECK(v.video.framesReturned <= prevReturned);
        if (!prevPass) CHECK_FALSE(v.pass);
        prevReturned = v.video.framesReturned;
        prevPass = v.pass;
    }
}

TEST_CASE("in-process mode requires a link model") {
    TempMedia media(16, 16, 30, 2, 0.0);
    ExperimentConfig cfg;
    cfg.mode = ExperimentConfig::Mode::inProcess;
    cfg.videoPath = media.videoPath;
    CHECK_THROWS_AS(runSender(cfg), FormatError);
}

TEST_CASE("nothing to send is a configuration error") {
    ExperimentConfig cfg;
    cfg.mode = ExperimentConfig::Mode::inProcess;
    cfg.link = perfectLink();
    CHECK_THROWS_AS(runSender(cfg), FormatError);
}
