// Acceptance suite: one line per criterion, PASS/FAIL with the measured
// values. Run with no arguments for all criteria, or pass criterion numbers.
//
// Exit code 0 when every selected criterion passes.

#include "mmlink/color.hpp"
#include "mmlink/crc32.hpp"
#include "mmlink/halo.hpp"
#include "mmlink/link.hpp"
#include "mmlink/link_config.hpp"
#include "mmlink/media_files.hpp"
#include "mmlink/packet.hpp"
#include "mmlink/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef MMLINK_CONFIG_DIR
#define MMLINK_CONFIG_DIR "configs"
#endif

using namespace mmlink;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double secondsSince(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string tempFile(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// --- criterion 1: exhaustive color round trip ------------------------------

Outcome criterion1() {
    const auto start = std::chrono::steady_clock::now();
    long violations = 0;
    int maxError = 0;
    int exR = -1, exG = -1, exB = -1;
    uint8_t exY = 0, exCb = 0, exCr = 0, exR2 = 0, exG2 = 0, exB2 = 0;

    for (int r = 0; r < 256; ++r) {
        for (int g = 0; g < 256; ++g) {
            for (int b = 0; b < 256; ++b) {
                uint8_t y, cb, cr, r2, g2, b2;
                rgbToYcbcrPixel(static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                                static_cast<uint8_t>(b), y, cb, cr);
                ycbcrToRgbPixel(y, cb, cr, r2, g2, b2);
                const int err = std::max({std::abs(r - r2), std::abs(g - g2), std::abs(b - b2)});
                if (err > 1) {
                    ++violations;
                    if (exR < 0) {
                        exR = r; exG = g; exB = b;
                        exY = y; exCb = cb; exCr = cr;
                        exR2 = r2; exG2 = g2; exB2 = b2;
                    }
                }
                if (err > maxError) maxError = err;
            }
        }
    }
    const double elapsed = secondsSince(start);

    Outcome o;
    o.pass = maxError <= 1 && elapsed < 60.0;
    std::ostringstream os;
    os << "color round-trip over all 2^24 triples: max per-channel error " << maxError
       << " (required <= 1), " << violations << " of 16777216 triples exceed";
    if (exR >= 0) {
        os << "; e.g. rgb(" << exR << "," << exG << "," << exB << ") -> ycbcr(" << int(exY) << ","
           << int(exCb) << "," << int(exCr) << ") -> rgb(" << int(exR2) << "," << int(exG2) << ","
           << int(exB2) << ")";
    }
    os << "; " << elapsed << " s";
    o.detail = os.str();
    return o;
}

// --- criterion 2: pipeline quality on random frames ------------------------

Outcome criterion2() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(20240601);
    double minPsnr = 1e9;
    int bitIdentical = 0;
    const int frames = 100;
    for (int i = 0; i < frames; ++i) {
        RgbFrame original = randomSmoothFrame(rng, 64, 64, i);
        RgbFrame once = pipelineReference(original);
        RgbFrame twice = pipelineReference(once);
        minPsnr = std::min(minPsnr, psnr(original, once));
        if (twice == once) ++bitIdentical;
    }
    const double elapsed = secondsSince(start);

    Outcome o;
    o.pass = minPsnr >= 40.0 && bitIdentical == frames && elapsed < 5.0;
    std::ostringstream os;
    os << "pipeline quality on " << frames << " random 64x64 frames: min PSNR " << minPsnr
       << " dB (required >= 40), second pass bit-identical on " << bitIdentical << "/" << frames
       << "; " << elapsed << " s";
    o.detail = os.str();
    return o;
}

// --- criterion 3: wire format golden vectors and corruption rejection ------

uint32_t crcBitwise(const std::vector<uint8_t>& data) {
    uint32_t crc = 0xFFFFFFFFu;
    for (uint8_t byte : data) {
        crc ^= byte;
        for (int k = 0; k < 8; ++k) crc = (crc & 1) ? (crc >> 1) ^ 0xEDB88320u : crc >> 1;
    }
    return ~crc;
}

Outcome criterion3() {
    Outcome o;
    std::ostringstream os;

    const std::vector<uint8_t> nine = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
    const bool crcOk = crc32(nine) == 0xCBF43926u;

    // golden encode vector, CRC computed by the independent bitwise oracle
    MediaPacket golden;
    golden.streamId = StreamId::video;
    golden.payload = {'A', 'B'};
    std::vector<uint8_t> expected = {0x4D, 0x4D, 0x01, 0x02, 0x00, 0x00, 0x00, 0x00,
                                     0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01,
                                     0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                                     0x00, 0x02, 0x41, 0x42};
    const uint32_t crc = crcBitwise(expected);
    expected.push_back(static_cast<uint8_t>(crc >> 24));
    expected.push_back(static_cast<uint8_t>(crc >> 16));
    expected.push_back(static_cast<uint8_t>(crc >> 8));
    expected.push_back(static_cast<uint8_t>(crc));
    const bool goldenOk = encodePacket(golden) == expected;

    // every single-bit corruption of a 100-packet corpus is rejected
    std::mt19937 rng(33);
    std::uniform_int_distribution<int> len(0, 120);
    std::uniform_int_distribution<uint32_t> u32;
    uint64_t corruptions = 0, accepted = 0;
    for (int i = 0; i < 100; ++i) {
        MediaPacket p;
        p.streamId = static_cast<StreamId>(1 + i % 3);
        p.seq = u32(rng);
        p.frameId = u32(rng);
        p.fragCount = static_cast<uint16_t>(1 + u32(rng) % 4);
        p.fragIndex = static_cast<uint16_t>(u32(rng) % p.fragCount);
        p.timestampUs = u32(rng);
        p.payload.resize(len(rng));
        for (auto& b : p.payload) b = static_cast<uint8_t>(u32(rng));
        const auto bytes = encodePacket(p);
        for (size_t pos = 0; pos < bytes.size(); ++pos) {
            for (int bit = 0; bit < 8; ++bit) {
                auto damaged = bytes;
                damaged[pos] ^= static_cast<uint8_t>(1 << bit);
                ++corruptions;
                if (decodePacket(damaged).status == DecodeStatus::ok) ++accepted;
            }
        }
    }

    o.pass = crcOk && goldenOk && accepted == 0;
    os << "wire format: crc32(\"123456789\")=0x" << std::hex << crc32(nine) << std::dec
       << (crcOk ? " ok" : " WRONG") << ", golden vector " << (goldenOk ? "matches" : "DIFFERS")
       << ", " << accepted << "/" << corruptions << " single-bit corruptions accepted";
    o.detail = os.str();
    return o;
}

// --- criterion 4: real-socket loopback -------------------------------------

Outcome criterion4() {
    const auto start = std::chrono::steady_clock::now();
    const std::string videoPath = tempFile("mmlink_acc4.rvid");
    const std::string audioPath = tempFile("mmlink_acc4.pcm");
    {
        RvidWriter writer(videoPath, 64, 64, 30);
        for (int i = 0; i < 100; ++i) writer.add(testPatternFrame(64, 64, i));
        writer.close();
    }
    writePcmS16Be(audioPath, testToneSamples(8000, 1, 2.0));

    Endpoint echoEndpoint;
    echoEndpoint.address = "127.0.0.1";
    echoEndpoint.videoPort = 48011;
    echoEndpoint.audioPort = 48012;
    echoEndpoint.chatPort = 48013;

    std::atomic<bool> stop{false};
    std::thread echoThread([&] { runEcho(echoEndpoint, stop); });

    ExperimentConfig cfg;
    cfg.mode = ExperimentConfig::Mode::sockets;
    cfg.peer = echoEndpoint;
    cfg.videoPath = videoPath;
    cfg.audioPath = audioPath;
    cfg.chatLineCount = 20;
    cfg.echoTimeoutS = 10.0;
    cfg.thresholds.minPsnrDb = 40.0;
    cfg.thresholds.maxLossFraction = 0.0;
    cfg.thresholds.maxRttMs = 5000.0;

    Verdict v = runSender(cfg);
    stop = true;
    echoThread.join();
    std::remove(videoPath.c_str());
    std::remove(audioPath.c_str());
    const double elapsed = secondsSince(start);

    const uint64_t lostTotal = (v.video.packetsSent - v.video.packetsReceived) +
                               (v.audio.packetsSent - v.audio.packetsReceived) +
                               (v.chat.packetsSent - v.chat.packetsReceived);
    // "PSNR equals the pipeline-only reference": every returned frame is
    // byte-identical to the reference, i.e. the exact-match marker.
    const bool psnrExact = v.psnr.scored == 100 && v.psnr.exactFrames == 100;

    Outcome o;
    o.pass = v.pass && lostTotal == 0 && psnrExact && v.audioExact && v.chatExact &&
             v.chatLinesReturned == 20 && elapsed < 60.0;
    std::ostringstream os;
    os << "socket loopback (100 video frames + 2 s audio + 20 chat lines): verdict "
       << (v.pass ? "pass" : "FAIL") << ", lost packets " << lostTotal << ", exact frames "
       << v.psnr.exactFrames << "/100, audio exact " << (v.audioExact ? "yes" : "NO")
       << ", chat verbatim " << (v.chatExact ? "yes" : "NO") << "; " << elapsed
       << " s (required < 60)";
    o.detail = os.str();
    return o;
}

// --- criterion 5: SNR constancy --------------------------------------------

Outcome criterion5() {
    const auto start = std::chrono::steady_clock::now();
    const int draws = 10000;

    auto cvOf = [&](const LinkModel& m, uint64_t seed) {
        GaussianRng rng(seed);
        double sum = 0, sumSq = 0;
        for (int i = 0; i < draws; ++i) {
            const double g = effectiveSnr(m, rayleighDraw(rng, m.txAntennas, m.rxAntennas));
            sum += g;
            sumSq += g * g;
        }
        const double mean = sum / draws;
        return std::sqrt(std::max(0.0, sumSq / draws - mean * mean)) / mean;
    };

    LinkModel siso = LinkModel::dsssDefault();
    siso.avgSnrDb = 15.0;
    LinkModel mimo = LinkModel::mimoDefault(3, 3);
    mimo.avgSnrDb = 15.0;

    const double cvSiso = cvOf(siso, 7001);
    const double cvMimo = cvOf(mimo, 7002);
    const double ratio = cvMimo / cvSiso;
    const double elapsed = secondsSince(start);

    Outcome o;
    o.pass = ratio <= 0.40 && elapsed < 5.0;
    std::ostringstream os;
    os << "SNR constancy over " << draws << " draws: CV(MIMO 3x3)=" << cvMimo
       << ", CV(SISO)=" << cvSiso << ", ratio " << ratio << " (required <= 0.40, theory 1/3); "
       << elapsed << " s";
    o.detail = os.str();
    return o;
}

// --- criterion 6: BER oracle ------------------------------------------------

Outcome criterion6() {
    const auto start = std::chrono::steady_clock::now();
    const double analytic = berBpskRayleigh(10.0);
    const bool analyticOk = std::abs(analytic - 0.02327) <= 0.0001;

    GaussianRng rng(60601);
    const int trials = 1000000;
    long errors = 0;
    for (int i = 0; i < trials; ++i) {
        const double fade = rayleighDraw(rng, 1, 1).sumPower();
        if (rng.uniform() <= berBpskAwgn(10.0 * fade)) ++errors;
    }
    const double mc = static_cast<double>(errors) / trials;
    const double rel = std::abs(mc - analytic) / analytic;
    const double elapsed = secondsSince(start);

    Outcome o;
    o.pass = analyticOk && rel <= 0.10 && elapsed < 30.0;
    std::ostringstream os;
    os << "BER oracle: closed form " << analytic << " (required 0.02327 +/- 0.0001), Monte Carlo "
       << mc << " over 1e6 per-bit fades, relative gap " << rel << " (required <= 0.10); "
       << elapsed << " s";
    o.detail = os.str();
    return o;
}

// --- criterion 7: Barker properties ------------------------------------------

Outcome criterion7() {
    // brute-force aperiodic autocorrelation
    int peak = 0, maxSidelobe = 0;
    for (int lag = -10; lag <= 10; ++lag) {
        int corr = 0;
        for (int i = 0; i < kBarkerLength; ++i) {
            const int j = i + lag;
            if (j >= 0 && j < kBarkerLength) corr += kBarker11[i] * kBarker11[j];
        }
        if (lag == 0) {
            peak = corr;
        } else {
            maxSidelobe = std::max(maxSidelobe, std::abs(corr));
        }
    }

    // processing gain: identical fade sequences, spread vs unspread
    LinkModel spread = LinkModel::dsssDefault();
    LinkModel unspread = spread;
    unspread.spreadCode = SpreadCode::none;
    GaussianRng rngA(7), rngB(7);
    double sumSpread = 0, sumUnspread = 0;
    for (int i = 0; i < 10000; ++i) {
        sumSpread += effectiveSnr(spread, rayleighDraw(rngA, 1, 1));
        sumUnspread += effectiveSnr(unspread, rayleighDraw(rngB, 1, 1));
    }
    const double gainDb = 10.0 * std::log10(sumSpread / sumUnspread);
    const bool gainOk = std::abs(gainDb - 10.414) <= 0.001;

    // despreading under every 0-, 1- and 2-chip corruption of one symbol
    bool despreadOk = true;
    for (int bitSign = -1; bitSign <= 1 && despreadOk; bitSign += 2) {
        const std::vector<int8_t> bits = {static_cast<int8_t>(bitSign)};
        const auto clean = barkerSpread(bits);
        for (int a = 0; a < 11 && despreadOk; ++a) {
            for (int b = a; b < 11 && despreadOk; ++b) {
                auto chips = clean;
                chips[a] = static_cast<int8_t>(-chips[a]);
                if (b != a) chips[b] = static_cast<int8_t>(-chips[b]);
                despreadOk = barkerDespread(chips) == bits;
            }
        }
    }

    Outcome o;
    o.pass = peak == 11 && maxSidelobe <= 1 && gainOk && despreadOk;
    std::ostringstream os;
    os << "Barker-11: autocorrelation peak " << peak << " (required 11), max |sidelobe| "
       << maxSidelobe << " (required <= 1), processing gain " << gainDb
       << " dB (required 10.414 +/- 0.001), 2-chip-flip despreading "
       << (despreadOk ? "recovers" : "FAILS");
    o.detail = os.str();
    return o;
}

// --- criterion 8: DSSS vs MIMO at video bitrate -------------------------------

Outcome criterion8() {
    const auto start = std::chrono::steady_clock::now();
    const std::string videoPath = tempFile("mmlink_acc8.rvid");
    const std::string audioPath = tempFile("mmlink_acc8.pcm");
    {
        // 64x64 @ 90 fps: 6 fragments per frame, ~6.1 Mbps of offered video
        RvidWriter writer(videoPath, 64, 64, 90);
        for (int i = 0; i < 900; ++i) writer.add(testPatternFrame(64, 64, i));
        writer.close();
    }
    writePcmS16Be(audioPath, testToneSamples(8000, 1, 10.0)); // 128 kbps exactly

    auto runOn = [&](const std::string& configName) {
        ExperimentConfig cfg;
        cfg.mode = ExperimentConfig::Mode::inProcess;
        cfg.videoPath = videoPath;
        cfg.audioPath = audioPath;
        cfg.chatLineCount = 0;
        cfg.seed = 42;
        cfg.link = loadLinkConfig(std::string(MMLINK_CONFIG_DIR) + "/" + configName);
        return runSender(cfg);
    };

    const Verdict dsss = runOn("dsss-default.link");
    const Verdict dsssAgain = runOn("dsss-default.link");
    const Verdict mimo = runOn("mimo-3x3-default.link");
    const Verdict mimoAgain = runOn("mimo-3x3-default.link");
    std::remove(videoPath.c_str());
    std::remove(audioPath.c_str());

    const double dsssVideo = 1.0 - dsss.video.frameLossFraction();
    const double mimoVideo = 1.0 - mimo.video.frameLossFraction();
    const double dsssAudio = 1.0 - dsss.audio.packetLossFraction();
    const double mimoAudio = 1.0 - mimo.audio.packetLossFraction();
    const bool deterministic = verdictToJson(dsss) == verdictToJson(dsssAgain) &&
                               verdictToJson(mimo) == verdictToJson(mimoAgain);
    const double elapsed = secondsSince(start);

    Outcome o;
    o.pass = dsssVideo <= 0.20 && mimoVideo >= 0.99 && dsssAudio >= 0.99 && mimoAudio >= 0.99 &&
             deterministic && elapsed < 120.0;
    std::ostringstream os;
    os << "DSSS vs MIMO at 6.1 Mbps offered video: DSSS frame delivery " << dsssVideo
       << " (required <= 0.20), MIMO " << mimoVideo << " (required >= 0.99); 128 kbps audio "
       << dsssAudio << " / " << mimoAudio << " (required >= 0.99 on both); seed-deterministic "
       << (deterministic ? "yes" : "NO") << "; " << elapsed << " s (required < 120)";
    o.detail = os.str();
    return o;
}

// --- criterion 9: capacity law ------------------------------------------------

Outcome criterion9() {
    const bool exact = shannonCapacity(1e6, 3.0) == 2e6;

    std::mt19937 rng(90901);
    std::uniform_real_distribution<double> sinr(0.0, 1000.0);
    bool monotone = true, concave = true;
    for (int i = 0; i < 10000; ++i) {
        double a = sinr(rng), b = sinr(rng);
        if (a > b) std::swap(a, b);
        if (a < b && shannonCapacity(1e6, a) >= shannonCapacity(1e6, b)) monotone = false;
        const double mid = shannonCapacity(1e6, (a + b) / 2.0);
        const double chord = (shannonCapacity(1e6, a) + shannonCapacity(1e6, b)) / 2.0;
        if (mid + 1e-9 < chord) concave = false;
    }
    const bool zeroAtZero = shannonCapacity(1e6, 0.0) == 0.0;

    Outcome o;
    o.pass = exact && monotone && concave && zeroAtZero;
    std::ostringstream os;
    os << "capacity law: C(1e6, 3) = " << shannonCapacity(1e6, 3.0)
       << (exact ? " (exactly 2e6)" : " (NOT exactly 2e6)") << ", strictly increasing "
       << (monotone ? "yes" : "NO") << ", concave " << (concave ? "yes" : "NO") << ", C(.,0)=0 "
       << (zeroAtZero ? "yes" : "NO");
    o.detail = os.str();
    return o;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& [number, fn] : criteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), number) == selected.end()) {
            continue;
        }
        const Outcome outcome = fn();
        std::printf("criterion %d: %s - %s\n", number, outcome.pass ? "PASS" : "FAIL",
                    outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
