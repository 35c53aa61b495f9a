#include "mmlink/media_files.hpp"

#include "mmlink/errors.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace mmlink;

namespace {

std::string tempPath(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

struct FileGuard {
    std::string path;
    ~FileGuard() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("rvid write/read round trip") {
    const std::string path = tempPath("mmlink_rt.rvid");
    FileGuard guard{path};

    std::vector<RgbFrame> frames;
    for (int i = 0; i < 5; ++i) frames.push_back(testPatternFrame(16, 8, i));
    {
        RvidWriter writer(path, 16, 8, 30);
        for (const auto& f : frames) writer.add(f);
        writer.close();
    }

    RvidInfo info;
    auto back = readAllFrames(path, &info);
    CHECK(info.width == 16);
    CHECK(info.height == 8);
    CHECK(info.fps == 30);
    CHECK(info.frameCount == 5);
    REQUIRE(back.size() == frames.size());
    for (size_t i = 0; i < frames.size(); ++i) CHECK(back[i] == frames[i]);

    CHECK(std::filesystem::file_size(path) == 13 + 5ull * 16 * 8 * 3);
}

TEST_CASE("rvid reader validates before streaming") {
    const std::string path = tempPath("mmlink_bad.rvid");
    FileGuard guard{path};

    SUBCASE("bad magic") {
        std::ofstream(path, std::ios::binary) << "JUNKJUNKJUNKJUNK";
        CHECK_THROWS_AS((RvidReader(path)), FormatError);
    }
    SUBCASE("length does not match header") {
        RvidWriter writer(path, 4, 4, 30);
        writer.add(RgbFrame::filled(4, 4, 1, 2, 3));
        writer.close();
        // append trailing garbage
        std::ofstream(path, std::ios::binary | std::ios::app) << "x";
        CHECK_THROWS_AS((RvidReader(path)), FormatError);
    }
    SUBCASE("odd width") {
        std::ofstream out(path, std::ios::binary);
        const uint8_t hdr[13] = {'R', 'V', 'I', 'D', 0, 3, 0, 1, 30, 0, 0, 0, 0};
        out.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
        out.close();
        CHECK_THROWS_AS((RvidReader(path)), FormatError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(RvidReader("/no/such/file.rvid"), FormatError); }
}

TEST_CASE("pcm write/read round trip and validation") {
    const std::string path = tempPath("mmlink_rt.pcm");
    FileGuard guard{path};

    auto samples = testToneSamples(8000, 2, 0.01);
    REQUIRE(samples.size() == 160);
    writePcmS16Be(path, samples);
    CHECK(readPcmS16Be(path) == samples);

    std::ofstream(path, std::ios::binary | std::ios::app) << "x"; // odd byte
    CHECK_THROWS_AS(readPcmS16Be(path), FormatError);
}

TEST_CASE("test pattern is deterministic and stays inside the gamut core") {
    RgbFrame a = testPatternFrame(64, 64, 3);
    RgbFrame b = testPatternFrame(64, 64, 3);
    CHECK(a == b);
    for (uint8_t v : a.pixels()) {
        CHECK(v >= 32);
        CHECK(v <= 223);
    }
    CHECK(testPatternFrame(64, 64, 4).pixels()[0] != a.pixels()[0]);
}

TEST_CASE("random smooth frames stay inside the gamut core") {
    std::mt19937 rng(2);
    for (int i = 0; i < 10; ++i) {
        RgbFrame f = randomSmoothFrame(rng, 64, 64, i);
        for (uint8_t v : f.pixels()) {
            CHECK(v >= 32);
            CHECK(v <= 223);
        }
    }
}
