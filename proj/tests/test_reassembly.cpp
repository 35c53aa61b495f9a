#include "mmlink/reassembly.hpp"

#include <doctest.h>

#include <random>

using namespace mmlink;

namespace {

std::vector<MediaPacket> makeFrame(uint32_t frameId, uint32_t firstSeq, size_t size, size_t mtu) {
    std::vector<uint8_t> bytes(size);
    for (size_t i = 0; i < size; ++i) bytes[i] = static_cast<uint8_t>((frameId + i) & 0xFF);
    return fragmentFrame(bytes, StreamId::video, frameId, 1000 + frameId, firstSeq, mtu);
}

} // namespace

TEST_CASE("fragments arriving out of order reassemble to the original bytes") {
    auto packets = makeFrame(7, 50, 250, 100); // 3 fragments
    REQUIRE(packets.size() == 3);

    Reassembler r;
    CHECK_FALSE(r.push(packets[2]).has_value());
    CHECK_FALSE(r.push(packets[0]).has_value());
    auto done = r.push(packets[1]);
    REQUIRE(done.has_value());
    CHECK(done->frameId == 7);
    CHECK(done->timestampUs == 1007);

    std::vector<uint8_t> expected;
    for (const auto& p : packets) expected.insert(expected.end(), p.payload.begin(), p.payload.end());
    CHECK(done->bytes == expected);
}

TEST_CASE("duplicate fragments do not change the result") {
    auto packets = makeFrame(1, 0, 250, 100);
    Reassembler r;
    r.push(packets[0]);
    r.push(packets[1]);
    r.push(packets[1]); // duplicate
    CHECK(r.counters().duplicateFragments == 1);
    auto done = r.push(packets[2]);
    REQUIRE(done.has_value());
    CHECK(r.counters().framesComplete == 1);
}

TEST_CASE("a missing fragment leaves the frame incomplete until a loss dooms it") {
    auto packets = makeFrame(3, 10, 250, 100);
    Reassembler r;
    r.push(packets[0]);
    r.push(packets[2]);
    CHECK(r.inFlight() == 1);
    CHECK(r.counters().framesDropped == 0);

    r.noteLoss(packets[1].seq);
    CHECK(r.inFlight() == 0);
    CHECK(r.counters().framesDropped == 1);

    // the straggler arriving later is stale, not a new frame
    CHECK_FALSE(r.push(packets[1]).has_value());
    CHECK(r.counters().staleFragments == 1);
}

TEST_CASE("a loss seen before any fragment dooms the frame at creation") {
    auto packets = makeFrame(9, 100, 250, 100);
    Reassembler r;
    r.noteLoss(100); // fragment 0 of the frame we have not seen yet
    r.push(packets[1]);
    CHECK_FALSE(r.push(packets[2]).has_value());
    CHECK(r.counters().framesComplete == 0);
    CHECK(r.counters().framesDropped == 1);
}

TEST_CASE("conflicting frag_count drops the frame as corrupt") {
    auto packets = makeFrame(4, 0, 250, 100);
    Reassembler r;
    r.push(packets[0]);
    MediaPacket bad = packets[1];
    bad.fragCount = 5;
    CHECK_FALSE(r.push(bad).has_value());
    CHECK(r.counters().framesCorrupt == 1);
    CHECK(r.inFlight() == 0);
}

TEST_CASE("in-flight frames are bounded by eviction") {
    Reassembler r(4);
    for (uint32_t f = 0; f < 10; ++f) {
        auto packets = makeFrame(f, f * 10, 250, 100);
        r.push(packets[0]); // never complete any frame
    }
    CHECK(r.inFlight() <= 4);
    CHECK(r.counters().framesDropped >= 6);
}

TEST_CASE("interleaved frames complete independently") {
    auto a = makeFrame(20, 0, 300, 100);
    auto b = makeFrame(21, 3, 300, 100);
    Reassembler r;
    r.push(a[0]);
    r.push(b[0]);
    r.push(b[1]);
    r.push(a[1]);
    auto doneA = r.push(a[2]);
    auto doneB = r.push(b[2]);
    REQUIRE(doneA.has_value());
    REQUIRE(doneB.has_value());
    CHECK(doneA->frameId == 20);
    CHECK(doneB->frameId == 21);
}

TEST_CASE("reassembles randomly shuffled fragments across many frames") {
    std::mt19937 rng(77);
    Reassembler r;
    uint32_t seq = 0;
    for (uint32_t f = 0; f < 50; ++f) {
        std::uniform_int_distribution<size_t> sz(1, 900);
        auto packets = makeFrame(f, seq, sz(rng), 128);
        seq += static_cast<uint32_t>(packets.size());
        std::shuffle(packets.begin(), packets.end(), rng);
        size_t completions = 0;
        for (const auto& p : packets) {
            if (r.push(p)) ++completions;
        }
        CHECK(completions == 1);
    }
    CHECK(r.counters().framesComplete == 50);
    CHECK(r.counters().framesDropped == 0);
}
