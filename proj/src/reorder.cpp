#include "mmlink/reorder.hpp"

namespace mmlink {

void ReorderBuffer::emitPacket(MediaPacket packet) {
    Event ev;
    ev.kind = Event::Kind::packet;
    ev.seq = packet.seq;
    ev.packet = std::move(packet);
    pending_.push_back(std::move(ev));
    ++counters_.emitted;
}

void ReorderBuffer::declareLost(uint32_t seq) {
    Event ev;
    ev.kind = Event::Kind::lost;
    ev.seq = seq;
    pending_.push_back(std::move(ev));
    ++counters_.lost;
}

void ReorderBuffer::drainConsecutive() {
    for (auto it = held_.begin(); it != held_.end() && it->first == nextExpected_;) {
        emitPacket(std::move(it->second));
        it = held_.erase(it);
        ++nextExpected_;
    }
}

void ReorderBuffer::push(MediaPacket packet) {
    const uint32_t seq = packet.seq;
    if (!started_) {
        started_ = true;
        nextExpected_ = seq;
    }

    const int32_t ahead = seqDiff(seq, nextExpected_);
    if (ahead < 0) {
        ++counters_.late;
        return;
    }
    if (ahead == 0) {
        emitPacket(std::move(packet));
        ++nextExpected_;
        drainConsecutive();
        return;
    }

    // Out of order: hold it, then age out anything the window no longer covers.
    if (!held_.emplace(seq, std::move(packet)).second) {
        ++counters_.duplicates;
        return;
    }
    ++counters_.reordered;

    const uint32_t newest = held_.rbegin()->first;
    while (seqDiff(newest, nextExpected_) >= static_cast<int32_t>(window_)) {
        declareLost(nextExpected_);
        ++nextExpected_;
        drainConsecutive();
    }
}

void ReorderBuffer::flush() {
    while (!held_.empty()) {
        if (held_.begin()->first == nextExpected_) {
            drainConsecutive();
        } else {
            declareLost(nextExpected_);
            ++nextExpected_;
        }
    }
}

} // namespace mmlink
