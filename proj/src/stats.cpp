#include "mmlink/stats.hpp"

#include <algorithm>

namespace mmlink {

LatencySummary summarizeLatency(std::vector<uint64_t> samples) {
    LatencySummary s;
    if (samples.empty()) return s;
    std::sort(samples.begin(), samples.end());
    s.count = samples.size();
    double sum = 0;
    for (uint64_t v : samples) sum += static_cast<double>(v);
    s.meanUs = sum / static_cast<double>(samples.size());
    s.p50Us = samples[samples.size() / 2];
    s.p95Us = samples[std::min(samples.size() - 1, samples.size() * 95 / 100)];
    s.maxUs = samples.back();
    return s;
}

} // namespace mmlink
