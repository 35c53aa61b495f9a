#include "mmlink/link.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mmlink {

LinkModel LinkModel::dsssDefault() {
    LinkModel m;
    m.kind = LinkKind::dsss;
    m.txAntennas = 1;
    m.rxAntennas = 1;
    m.chipRate = 11e6;
    m.spreadCode = SpreadCode::barker11;
    m.avgSnrDb = 28.0;
    return m;
}

LinkModel LinkModel::mimoDefault(int nt, int nr) {
    LinkModel m;
    m.kind = LinkKind::mimo;
    m.txAntennas = nt;
    m.rxAntennas = nr;
    m.symbolRate = 10e6;
    m.avgSnrDb = 20.0;
    return m;
}

void LinkModel::validate() const {
    if (txAntennas < 1 || rxAntennas < 1) {
        throw std::invalid_argument("antenna counts must be >= 1");
    }
    if (kind == LinkKind::dsss && (txAntennas != 1 || rxAntennas != 1)) {
        throw std::invalid_argument("DSSS links are 1x1; got " + std::to_string(txAntennas) + "x" +
                                    std::to_string(rxAntennas));
    }
    if (kind == LinkKind::dsss && chipRate <= 0) {
        throw std::invalid_argument("chip_rate must be > 0");
    }
    if (kind == LinkKind::mimo && symbolRate <= 0) {
        throw std::invalid_argument("symbol_rate must be > 0");
    }
    if (bandwidthHz < 0 || delaySpreadS < 0 || symbolDurationS < 0) {
        throw std::invalid_argument("rates, bandwidth and durations must be positive");
    }
    if (isiPenaltyK < 0) {
        throw std::invalid_argument("isi_penalty_k must be >= 0");
    }
}

double GaussianRng::normal() {
    if (haveSpare_) {
        haveSpare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    haveSpare_ = true;
    return radius * std::cos(angle);
}

double FadeDraw::sumPower() const {
    double sum = 0.0;
    for (const auto& h : gains) sum += std::norm(h);
    return sum;
}

FadeDraw rayleighDraw(GaussianRng& rng, int txAntennas, int rxAntennas) {
    FadeDraw draw;
    draw.txAntennas = txAntennas;
    draw.rxAntennas = rxAntennas;
    draw.gains.reserve(static_cast<size_t>(txAntennas) * rxAntennas);
    const double scale = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < txAntennas * rxAntennas; ++i) {
        draw.gains.emplace_back(rng.normal() * scale, rng.normal() * scale);
    }
    return draw;
}

double effectiveSnr(const LinkModel& model, const FadeDraw& draw) {
    if (draw.txAntennas != model.txAntennas || draw.rxAntennas != model.rxAntennas) {
        throw std::invalid_argument("fade draw shape does not match the link model");
    }
    const double gammaBar = std::pow(10.0, model.avgSnrDb / 10.0);
    double gamma;
    if (model.kind == LinkKind::dsss) {
        gamma = gammaBar * draw.sumPower() * model.codeLength();
    } else {
        // maximal-ratio combining over all branches, power split across nt
        gamma = gammaBar / model.txAntennas * draw.sumPower();
    }
    return isiPenalty(gamma, model);
}

double isiPenalty(double gammaLinear, const LinkModel& model) {
    const double tau = model.delaySpreadS;
    const double T = model.effectiveSymbolDuration();
    if (tau <= T) return gammaLinear;
    return gammaLinear / (1.0 + model.isiPenaltyK * (tau / T - 1.0));
}

double shannonCapacity(double bandwidthHz, double sinrLinear) {
    if (sinrLinear < 0) throw std::invalid_argument("SINR must be >= 0");
    return bandwidthHz * std::log2(1.0 + sinrLinear);
}

std::vector<int8_t> barkerSpread(std::span<const int8_t> bits) {
    std::vector<int8_t> chips;
    chips.reserve(bits.size() * kBarkerLength);
    for (int8_t b : bits) {
        if (b != 1 && b != -1) {
            throw std::invalid_argument("bits must be +1 or -1, got " + std::to_string(b));
        }
        for (int8_t c : kBarker11) chips.push_back(static_cast<int8_t>(b * c));
    }
    return chips;
}

std::vector<int8_t> barkerDespread(std::span<const int8_t> chips) {
    if (chips.size() % kBarkerLength != 0) {
        throw std::invalid_argument("chip count " + std::to_string(chips.size()) +
                                    " is not a multiple of 11");
    }
    std::vector<int8_t> bits;
    bits.reserve(chips.size() / kBarkerLength);
    for (size_t i = 0; i < chips.size(); i += kBarkerLength) {
        int corr = 0;
        for (int k = 0; k < kBarkerLength; ++k) corr += chips[i + k] * kBarker11[k];
        bits.push_back(corr >= 0 ? int8_t{1} : int8_t{-1});
    }
    return bits;
}

double berBpskRayleigh(double avgSnrLinear) {
    if (avgSnrLinear < 0) throw std::invalid_argument("SNR must be >= 0");
    return 0.5 * (1.0 - std::sqrt(avgSnrLinear / (1.0 + avgSnrLinear)));
}

double berBpskAwgn(double snrLinear) {
    if (snrLinear < 0) throw std::invalid_argument("SNR must be >= 0");
    return 0.5 * std::erfc(std::sqrt(snrLinear));
}

LinkSimulator::LinkSimulator(const LinkModel& model, uint64_t seedOffset)
    : model_(model), seedOffset_(seedOffset) {
    model_.validate();
}

LinkSimulator::StreamState& LinkSimulator::stateFor(StreamId id) {
    auto it = streams_.find(id);
    if (it == streams_.end()) {
        // Substream per stream id keeps decisions independent of interleaving.
        const uint64_t substream =
            model_.seed + seedOffset_ + 0x9E3779B97F4A7C15ull * static_cast<uint64_t>(id);
        it = streams_.emplace(id, StreamState{GaussianRng(substream)}).first;
    }
    return it->second;
}

LinkDecision LinkSimulator::offer(const OfferedPacket& packet) {
    StreamState& state = stateFor(packet.streamId);
    LinkDecision decision;
    decision.snrEffDb = std::numeric_limits<double>::quiet_NaN();

    // rate gate: fixed 100 ms accounting windows, tail-drop of the excess
    const uint64_t window = packet.timestampUs / kRateWindowUs;
    if (!state.windowStarted || window != state.windowIndex) {
        state.windowStarted = true;
        state.windowIndex = window;
        state.windowBitsUsed = 0.0;
    }
    const double bits = 8.0 * static_cast<double>(packet.sizeBytes);
    const double budget = model_.sustainableBps() * (kRateWindowUs * 1e-6);
    if (state.windowBitsUsed + bits > budget) {
        decision.delivered = false;
        decision.gate = LinkGate::rate;
        return decision;
    }
    state.windowBitsUsed += bits;

    // error gate: block fade for the packet interval, one survival draw
    const FadeDraw draw = rayleighDraw(state.rng, model_.txAntennas, model_.rxAntennas);
    const double gamma = effectiveSnr(model_, draw);
    decision.snrEffDb = 10.0 * std::log10(gamma);
    const double pBit = berBpskAwgn(gamma);
    const double pSurvive = std::pow(1.0 - pBit, bits);
    if (state.rng.uniform() <= pSurvive) {
        decision.delivered = true;
        decision.gate = LinkGate::none;
    } else {
        decision.delivered = false;
        decision.gate = LinkGate::error;
    }
    return decision;
}

std::pair<std::vector<LinkDecision>, LinkRunStats> simulateLink(
    const LinkModel& model, std::span<const OfferedPacket> offered) {
    LinkSimulator sim(model);
    std::vector<LinkDecision> decisions;
    decisions.reserve(offered.size());
    LinkRunStats stats;
    stats.offered = offered.size();

    double snrSum = 0.0, snrSumSq = 0.0, capacitySum = 0.0;
    uint64_t faded = 0;
    for (const OfferedPacket& p : offered) {
        LinkDecision d = sim.offer(p);
        if (d.gate == LinkGate::rate) {
            ++stats.rateDropped;
        } else {
            const double snrLin = std::pow(10.0, d.snrEffDb / 10.0);
            snrSum += snrLin;
            snrSumSq += snrLin * snrLin;
            capacitySum += shannonCapacity(model.effectiveBandwidth(), snrLin);
            ++faded;
            if (d.delivered) {
                ++stats.delivered;
            } else {
                ++stats.errorDropped;
            }
        }
        decisions.push_back(d);
    }
    if (faded > 0) {
        const double mean = snrSum / static_cast<double>(faded);
        const double var = snrSumSq / static_cast<double>(faded) - mean * mean;
        stats.meanSnrDb = 10.0 * std::log10(mean);
        stats.snrCv = mean > 0 ? std::sqrt(std::max(0.0, var)) / mean : 0.0;
        stats.meanCapacityBps = capacitySum / static_cast<double>(faded);
    }
    return {std::move(decisions), stats};
}

} // namespace mmlink
