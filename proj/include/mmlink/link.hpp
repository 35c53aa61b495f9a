#pragma once

#include "mmlink/packet.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

namespace mmlink {

enum class LinkKind : uint8_t { dsss, mimo };
enum class SpreadCode : uint8_t { none, barker11 };

// The 11-chip Barker sequence used by 802.11b DSSS.
inline constexpr int kBarkerLength = 11;
inline constexpr int8_t kBarker11[kBarkerLength] = {+1, -1, +1, +1, -1, +1, +1, +1, -1, -1, -1};

// Physical-link configuration: a single-antenna DSSS link or an nt x nr MIMO
// diversity link over Rayleigh block fading.
struct LinkModel {
    LinkKind kind = LinkKind::dsss;
    double avgSnrDb = 15.0; // mean per-receive-branch SNR before processing/combining gains
    int txAntennas = 1;
    int rxAntennas = 1;
    double chipRate = 11e6;                     // DSSS
    SpreadCode spreadCode = SpreadCode::barker11; // DSSS; `none` is the unspread SISO reference
    double symbolRate = 10e6;                   // MIMO; DSSS derives chipRate / codeLength
    double bandwidthHz = 0;                     // 0: chipRate (DSSS) or symbolRate (MIMO)
    double delaySpreadS = 50e-9;
    double symbolDurationS = 0;                 // 0: 1 / symbol rate
    double isiPenaltyK = 10.0;
    uint64_t seed = 1;
    uint64_t hopDelayUs = 1000; // modeled one-way delay, used by in-process loopback

    static LinkModel dsssDefault();
    static LinkModel mimoDefault(int nt = 3, int nr = 3);

    int codeLength() const { return spreadCode == SpreadCode::barker11 ? kBarkerLength : 1; }
    double effectiveSymbolRate() const {
        return kind == LinkKind::dsss ? chipRate / codeLength() : symbolRate;
    }
    double effectiveSymbolDuration() const {
        return symbolDurationS > 0 ? symbolDurationS : 1.0 / effectiveSymbolRate();
    }
    double effectiveBandwidth() const {
        if (bandwidthHz > 0) return bandwidthHz;
        return kind == LinkKind::dsss ? chipRate : symbolRate;
    }
    // BPSK, one bit per symbol; MIMO adds the nt spatial-stream multiplier.
    double sustainableBps() const {
        return effectiveSymbolRate() * (kind == LinkKind::mimo ? txAntennas : 1);
    }

    void validate() const; // throws std::invalid_argument
};

// Seed-deterministic Gaussian source: std::mt19937_64 plus an explicit
// Box-Muller transform, so draws do not depend on the standard library's
// unspecified std::normal_distribution algorithm.
class GaussianRng {
public:
    explicit GaussianRng(uint64_t seed) : engine_(seed) {}

    // uniform on (0, 1]
    double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    double normal();

private:
    std::mt19937_64 engine_;
    bool haveSpare_ = false;
    double spare_ = 0.0;
};

// One packet interval's channel coefficients (block fading), E[|h|^2] = 1.
struct FadeDraw {
    int txAntennas = 1;
    int rxAntennas = 1;
    std::vector<std::complex<double>> gains; // nt * nr, row-major

    double sumPower() const;
};

FadeDraw rayleighDraw(GaussianRng& rng, int txAntennas, int rxAntennas);

// Post-processing SNR (linear) for one fade draw: DSSS despreading gain on the
// single branch, or maximal-ratio combining across all nt*nr branches with the
// transmit power split over nt. The ISI penalty is applied on top.
double effectiveSnr(const LinkModel& model, const FadeDraw& draw);

// gamma unchanged while the delay spread fits inside a symbol; otherwise
// gamma / (1 + k * (tau/T - 1)).
double isiPenalty(double gammaLinear, const LinkModel& model);

// C = B * log2(1 + SINR), bits/s.
double shannonCapacity(double bandwidthHz, double sinrLinear);

// DSSS chip-level spreading: bit b in {+1,-1} -> b * Barker-11. Despreading
// correlates each 11-chip block and takes the sign, so up to 2 flipped chips
// per symbol still decode. Throws std::invalid_argument on bits outside
// {+1,-1} or a chip count that is not a multiple of 11.
std::vector<int8_t> barkerSpread(std::span<const int8_t> bits);
std::vector<int8_t> barkerDespread(std::span<const int8_t> chips);

// Average BPSK bit error probability over Rayleigh fading with mean SNR
// gammaBar: 0.5 * (1 - sqrt(g/(1+g))).
double berBpskRayleigh(double avgSnrLinear);

// BPSK over AWGN at a known instantaneous SNR: Q(sqrt(2*g)) = 0.5*erfc(sqrt(g)).
double berBpskAwgn(double snrLinear);

struct OfferedPacket {
    StreamId streamId = StreamId::video;
    uint64_t timestampUs = 0;
    uint32_t sizeBytes = 0; // wire size of the datagram
};

enum class LinkGate : uint8_t { none, rate, error };

struct LinkDecision {
    bool delivered = false;
    LinkGate gate = LinkGate::none; // which gate dropped it (none when delivered)
    double snrEffDb = 0.0;          // block-fade effective SNR; NaN for rate drops
};

// Per-packet delivery decisions for one link.
//
// Gate 1 (rate): each stream is accounted separately against the sustainable
// rate in fixed 100 ms windows keyed by packet timestamp; packets beyond the
// window budget are tail-dropped. Streams are separate flows (they ride
// distinct UDP ports), hence the per-stream accounting.
//
// Gate 2 (error): per packet, draw a block fade, compute the effective SNR,
// and survive with probability (1 - Pb)^(8*bytes) where Pb is the AWGN BPSK
// bit error rate at that SNR, decided by one RNG draw.
//
// Decisions are deterministic per (model, stream, seed): every stream has its
// own RNG substream, so interleaving cannot change outcomes.
class LinkSimulator {
public:
    explicit LinkSimulator(const LinkModel& model, uint64_t seedOffset = 0);

    LinkDecision offer(const OfferedPacket& packet);

    const LinkModel& model() const { return model_; }

    static constexpr uint64_t kRateWindowUs = 100000;

private:
    struct StreamState {
        GaussianRng rng;
        uint64_t windowIndex = 0;
        bool windowStarted = false;
        double windowBitsUsed = 0.0;
    };

    StreamState& stateFor(StreamId id);

    LinkModel model_;
    uint64_t seedOffset_;
    std::map<StreamId, StreamState> streams_;
};

struct LinkRunStats {
    uint64_t offered = 0;
    uint64_t delivered = 0;
    uint64_t rateDropped = 0;
    uint64_t errorDropped = 0;
    double meanSnrDb = 0.0;      // over packets that reached the error gate
    double snrCv = 0.0;          // coefficient of variation of linear effective SNR
    double meanCapacityBps = 0.0; // ergodic estimate: mean of B*log2(1+snr)
};

std::pair<std::vector<LinkDecision>, LinkRunStats> simulateLink(
    const LinkModel& model, std::span<const OfferedPacket> offered);

} // namespace mmlink
