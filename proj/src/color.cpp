#include "mmlink/color.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmlink {

namespace {

// Forward matrix, applied to 8-bit R'G'B' and divided by 255.
constexpr double kFwd[3][3] = {
    {65.481, 128.553, 24.966},
    {-37.797, -74.203, 112.0},
    {112.0, -93.786, -18.214},
};

struct Mat3 {
    double m[3][3];
};

// Exact floating-point inverse of kFwd/255, via the adjugate.
constexpr Mat3 inverseOfForward() {
    double a[3][3] = {};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = kFwd[i][j] / 255.0;

    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    Mat3 inv{};
    inv.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    inv.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    inv.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    inv.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    inv.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    inv.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    inv.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    inv.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    inv.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    return inv;
}

constexpr Mat3 kInv = inverseOfForward();

inline uint8_t roundClamp(double x, int lo, int hi) {
    const double r = std::floor(x + 0.5); // half-up
    if (r < lo) return static_cast<uint8_t>(lo);
    if (r > hi) return static_cast<uint8_t>(hi);
    return static_cast<uint8_t>(r);
}

} // namespace

void rgbToYcbcrPixel(uint8_t r, uint8_t g, uint8_t b, uint8_t& y, uint8_t& cb, uint8_t& cr) {
    const double rf = r, gf = g, bf = b;
    y = roundClamp(16.0 + (kFwd[0][0] * rf + kFwd[0][1] * gf + kFwd[0][2] * bf) / 255.0,
                   kLumaMin, kLumaMax);
    cb = roundClamp(128.0 + (kFwd[1][0] * rf + kFwd[1][1] * gf + kFwd[1][2] * bf) / 255.0,
                    kChromaMin, kChromaMax);
    cr = roundClamp(128.0 + (kFwd[2][0] * rf + kFwd[2][1] * gf + kFwd[2][2] * bf) / 255.0,
                    kChromaMin, kChromaMax);
}

void ycbcrToRgbPixel(uint8_t y, uint8_t cb, uint8_t cr, uint8_t& r, uint8_t& g, uint8_t& b) {
    const double v0 = static_cast<double>(y) - 16.0;
    const double v1 = static_cast<double>(cb) - 128.0;
    const double v2 = static_cast<double>(cr) - 128.0;
    r = roundClamp(kInv.m[0][0] * v0 + kInv.m[0][1] * v1 + kInv.m[0][2] * v2, 0, 255);
    g = roundClamp(kInv.m[1][0] * v0 + kInv.m[1][1] * v1 + kInv.m[1][2] * v2, 0, 255);
    b = roundClamp(kInv.m[2][0] * v0 + kInv.m[2][1] * v1 + kInv.m[2][2] * v2, 0, 255);
}

YcbcrFrame444 rgbToYcbcr(const RgbFrame& frame) {
    const size_t n = static_cast<size_t>(frame.width()) * frame.height();
    std::vector<uint8_t> y(n), cb(n), cr(n);
    const auto px = frame.pixels();
    for (size_t i = 0; i < n; ++i) {
        rgbToYcbcrPixel(px[3 * i], px[3 * i + 1], px[3 * i + 2], y[i], cb[i], cr[i]);
    }
    return YcbcrFrame444(frame.width(), frame.height(), std::move(y), std::move(cb), std::move(cr));
}

RgbFrame ycbcrToRgb(const YcbcrFrame444& frame) {
    const size_t n = static_cast<size_t>(frame.width()) * frame.height();
    std::vector<uint8_t> px(n * 3);
    const auto y = frame.y();
    const auto cb = frame.cb();
    const auto cr = frame.cr();
    for (size_t i = 0; i < n; ++i) {
        ycbcrToRgbPixel(y[i], cb[i], cr[i], px[3 * i], px[3 * i + 1], px[3 * i + 2]);
    }
    return RgbFrame(frame.width(), frame.height(), std::move(px));
}

YcbcrFrame422 chromaDownsample(const YcbcrFrame444& frame) {
    const int w = frame.width();
    const int h = frame.height();
    const int cw = w / 2;
    std::vector<uint8_t> y(frame.y().begin(), frame.y().end());
    std::vector<uint8_t> cb(static_cast<size_t>(cw) * h), cr(static_cast<size_t>(cw) * h);
    for (int row = 0; row < h; ++row) {
        const size_t src = static_cast<size_t>(row) * w;
        const size_t dst = static_cast<size_t>(row) * cw;
        for (int k = 0; k < cw; ++k) {
            // round-half-up mean of the horizontal pair
            const int sb = frame.cb()[src + 2 * k] + frame.cb()[src + 2 * k + 1];
            const int sr = frame.cr()[src + 2 * k] + frame.cr()[src + 2 * k + 1];
            cb[dst + k] = static_cast<uint8_t>((sb + 1) / 2);
            cr[dst + k] = static_cast<uint8_t>((sr + 1) / 2);
        }
    }
    return YcbcrFrame422(w, h, std::move(y), std::move(cb), std::move(cr));
}

YcbcrFrame444 chromaUpsample(const YcbcrFrame422& frame) {
    const int w = frame.width();
    const int h = frame.height();
    const int cw = frame.chromaWidth();
    std::vector<uint8_t> y(frame.y().begin(), frame.y().end());
    std::vector<uint8_t> cb(static_cast<size_t>(w) * h), cr(static_cast<size_t>(w) * h);
    for (int row = 0; row < h; ++row) {
        const size_t src = static_cast<size_t>(row) * cw;
        const size_t dst = static_cast<size_t>(row) * w;
        for (int k = 0; k < cw; ++k) {
            cb[dst + 2 * k] = cb[dst + 2 * k + 1] = frame.cb()[src + k];
            cr[dst + 2 * k] = cr[dst + 2 * k + 1] = frame.cr()[src + k];
        }
    }
    return YcbcrFrame444(w, h, std::move(y), std::move(cb), std::move(cr));
}

double psnr(const RgbFrame& a, const RgbFrame& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw std::invalid_argument("psnr: frame dimensions differ");
    }
    const auto pa = a.pixels();
    const auto pb = b.pixels();
    double sumSq = 0.0;
    for (size_t i = 0; i < pa.size(); ++i) {
        const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
        sumSq += d * d;
    }
    if (sumSq == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sumSq / static_cast<double>(pa.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

} // namespace mmlink
